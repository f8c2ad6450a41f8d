#ifndef FAMREL_CLASSIFIER_H_
#define FAMREL_CLASSIFIER_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace famrel {

struct Dataset {
  std::vector<std::vector<double>> features;
  std::vector<int> labels;  // 0 or 1

  std::size_t size() const { return labels.size(); }
  void Add(std::vector<double> x, int y) {
    features.push_back(std::move(x));
    labels.push_back(y);
  }
};

enum class ClassifierKind { kDecisionTree, kRuleList, kLogistic, kNaiveBayes };

std::string_view ClassifierKindName(ClassifierKind k);
ClassifierKind ParseClassifierKind(std::string_view s);

class BinaryClassifier {
 public:
  virtual ~BinaryClassifier() = default;

  virtual ClassifierKind kind() const = 0;
  virtual void Fit(const Dataset &data) = 0;
  // Probability of the positive class, in [0, 1].
  virtual double Probability(std::span<const double> x) const = 0;
  bool Label(std::span<const double> x) const { return Probability(x) > 0.5; }

  // JSON text; restored by DeserializeClassifier.
  virtual std::string Serialize() const = 0;
};

std::unique_ptr<BinaryClassifier> MakeClassifier(ClassifierKind kind);
std::unique_ptr<BinaryClassifier> DeserializeClassifier(std::string_view text);

// CART-style tree with Gini splits; leaf probabilities are Laplace-smoothed
// positive rates.
class DecisionTree : public BinaryClassifier {
 public:
  struct Options {
    int max_depth = 6;
    int min_leaf = 2;
  };
  DecisionTree() = default;
  explicit DecisionTree(Options options) : options_(options) {}

  ClassifierKind kind() const override { return ClassifierKind::kDecisionTree; }
  void Fit(const Dataset &data) override;
  double Probability(std::span<const double> x) const override;
  std::string Serialize() const override;
  static std::unique_ptr<DecisionTree> FromJson(std::string_view text);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    int feature = -1;  // -1 for leaves
    double threshold = 0;
    int left = -1;  // x[feature] <= threshold
    int right = -1;
    double probability = 0.5;
  };
  int Build(const Dataset &data, std::vector<std::size_t> &rows, int depth);

  Options options_;
  std::vector<Node> nodes_;
};

// Sequential covering for the positive class: each rule is a conjunction of
// threshold tests grown by FOIL gain; examples covered by an accepted rule are
// removed before the next rule is grown.
class RuleList : public BinaryClassifier {
 public:
  struct Condition {
    int feature = 0;
    bool greater = false;  // x > threshold when true, x <= threshold otherwise
    double threshold = 0;
  };
  struct LearnedRule {
    std::vector<Condition> conditions;
    double probability = 0.5;
  };
  struct Options {
    int max_rules = 20;
    int max_conditions = 5;
  };

  RuleList() = default;
  explicit RuleList(Options options) : options_(options) {}

  ClassifierKind kind() const override { return ClassifierKind::kRuleList; }
  void Fit(const Dataset &data) override;
  double Probability(std::span<const double> x) const override;
  std::string Serialize() const override;
  static std::unique_ptr<RuleList> FromJson(std::string_view text);

  const std::vector<LearnedRule> &rules() const { return rules_; }

 private:
  Options options_;
  std::vector<LearnedRule> rules_;
  double default_probability_ = 0.5;
};

// Batch gradient descent on standardised features with a small L2 penalty.
class LogisticRegression : public BinaryClassifier {
 public:
  struct Options {
    int iterations = 800;
    double learning_rate = 0.5;
    double l2 = 1e-4;
  };
  LogisticRegression() = default;
  explicit LogisticRegression(Options options) : options_(options) {}

  ClassifierKind kind() const override { return ClassifierKind::kLogistic; }
  void Fit(const Dataset &data) override;
  double Probability(std::span<const double> x) const override;
  std::string Serialize() const override;
  static std::unique_ptr<LogisticRegression> FromJson(std::string_view text);

 private:
  Options options_;
  std::vector<double> mean_, scale_, weights_;
  double bias_ = 0;
};

// Bernoulli naive Bayes over binary features with add-one smoothing.
class NaiveBayes : public BinaryClassifier {
 public:
  ClassifierKind kind() const override { return ClassifierKind::kNaiveBayes; }
  void Fit(const Dataset &data) override;
  double Probability(std::span<const double> x) const override;
  std::string Serialize() const override;
  static std::unique_ptr<NaiveBayes> FromJson(std::string_view text);

  // P(feature j = 1 | class c), smoothed.
  double FeatureProbability(int cls, std::size_t j) const;
  double ClassPrior(int cls) const;

 private:
  std::size_t class_count_[2] = {0, 0};
  std::vector<std::size_t> feature_count_[2];
};

// Assigns each example to one of `folds` folds, spreading positives and
// negatives evenly. Throws ValidationError when there are fewer positives than
// folds.
std::vector<int> StratifiedFolds(std::span<const int> labels, int folds,
                                 std::uint64_t seed);

}  // namespace famrel

#endif  // FAMREL_CLASSIFIER_H_
