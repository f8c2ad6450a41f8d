#include "famrel/classifier.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "famrel/error.h"
#include "json.hpp"

namespace famrel {
namespace {

using json = nlohmann::json;

double Laplace(std::size_t positives, std::size_t total) {
  return (static_cast<double>(positives) + 1.0) /
         (static_cast<double>(total) + 2.0);
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double Gini(double pos, double n) {
  if (n <= 0) return 0;
  const double p = pos / n;
  return 2.0 * p * (1.0 - p);
}

double FeatureAt(std::span<const double> x, std::size_t j) {
  return j < x.size() ? x[j] : 0.0;
}

void CheckLabels(const Dataset &data) {
  if (data.features.size() != data.labels.size()) {
    throw ValidationError("dataset has mismatched feature and label counts");
  }
  for (int y : data.labels) {
    if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
  }
}

std::size_t Width(const Dataset &data) {
  std::size_t w = 0;
  for (const auto &x : data.features) w = std::max(w, x.size());
  return w;
}

json ParseModelJson(std::string_view text, std::string_view kind) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ValidationError(std::string("classifier: ") + e.what());
  }
  if (j.value("kind", std::string()) != kind) {
    throw ValidationError("classifier kind mismatch, expected " +
                          std::string(kind));
  }
  return j;
}

}  // namespace

std::string_view ClassifierKindName(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::kDecisionTree: return "tree";
    case ClassifierKind::kRuleList: return "rules";
    case ClassifierKind::kLogistic: return "logistic";
    case ClassifierKind::kNaiveBayes: return "naive_bayes";
  }
  return "tree";
}

ClassifierKind ParseClassifierKind(std::string_view s) {
  for (ClassifierKind k :
       {ClassifierKind::kDecisionTree, ClassifierKind::kRuleList,
        ClassifierKind::kLogistic, ClassifierKind::kNaiveBayes}) {
    if (ClassifierKindName(k) == s) return k;
  }
  throw ValidationError("unknown classifier '" + std::string(s) + "'");
}

std::unique_ptr<BinaryClassifier> MakeClassifier(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kDecisionTree: return std::make_unique<DecisionTree>();
    case ClassifierKind::kRuleList: return std::make_unique<RuleList>();
    case ClassifierKind::kLogistic:
      return std::make_unique<LogisticRegression>();
    case ClassifierKind::kNaiveBayes: return std::make_unique<NaiveBayes>();
  }
  return nullptr;
}

std::unique_ptr<BinaryClassifier> DeserializeClassifier(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ValidationError(std::string("classifier: ") + e.what());
  }
  switch (ParseClassifierKind(j.value("kind", std::string()))) {
    case ClassifierKind::kDecisionTree: return DecisionTree::FromJson(text);
    case ClassifierKind::kRuleList: return RuleList::FromJson(text);
    case ClassifierKind::kLogistic: return LogisticRegression::FromJson(text);
    case ClassifierKind::kNaiveBayes: return NaiveBayes::FromJson(text);
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// DecisionTree

void DecisionTree::Fit(const Dataset &data) {
  CheckLabels(data);
  nodes_.clear();
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  if (rows.empty()) {
    nodes_.push_back(Node{});
    return;
  }
  Build(data, rows, 0);
}

int DecisionTree::Build(const Dataset &data, std::vector<std::size_t> &rows,
                        int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  std::size_t pos = 0;
  for (std::size_t r : rows) pos += data.labels[r];
  const std::size_t n = rows.size();
  nodes_[id].probability = Laplace(pos, n);
  const auto min_leaf = static_cast<std::size_t>(options_.min_leaf);
  if (depth >= options_.max_depth || n < 2 * min_leaf || pos == 0 || pos == n) {
    return id;
  }

  const double parent = Gini(static_cast<double>(pos), static_cast<double>(n));
  double best_gain = 1e-12;
  int best_feature = -1;
  double best_threshold = 0;
  const std::size_t width = Width(data);
  std::vector<std::size_t> order = rows;
  for (std::size_t f = 0; f < width; ++f) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return FeatureAt(data.features[a], f) < FeatureAt(data.features[b], f);
    });
    double left_pos = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_pos += data.labels[order[i]];
      const double v = FeatureAt(data.features[order[i]], f);
      const double next = FeatureAt(data.features[order[i + 1]], f);
      if (v == next) continue;
      const std::size_t nl = i + 1, nr = n - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double right_pos = static_cast<double>(pos) - left_pos;
      const double weighted =
          (static_cast<double>(nl) * Gini(left_pos, static_cast<double>(nl)) +
           static_cast<double>(nr) * Gini(right_pos, static_cast<double>(nr))) /
          static_cast<double>(n);
      const double gain = parent - weighted;
      if (gain > best_gain) {
        best_gain = gain;
        best_feature = static_cast<int>(f);
        best_threshold = (v + next) / 2.0;
      }
    }
  }
  if (best_feature < 0) return id;

  std::vector<std::size_t> left, right;
  for (std::size_t r : rows) {
    (FeatureAt(data.features[r], best_feature) <= best_threshold ? left : right)
        .push_back(r);
  }
  const int l = Build(data, left, depth + 1);
  const int r = Build(data, right, depth + 1);
  nodes_[id].feature = best_feature;
  nodes_[id].threshold = best_threshold;
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

double DecisionTree::Probability(std::span<const double> x) const {
  if (nodes_.empty()) return 0.5;
  int i = 0;
  while (nodes_[i].feature >= 0) {
    i = FeatureAt(x, nodes_[i].feature) <= nodes_[i].threshold ? nodes_[i].left
                                                               : nodes_[i].right;
  }
  return nodes_[i].probability;
}

std::string DecisionTree::Serialize() const {
  json nodes = json::array();
  for (const Node &n : nodes_) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.probability});
  }
  return json{{"kind", "tree"},
              {"max_depth", options_.max_depth},
              {"min_leaf", options_.min_leaf},
              {"nodes", nodes}}
      .dump();
}

std::unique_ptr<DecisionTree> DecisionTree::FromJson(std::string_view text) {
  const json j = ParseModelJson(text, "tree");
  auto tree = std::make_unique<DecisionTree>(
      Options{j.value("max_depth", 6), j.value("min_leaf", 2)});
  for (const json &n : j.at("nodes")) {
    tree->nodes_.push_back(Node{n[0].get<int>(), n[1].get<double>(),
                                n[2].get<int>(), n[3].get<int>(),
                                n[4].get<double>()});
  }
  return tree;
}

// ---------------------------------------------------------------------------
// RuleList

namespace {

bool Satisfies(std::span<const double> x, const RuleList::Condition &c) {
  const double v = FeatureAt(x, c.feature);
  return c.greater ? v > c.threshold : v <= c.threshold;
}

double FoilGain(double p0, double n0, double p1, double n1) {
  if (p1 <= 0) return -1;
  return p1 * (std::log2(p1 / (p1 + n1)) - std::log2(p0 / (p0 + n0)));
}

}  // namespace

void RuleList::Fit(const Dataset &data) {
  CheckLabels(data);
  rules_.clear();
  const std::size_t width = Width(data);
  std::vector<std::size_t> remaining(data.size());
  std::iota(remaining.begin(), remaining.end(), 0);

  auto count_pos = [&](const std::vector<std::size_t> &rows) {
    std::size_t p = 0;
    for (std::size_t r : rows) p += data.labels[r];
    return p;
  };

  while (static_cast<int>(rules_.size()) < options_.max_rules) {
    const std::size_t pos_left = count_pos(remaining);
    if (pos_left == 0) break;

    LearnedRule rule;
    std::vector<std::size_t> covered = remaining;
    while (static_cast<int>(rule.conditions.size()) < options_.max_conditions) {
      const double p0 = static_cast<double>(count_pos(covered));
      const double n0 = static_cast<double>(covered.size()) - p0;
      if (n0 == 0) break;
      double best_gain = 1e-9;
      std::optional<Condition> best;
      for (std::size_t f = 0; f < width; ++f) {
        std::vector<double> values;
        for (std::size_t r : covered) values.push_back(FeatureAt(data.features[r], f));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
          const double t = (values[i] + values[i + 1]) / 2.0;
          for (bool greater : {false, true}) {
            const Condition c{static_cast<int>(f), greater, t};
            double p1 = 0, n1 = 0;
            for (std::size_t r : covered) {
              if (!Satisfies(data.features[r], c)) continue;
              (data.labels[r] ? p1 : n1) += 1;
            }
            const double gain = FoilGain(p0, n0, p1, n1);
            if (gain > best_gain) {
              best_gain = gain;
              best = c;
            }
          }
        }
      }
      if (!best) break;
      rule.conditions.push_back(*best);
      std::erase_if(covered, [&](std::size_t r) {
        return !Satisfies(data.features[r], *best);
      });
    }
    const std::size_t p = count_pos(covered);
    rule.probability = Laplace(p, covered.size());
    if (p == 0 || rule.probability <= 0.5) break;
    rules_.push_back(rule);
    std::erase_if(remaining, [&](std::size_t r) {
      return std::all_of(rule.conditions.begin(), rule.conditions.end(),
                         [&](const Condition &c) {
                           return Satisfies(data.features[r], c);
                         });
    });
    if (rule.conditions.empty()) break;
  }
  default_probability_ = Laplace(count_pos(remaining), remaining.size());
}

double RuleList::Probability(std::span<const double> x) const {
  for (const LearnedRule &rule : rules_) {
    if (std::all_of(rule.conditions.begin(), rule.conditions.end(),
                    [&](const Condition &c) { return Satisfies(x, c); })) {
      return rule.probability;
    }
  }
  return default_probability_;
}

std::string RuleList::Serialize() const {
  json rules = json::array();
  for (const LearnedRule &r : rules_) {
    json conds = json::array();
    for (const Condition &c : r.conditions) {
      conds.push_back({c.feature, c.greater, c.threshold});
    }
    rules.push_back({{"conditions", conds}, {"probability", r.probability}});
  }
  return json{{"kind", "rules"},
              {"rules", rules},
              {"default_probability", default_probability_}}
      .dump();
}

std::unique_ptr<RuleList> RuleList::FromJson(std::string_view text) {
  const json j = ParseModelJson(text, "rules");
  auto list = std::make_unique<RuleList>();
  for (const json &r : j.at("rules")) {
    LearnedRule rule;
    rule.probability = r.at("probability").get<double>();
    for (const json &c : r.at("conditions")) {
      rule.conditions.push_back(
          {c[0].get<int>(), c[1].get<bool>(), c[2].get<double>()});
    }
    list->rules_.push_back(std::move(rule));
  }
  list->default_probability_ = j.at("default_probability").get<double>();
  return list;
}

// ---------------------------------------------------------------------------
// LogisticRegression

void LogisticRegression::Fit(const Dataset &data) {
  CheckLabels(data);
  const std::size_t width = Width(data);
  const std::size_t n = data.size();
  mean_.assign(width, 0.0);
  scale_.assign(width, 1.0);
  weights_.assign(width, 0.0);
  bias_ = 0;
  if (n == 0) return;
  for (const auto &x : data.features) {
    for (std::size_t j = 0; j < width; ++j) mean_[j] += FeatureAt(x, j);
  }
  for (double &m : mean_) m /= static_cast<double>(n);
  std::vector<double> var(width, 0.0);
  for (const auto &x : data.features) {
    for (std::size_t j = 0; j < width; ++j) {
      const double d = FeatureAt(x, j) - mean_[j];
      var[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < width; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    scale_[j] = sd > 1e-12 ? sd : 1.0;
  }
  std::vector<std::vector<double>> z(n, std::vector<double>(width));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      z[i][j] = (FeatureAt(data.features[i], j) - mean_[j]) / scale_[j];
    }
  }
  std::vector<double> grad(width);
  for (int it = 0; it < options_.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = bias_;
      for (std::size_t j = 0; j < width; ++j) s += weights_[j] * z[i][j];
      const double err = Sigmoid(s) - data.labels[i];
      for (std::size_t j = 0; j < width; ++j) grad[j] += err * z[i][j];
      grad_b += err;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < width; ++j) {
      weights_[j] -= options_.learning_rate *
                     (grad[j] * inv_n + options_.l2 * weights_[j]);
    }
    bias_ -= options_.learning_rate * grad_b * inv_n;
  }
}

double LogisticRegression::Probability(std::span<const double> x) const {
  double s = bias_;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    s += weights_[j] * (FeatureAt(x, j) - mean_[j]) / scale_[j];
  }
  return Sigmoid(s);
}

std::string LogisticRegression::Serialize() const {
  return json{{"kind", "logistic"},
              {"mean", mean_},
              {"scale", scale_},
              {"weights", weights_},
              {"bias", bias_}}
      .dump();
}

std::unique_ptr<LogisticRegression> LogisticRegression::FromJson(
    std::string_view text) {
  const json j = ParseModelJson(text, "logistic");
  auto model = std::make_unique<LogisticRegression>();
  model->mean_ = j.at("mean").get<std::vector<double>>();
  model->scale_ = j.at("scale").get<std::vector<double>>();
  model->weights_ = j.at("weights").get<std::vector<double>>();
  model->bias_ = j.at("bias").get<double>();
  return model;
}

// ---------------------------------------------------------------------------
// NaiveBayes

void NaiveBayes::Fit(const Dataset &data) {
  CheckLabels(data);
  const std::size_t width = Width(data);
  for (int c = 0; c < 2; ++c) {
    class_count_[c] = 0;
    feature_count_[c].assign(width, 0);
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int c = data.labels[i];
    ++class_count_[c];
    for (std::size_t j = 0; j < width; ++j) {
      if (FeatureAt(data.features[i], j) > 0.5) ++feature_count_[c][j];
    }
  }
}

double NaiveBayes::ClassPrior(int cls) const {
  return Laplace(class_count_[cls], class_count_[0] + class_count_[1]);
}

double NaiveBayes::FeatureProbability(int cls, std::size_t j) const {
  const std::size_t k = j < feature_count_[cls].size() ? feature_count_[cls][j] : 0;
  return Laplace(k, class_count_[cls]);
}

double NaiveBayes::Probability(std::span<const double> x) const {
  double log_odds = std::log(ClassPrior(1)) - std::log(ClassPrior(0));
  const std::size_t width = feature_count_[0].size();
  for (std::size_t j = 0; j < width; ++j) {
    const bool on = FeatureAt(x, j) > 0.5;
    const double p1 = FeatureProbability(1, j);
    const double p0 = FeatureProbability(0, j);
    log_odds += on ? std::log(p1) - std::log(p0)
                   : std::log(1 - p1) - std::log(1 - p0);
  }
  return Sigmoid(log_odds);
}

std::string NaiveBayes::Serialize() const {
  return json{{"kind", "naive_bayes"},
              {"class_count", {class_count_[0], class_count_[1]}},
              {"feature_count", {feature_count_[0], feature_count_[1]}}}
      .dump();
}

std::unique_ptr<NaiveBayes> NaiveBayes::FromJson(std::string_view text) {
  const json j = ParseModelJson(text, "naive_bayes");
  auto model = std::make_unique<NaiveBayes>();
  for (int c = 0; c < 2; ++c) {
    model->class_count_[c] = j.at("class_count")[c].get<std::size_t>();
    model->feature_count_[c] =
        j.at("feature_count")[c].get<std::vector<std::size_t>>();
  }
  return model;
}

// ---------------------------------------------------------------------------

std::vector<int> StratifiedFolds(std::span<const int> labels, int folds,
                                 std::uint64_t seed) {
  if (folds < 2) throw ValidationError("cross validation needs >= 2 folds");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] ? pos : neg).push_back(i);
  }
  if (pos.size() < static_cast<std::size_t>(folds)) {
    throw ValidationError("cross validation needs at least " +
                          std::to_string(folds) + " positive examples, got " +
                          std::to_string(pos.size()));
  }
  std::mt19937_64 rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<int> assignment(labels.size(), 0);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    assignment[pos[i]] = static_cast<int>(i % folds);
  }
  // Continue the round robin so fold sizes stay balanced overall.
  for (std::size_t i = 0; i < neg.size(); ++i) {
    assignment[neg[i]] = static_cast<int>((pos.size() + i) % folds);
  }
  return assignment;
}

}  // namespace famrel
