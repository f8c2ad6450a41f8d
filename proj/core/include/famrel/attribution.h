#ifndef FAMREL_ATTRIBUTION_H_
#define FAMREL_ATTRIBUTION_H_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "famrel/classifier.h"
#include "famrel/corpus.h"

namespace famrel {

enum class UtteranceCategory {
  kCharacterTrigram,
  kAddedQuote,
  kQuoteAlone,
  kApparentConversation,
  kAnaphora,
  kBackoff,
};

std::string_view CategoryName(UtteranceCategory c);
inline constexpr std::array<UtteranceCategory, 6> kAllCategories = {
    UtteranceCategory::kCharacterTrigram, UtteranceCategory::kAddedQuote,
    UtteranceCategory::kQuoteAlone, UtteranceCategory::kApparentConversation,
    UtteranceCategory::kAnaphora, UtteranceCategory::kBackoff};

// Categories attributed by classifiers rather than by context rules.
bool IsSupervisedCategory(UtteranceCategory c);

enum class Side { kBefore, kAfter };

struct MentionRef {
  int paragraph = 0;
  std::size_t index = 0;  // into Paragraph::mentions

  auto operator<=>(const MentionRef &) const = default;
};

struct CandidateSpeaker {
  MentionRef mention;
  MentionKind kind = MentionKind::kNamed;
  std::size_t distance = 0;  // words between candidate and utterance
  Side side = Side::kBefore;
  std::optional<CharacterId> character;  // resolved identity, if any
};

// Attribution feature vector layout.
enum AttributionFeature : std::size_t {
  kFeatAppearanceCount,
  kFeatUtteranceLength,
  kFeatDistance,
  kFeatSideAfter,
  kFeatAdjacent,
  kFeatVerbBetween,
  kFeatVerbNextToCandidate,
  kFeatEndsWithComma,
  kFeatEndsWithTerminal,
  kFeatIntroducedByPunct,
  kFeatNamed,
  kFeatNominal,
  kFeatPronoun,
  kFeatSameParagraph,
  kFeatParagraphOffset,
  kFeatMentionsBetween,
  kFeatUtteranceFirstInParagraph,
  kFeatParagraphStartsWithQuote,
  kAttributionFeatureCount,
};

std::string_view AttributionFeatureName(std::size_t feature);

enum class Ranking { kLabel, kProbability, kHybrid, kCombined };
enum class Combiner { kMax, kMean, kMedian, kProduct };
enum class ChainSource { kGold, kPredicted };

std::string_view RankingName(Ranking r);
std::string_view CombinerName(Combiner c);
std::string_view ChainSourceName(ChainSource c);
Ranking ParseRanking(std::string_view s);
Combiner ParseCombiner(std::string_view s);
ChainSource ParseChainSource(std::string_view s);

struct AttributionConfig {
  Ranking ranking = Ranking::kHybrid;
  double threshold = 0.5;
  Combiner combiner = Combiner::kMean;
  ChainSource chain_source = ChainSource::kGold;
  // Classifier consulted by the label, probability and hybrid rankings.
  ClassifierKind classifier = ClassifierKind::kLogistic;
  int window = 2;  // paragraphs on each side searched for candidates
  int folds = 10;
  std::uint64_t seed = 17;
};

// The ensemble's verdict on one candidate, in ensemble order
// (tree, rules, logistic), plus the tie-break keys.
struct CandidateScore {
  std::vector<bool> labels;
  std::vector<double> probabilities;
  std::size_t distance = 0;
  Side side = Side::kBefore;
};

inline constexpr std::array<ClassifierKind, 3> kEnsembleKinds = {
    ClassifierKind::kDecisionTree, ClassifierKind::kRuleList,
    ClassifierKind::kLogistic};

// Picks one candidate or abstains. Label ranking accepts a unique positive;
// probability ranking takes the argmax when it reaches the threshold; hybrid
// tries label first; combined aggregates the ensemble's probabilities.
// Probability ties go to the closer candidate, then to the one after the
// utterance.
std::optional<std::size_t> RankCandidates(std::span<const CandidateScore> scores,
                                          const AttributionConfig &config);

double CombineProbabilities(std::span<const double> probs, Combiner combiner);

class AttributionModel {
 public:
  static constexpr int kFormatVersion = 1;

  AttributionModel();
  AttributionModel(AttributionModel &&) noexcept = default;
  AttributionModel &operator=(AttributionModel &&) noexcept = default;

  void Fit(const Dataset &data);
  CandidateScore Score(std::span<const double> features) const;

  std::string Serialize() const;
  static AttributionModel Deserialize(std::string_view text);

 private:
  std::vector<std::unique_ptr<BinaryClassifier>> members_;
};

// Read-only view of a parsed document with the lookups attribution needs.
class AttributionContext {
 public:
  AttributionContext(const Document &doc, const Lexicons &lexicons,
                     const CharacterRegistry &registry);

  const Document &document() const { return doc_; }
  const CharacterRegistry &registry() const { return registry_; }

  UtteranceCategory Categorize(const Utterance &u) const;

  // Mention forming a speech tag with an adjacent expression verb.
  std::optional<MentionRef> SpeechTagMention(const Utterance &u,
                                             bool pronouns) const;

  // `chain` returns the speaker already known for an earlier utterance.
  std::optional<CharacterId> AttributeHeuristic(
      const Utterance &u, UtteranceCategory category,
      const std::function<std::optional<CharacterId>(const UtteranceId &)>
          &chain) const;

  std::vector<CandidateSpeaker> GatherCandidates(const Utterance &u,
                                                 UtteranceCategory category,
                                                 int window) const;

  std::vector<double> ExtractFeatures(const Utterance &u,
                                      const CandidateSpeaker &c) const;

  int AppearanceCount(const CharacterId &id) const;
  const CharacterMention &mention(const MentionRef &ref) const {
    return doc_.paragraphs[ref.paragraph].mentions[ref.index];
  }
  // Named mentions resolve by alias; pronouns to the nearest preceding named
  // mention of compatible gender.
  std::optional<CharacterId> ResolveMention(const MentionRef &ref) const;

 private:
  int MentionAtToken(int paragraph, std::size_t token) const;

  const Document &doc_;
  const Lexicons &lexicons_;
  const CharacterRegistry &registry_;
  std::map<CharacterId, int> appearances_;
  std::vector<std::vector<int>> mention_at_token_;
};

struct LabeledPair {
  UtteranceId utterance;
  std::size_t candidate = 0;
  std::vector<double> features;
  int label = 0;
};

// One example per candidate of every gold-labelled utterance in a supervised
// category; positive when the candidate resolves to the gold speaker.
std::vector<LabeledPair> BuildTrainingPairs(const AttributionContext &ctx,
                                            const GoldAnnotations &gold,
                                            int window);

struct TrainingReport {
  std::vector<std::string> warnings;
  // Per fold, label accuracy of each ensemble member on the held-out pairs.
  std::vector<std::array<double, 3>> fold_accuracy;
};

AttributionModel TrainModel(std::span<const LabeledPair> pairs,
                            TrainingReport *report = nullptr);

struct CrossValidatedModels {
  std::vector<AttributionModel> models;  // models[f] never saw fold f
  std::vector<int> fold_of_pair;
  TrainingReport report;
};

// Stratified k-fold training. Throws ValidationError with fewer positive
// pairs than folds.
CrossValidatedModels TrainCrossValidated(std::span<const LabeledPair> pairs,
                                         int folds, std::uint64_t seed);

struct UtteranceAttribution {
  UtteranceCategory category = UtteranceCategory::kBackoff;
  std::optional<CharacterId> speaker;
};

struct CategoryTally {
  int total = 0;
  int attributed = 0;
  int gold_labelled = 0;
  int correct = 0;
};

struct AttributionResult {
  std::map<UtteranceId, UtteranceAttribution> utterances;
  std::map<UtteranceCategory, CategoryTally> tallies;
  int gold_labelled = 0;
  int correct = 0;  // abstentions on gold-labelled utterances count as errors

  double accuracy() const {
    return gold_labelled == 0 ? 0.0
                              : static_cast<double>(correct) / gold_labelled;
  }
  std::map<UtteranceId, CharacterId> Speakers() const;
};

using CandidateScorer = std::function<CandidateScore(
    const Utterance &, std::size_t candidate, std::span<const double>)>;

// Processes every speaker utterance in document order. `gold` may be null;
// it feeds gold chains and the accuracy tallies.
AttributionResult AttributeAll(const AttributionContext &ctx,
                               const GoldAnnotations *gold,
                               const AttributionConfig &config,
                               const CandidateScorer &scorer);

AttributionResult AttributeWithModel(const AttributionContext &ctx,
                                     const GoldAnnotations *gold,
                                     const AttributionConfig &config,
                                     const AttributionModel &model);

// Trains on the document's own gold labels with k-fold cross validation and
// scores each candidate with the model that did not see it.
AttributionResult AttributeCrossValidated(const AttributionContext &ctx,
                                          const GoldAnnotations &gold,
                                          const AttributionConfig &config,
                                          TrainingReport *report = nullptr);

}  // namespace famrel

#endif  // FAMREL_ATTRIBUTION_H_
