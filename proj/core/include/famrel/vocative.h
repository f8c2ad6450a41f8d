#ifndef FAMREL_VOCATIVE_H_
#define FAMREL_VOCATIVE_H_

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "famrel/classifier.h"
#include "famrel/corpus.h"
#include "famrel/metrics.h"

namespace famrel {

// One target nominal inside an utterance. `token_index` counts the tokens
// between the quotation marks, punctuation included, from 0.
struct NominalOccurrence {
  UtteranceId utterance;
  std::string lemma;
  std::size_t token_index = 0;
  std::size_t offset = 0;  // byte offset of the nominal in the source text
};

// The tokens of an utterance without its quotation marks.
std::span<const Token> InnerTokens(const Document &doc, const Utterance &u);

std::vector<NominalOccurrence> SelectCandidates(
    const Document &doc, std::span<const Utterance *const> utterances,
    const Lexicons &lexicons);

// <P my dear(est) T P>: the nominal, optionally preceded by `my` and then
// `dear`/`dearest`, sits between two punctuation marks. The utterance
// boundaries count as the quotation marks that stand there.
bool DetectPattern(const Document &doc, const NominalOccurrence &occ);

enum VocativeFeature : std::size_t {
  kVocMyAlone,
  kVocDearAlone,
  kVocMyDear,
  kVocYouBefore,
  kVocYouAfter,
  kVocOhBefore,
  kVocYouAnywhere,
  kVocMyDearAnywhere,
  kVocCommaRight,
  kVocPeriodRight,
  kVocQuestionRight,
  kVocExclamationRight,
  kVocPunctRight,
  kVocSurroundedByCommas,
  kVocSurroundedByPunct,
  kVocAtStart,
  kVocAtEnd,
  kVocRepeated,
  kVocativeFeatureCount,
};

std::string_view VocativeFeatureName(std::size_t feature);

std::vector<double> ExtractVocativeFeatures(const Document &doc,
                                            const NominalOccurrence &occ);

struct VocativeLabel {
  UtteranceId utterance;
  std::size_t token_index = 0;
  bool label = false;
  auto operator<=>(const VocativeLabel &) const = default;
};

using VocativeLabelMap = std::map<std::pair<UtteranceId, std::size_t>, bool>;

// JSON array of {utterance_id, token_index, label}.
VocativeLabelMap ParseVocativeLabels(std::string_view json);
std::string VocativeLabelsToJson(const VocativeLabelMap &labels);

struct VocativeDetections {
  std::vector<NominalOccurrence> occurrences;
  std::vector<bool> positive;  // parallel to occurrences

  // An utterance is vocative when any of its occurrences is positive.
  std::set<UtteranceId> VocativeUtterances() const;
  // Positive occurrences, one per (utterance, lemma).
  std::vector<NominalOccurrence> Vocatives() const;
};

VocativeDetections DetectAllPattern(const Document &doc,
                                    std::vector<NominalOccurrence> occurrences);

// Utterances with at least one gold-positive occurrence.
std::set<UtteranceId> GoldVocativeUtterances(const VocativeLabelMap &labels);

PrecisionRecall ScoreVocatives(const std::set<UtteranceId> &predicted,
                               const std::set<UtteranceId> &gold);

struct SupervisedVocativeResult {
  VocativeDetections detections;
  PrecisionRecall metrics;
};

// Out-of-fold naive Bayes predictions. Occurrences missing from `labels`
// count as negatives. Throws ValidationError when there are fewer positive
// labels than folds.
SupervisedVocativeResult DetectSupervised(
    const Document &doc, std::vector<NominalOccurrence> occurrences,
    const VocativeLabelMap &labels, int folds = 10, std::uint64_t seed = 17,
    ClassifierKind kind = ClassifierKind::kNaiveBayes);

// Cross-validation over precomputed feature vectors, for callers that build
// occurrences without a document. Returns one prediction per row.
std::vector<bool> CrossValidatePredictions(const Dataset &data, int folds,
                                           std::uint64_t seed,
                                           ClassifierKind kind);

}  // namespace famrel

#endif  // FAMREL_VOCATIVE_H_
