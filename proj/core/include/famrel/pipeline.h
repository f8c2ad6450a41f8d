#ifndef FAMREL_PIPELINE_H_
#define FAMREL_PIPELINE_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "famrel/attribution.h"
#include "famrel/corpus.h"
#include "famrel/extraction.h"
#include "famrel/kinship.h"
#include "famrel/metrics.h"
#include "famrel/rules.h"
#include "famrel/vocative.h"

namespace famrel {

struct EvaluationReport {
  std::string label;
  PrecisionRecall metrics;
  std::vector<RelationTriple> correct;  // canonical orientation
  std::vector<RelationTriple> wrong;
  std::vector<RelationTriple> missed;
};

// Orients a triple so that a1 < a2, inverting the relation when needed.
RelationTriple CanonicalTriple(const RelationTriple &t, const CharacterRegistry &registry);

// A prediction is correct when gold holds the same relation for the same
// pair in either orientation; an ungendered gold relation accepts any member
// of its group. Facts and their inverses count once on both sides, and
// non-family relations are ignored.
EvaluationReport EvaluateRelations(std::span<const RelationTriple> predicted,
                                   std::span<const RelationTriple> gold,
                                   const CharacterRegistry &registry,
                                   std::string label = {});
EvaluationReport EvaluateGraph(const KinshipGraph &graph,
                               std::span<const RelationTriple> gold,
                               const CharacterRegistry &registry,
                               std::string label = {});

// "label: P=0.77 R=0.27 F=0.40 (tp=.. fp=.. fn=..)"
std::string FormatReport(const EvaluationReport &report);
std::string ReportToJson(const EvaluationReport &report);

enum class Arm { kExtracted, kCleaned, kOracle, kCleanedOracle };
std::string_view ArmName(Arm arm);
Arm ParseArm(std::string_view s);  // accepts "cleaned-oracle" and "cleaned_oracle"
bool IsOracleArm(Arm arm);
bool IsCleanedArm(Arm arm);

enum class VocativeDetector { kPattern, kSupervised };
std::string_view VocativeDetectorName(VocativeDetector d);
VocativeDetector ParseVocativeDetector(std::string_view s);

struct PipelineConfig {
  AttributionConfig attribution;
  VocativeDetector detector = VocativeDetector::kPattern;
  std::optional<VocativeLabelMap> vocative_labels;  // required by supervised
  RuleSet rules;
  std::optional<CleaningList> cleaning;  // required by cleaned arms
  // Adds (Mrs. X, wife_of, Mr. X) facts inferred from titles before
  // propagation.
  bool infer_titles = true;
  // Used instead of cross-validated training when present.
  const AttributionModel *model = nullptr;
};

struct ArmResult {
  Arm arm = Arm::kExtracted;
  std::optional<AttributionResult> attribution;  // empty for oracle arms
  SpeakerMap speakers;
  VocativeDetections vocatives;
  ExtractionResult extraction;
  std::vector<SeedRelation> seeds;  // after cleaning
  PropagationResult propagation;
  EvaluationReport seed_report;
  EvaluationReport propagated_report;
  std::vector<std::string> diagnostics;
};

// Speakers predicted by cross-validated attribution. Folds shrink to the
// number of positive training pairs when there are fewer; with under two,
// only heuristic categories are attributed. Reasons go to `diagnostics`.
AttributionResult PredictSpeakers(const Corpus &corpus, const AttributionConfig &config,
                                  const AttributionModel *model,
                                  std::vector<std::string> &diagnostics);

VocativeDetections DetectVocatives(const Corpus &corpus, VocativeDetector detector,
                                   const VocativeLabelMap *labels, int folds = 10,
                                   std::uint64_t seed = 17);

ArmResult RunArm(const Corpus &corpus, const PipelineConfig &config, Arm arm);

enum class GraphFormat { kDot, kJson };
GraphFormat ParseGraphFormat(std::string_view s);

// One edge per unordered pair. With `gold`, facts absent from it are dashed
// (DOT) or flagged "correct": false (JSON).
std::string ExportGraph(const KinshipGraph &graph, const CharacterRegistry &registry,
                        GraphFormat format,
                        std::optional<std::span<const RelationTriple>> gold = {});

// Reads the JSON produced by ExportGraph back into facts (one orientation).
std::vector<KinshipFact> ParseGraphJson(std::string_view json);

// Attribution interchange: [{utterance_id, character_id, category}].
std::string AttributionsToJson(const AttributionResult &result);
SpeakerMap ParseAttributionsJson(std::string_view json);

// Paragraph, utterance and mention structure plus statistics and
// diagnostics, for inspection.
std::string DocumentToJson(const Document &doc);

std::string DetectionsToJson(const VocativeDetections &detections);
VocativeDetections ParseDetectionsJson(std::string_view json);

}  // namespace famrel

#endif  // FAMREL_PIPELINE_H_
