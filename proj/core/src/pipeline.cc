#include "famrel/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <set>

#include "famrel/error.h"
#include "famrel/relation.h"
#include "json.hpp"

namespace famrel {
namespace {

using json = nlohmann::json;

json ParseJson(std::string_view text, const std::string &what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw ValidationError(what + ": " + e.what());
  }
}

bool IsFamily(const std::string &relation) {
  const RelationInfo *info = FindRelation(relation);
  if (!info) throw ValidationError("unknown relation '" + relation + "'");
  return info->family;
}

std::set<RelationTriple> CanonicalFamilySet(std::span<const RelationTriple> triples,
                                            const CharacterRegistry &registry) {
  std::set<RelationTriple> out;
  for (const auto &t : triples) {
    if (IsFamily(t.relation)) out.insert(CanonicalTriple(t, registry));
  }
  return out;
}

bool Matches(const RelationTriple &gold, const RelationTriple &predicted) {
  return gold.a1 == predicted.a1 && gold.a2 == predicted.a2 &&
         (gold.relation == predicted.relation ||
          RelationMatches(gold.relation, predicted.relation));
}

// Gold triples of each canonical pair.
class GoldIndex {
 public:
  GoldIndex(std::span<const RelationTriple> gold, const CharacterRegistry &registry)
      : triples_(CanonicalFamilySet(gold, registry)) {}

  const std::set<RelationTriple> &triples() const { return triples_; }

  std::optional<RelationTriple> Match(const RelationTriple &canonical) const {
    auto it = triples_.lower_bound({canonical.a1, "", ""});
    for (; it != triples_.end() && it->a1 == canonical.a1; ++it) {
      if (Matches(*it, canonical)) return *it;
    }
    return std::nullopt;
  }

 private:
  std::set<RelationTriple> triples_;
};

std::string Fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string DotQuote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

RelationTriple CanonicalTriple(const RelationTriple &t,
                               const CharacterRegistry &registry) {
  if (t.a1 <= t.a2) return t;
  return {t.a2, InverseRelation(t.relation, registry.GenderOf(t.a2)), t.a1};
}

EvaluationReport EvaluateRelations(std::span<const RelationTriple> predicted,
                                   std::span<const RelationTriple> gold,
                                   const CharacterRegistry &registry,
                                   std::string label) {
  EvaluationReport report;
  report.label = std::move(label);
  const GoldIndex index(gold, registry);
  std::set<RelationTriple> matched;
  for (const auto &p : CanonicalFamilySet(predicted, registry)) {
    if (const auto g = index.Match(p)) {
      report.correct.push_back(p);
      matched.insert(*g);
    } else {
      report.wrong.push_back(p);
    }
  }
  for (const auto &g : index.triples()) {
    if (!matched.contains(g)) report.missed.push_back(g);
  }
  report.metrics = FromCounts(report.correct.size(), report.wrong.size(),
                              report.missed.size());
  // Recall counts gold relations found, which can differ from the number of
  // correct predictions when an ungendered gold entry is hit twice.
  const std::size_t gold_size = index.triples().size();
  report.metrics.recall =
      gold_size == 0 ? 0.0 : static_cast<double>(matched.size()) / gold_size;
  report.metrics.f = FMeasure(report.metrics.precision, report.metrics.recall);
  return report;
}

EvaluationReport EvaluateGraph(const KinshipGraph &graph,
                               std::span<const RelationTriple> gold,
                               const CharacterRegistry &registry, std::string label) {
  std::vector<RelationTriple> predicted;
  for (const auto &f : graph.UndirectedFacts()) predicted.push_back(f.triple());
  return EvaluateRelations(predicted, gold, registry, std::move(label));
}

std::string FormatReport(const EvaluationReport &r) {
  const auto &m = r.metrics;
  std::string out = r.label.empty() ? std::string() : r.label + ": ";
  out += "P=" + Fixed2(m.precision) + " R=" + Fixed2(m.recall) + " F=" + Fixed2(m.f);
  out += " (tp=" + std::to_string(m.true_positives) +
         " fp=" + std::to_string(m.false_positives) +
         " fn=" + std::to_string(m.false_negatives) + ")";
  return out;
}

std::string ReportToJson(const EvaluationReport &r) {
  auto triples = [](const std::vector<RelationTriple> &v) {
    json a = json::array();
    for (const auto &t : v) a.push_back({{"from", t.a1}, {"type", t.relation}, {"to", t.a2}});
    return a;
  };
  json j = {{"label", r.label},
            {"precision", r.metrics.precision},
            {"recall", r.metrics.recall},
            {"f1", r.metrics.f},
            {"true_positives", r.metrics.true_positives},
            {"false_positives", r.metrics.false_positives},
            {"false_negatives", r.metrics.false_negatives},
            {"correct", triples(r.correct)},
            {"wrong", triples(r.wrong)},
            {"missed", triples(r.missed)}};
  return j.dump(2);
}

std::string_view ArmName(Arm arm) {
  switch (arm) {
    case Arm::kExtracted: return "extracted";
    case Arm::kCleaned: return "cleaned";
    case Arm::kOracle: return "oracle";
    case Arm::kCleanedOracle: return "cleaned-oracle";
  }
  return "extracted";
}

Arm ParseArm(std::string_view s) {
  if (s == "cleaned_oracle") return Arm::kCleanedOracle;
  for (Arm a : {Arm::kExtracted, Arm::kCleaned, Arm::kOracle, Arm::kCleanedOracle}) {
    if (ArmName(a) == s) return a;
  }
  throw ValidationError("unknown arm '" + std::string(s) + "'");
}

bool IsOracleArm(Arm arm) { return arm == Arm::kOracle || arm == Arm::kCleanedOracle; }
bool IsCleanedArm(Arm arm) { return arm == Arm::kCleaned || arm == Arm::kCleanedOracle; }

std::string_view VocativeDetectorName(VocativeDetector d) {
  return d == VocativeDetector::kPattern ? "pattern" : "supervised";
}

VocativeDetector ParseVocativeDetector(std::string_view s) {
  if (s == "pattern") return VocativeDetector::kPattern;
  if (s == "supervised") return VocativeDetector::kSupervised;
  throw ValidationError("unknown detector '" + std::string(s) + "'");
}

AttributionResult PredictSpeakers(const Corpus &corpus, const AttributionConfig &config,
                                  const AttributionModel *model,
                                  std::vector<std::string> &diagnostics) {
  const AttributionContext ctx(corpus.document, corpus.lexicons, corpus.gold.characters);
  if (model) return AttributeWithModel(ctx, &corpus.gold, config, *model);

  const auto pairs = BuildTrainingPairs(ctx, corpus.gold, config.window);
  const auto positives = std::count_if(pairs.begin(), pairs.end(),
                                       [](const LabeledPair &p) { return p.label == 1; });
  AttributionConfig cfg = config;
  if (positives < 2) {
    diagnostics.push_back("attribution: " + std::to_string(positives) +
                          " positive training pairs; classifier categories abstain");
    return AttributeAll(ctx, &corpus.gold, cfg,
                        [](const Utterance &, std::size_t, std::span<const double>) {
                          return CandidateScore{};
                        });
  }
  if (positives < cfg.folds) {
    diagnostics.push_back("attribution: reduced cross-validation from " +
                          std::to_string(cfg.folds) + " to " +
                          std::to_string(positives) + " folds");
    cfg.folds = static_cast<int>(positives);
  }
  TrainingReport report;
  AttributionResult result = AttributeCrossValidated(ctx, corpus.gold, cfg, &report);
  for (auto &w : report.warnings) diagnostics.push_back("attribution: " + w);
  return result;
}

VocativeDetections DetectVocatives(const Corpus &corpus, VocativeDetector detector,
                                   const VocativeLabelMap *labels, int folds,
                                   std::uint64_t seed) {
  const auto utterances = corpus.document.SpeakerUtterances();
  auto occurrences = SelectCandidates(corpus.document, utterances, corpus.lexicons);
  if (detector == VocativeDetector::kPattern) {
    return DetectAllPattern(corpus.document, std::move(occurrences));
  }
  if (!labels) {
    throw ValidationError("the supervised vocative detector needs gold vocative labels");
  }
  return DetectSupervised(corpus.document, std::move(occurrences), *labels, folds, seed)
      .detections;
}

ArmResult RunArm(const Corpus &corpus, const PipelineConfig &config, Arm arm) {
  ArmResult r;
  r.arm = arm;
  const CharacterRegistry &registry = corpus.gold.characters;
  const std::string name(ArmName(arm));

  if (IsOracleArm(arm)) {
    if (corpus.gold.attributions.empty()) {
      throw ValidationError("arm '" + name + "' needs gold attributions");
    }
    r.speakers = corpus.gold.attributions;
  } else {
    r.attribution = PredictSpeakers(corpus, config.attribution, config.model, r.diagnostics);
    r.speakers = r.attribution->Speakers();
  }

  r.vocatives = DetectVocatives(
      corpus, config.detector,
      config.vocative_labels ? &*config.vocative_labels : nullptr,
      config.attribution.folds, config.attribution.seed);
  r.extraction = ExtractSeeds(corpus.document, r.speakers, r.vocatives.Vocatives(),
                              corpus.lexicons, registry);
  for (const auto &d : r.extraction.diagnostics) r.diagnostics.push_back(d);

  if (IsCleanedArm(arm)) {
    if (!config.cleaning) {
      throw ValidationError("arm '" + name + "' needs a cleaning file");
    }
    r.seeds = ApplyCleaning(r.extraction.seeds, *config.cleaning);
  } else {
    r.seeds = r.extraction.seeds;
  }

  std::vector<SeedFact> facts = ToFacts(r.seeds);
  if (config.infer_titles) {
    for (auto &f : InferSpousesFromTitles(registry)) facts.push_back(std::move(f));
  }
  r.propagation = Propagate(facts, config.rules, registry);
  for (const auto &d : r.propagation.diagnostics) r.diagnostics.push_back(d);

  std::vector<RelationTriple> seed_triples;
  for (const auto &s : r.seeds) seed_triples.push_back(s.triple());
  r.seed_report =
      EvaluateRelations(seed_triples, corpus.gold.relations, registry, name + " seeds");
  r.propagated_report = EvaluateGraph(r.propagation.graph, corpus.gold.relations,
                                      registry, name + " propagated");
  return r;
}

GraphFormat ParseGraphFormat(std::string_view s) {
  if (s == "dot") return GraphFormat::kDot;
  if (s == "json") return GraphFormat::kJson;
  throw ValidationError("unknown graph format '" + std::string(s) + "'");
}

std::string ExportGraph(const KinshipGraph &graph, const CharacterRegistry &registry,
                        GraphFormat format,
                        std::optional<std::span<const RelationTriple>> gold) {
  const auto facts = graph.UndirectedFacts();
  std::optional<GoldIndex> index;
  if (gold) index.emplace(*gold, registry);
  auto correct = [&](const KinshipFact &f) -> std::optional<bool> {
    if (!index) return std::nullopt;
    if (!IsFamily(f.relation)) return true;
    return index->Match(CanonicalTriple(f.triple(), registry)).has_value();
  };
  std::set<CharacterId> nodes;
  for (const auto &f : facts) {
    nodes.insert(f.a1);
    nodes.insert(f.a2);
  }
  auto name_of = [&](const CharacterId &id) {
    const Character *c = registry.Find(id);
    return c ? c->name : id;
  };

  if (format == GraphFormat::kDot) {
    std::string out = "digraph famrel {\n";
    for (const auto &id : nodes) {
      out += "  " + DotQuote(id) + " [label=" + DotQuote(name_of(id)) + "];\n";
    }
    for (const auto &f : facts) {
      out += "  " + DotQuote(f.a1) + " -> " + DotQuote(f.a2) +
             " [label=" + DotQuote(f.relation);
      if (const auto ok = correct(f); ok && !*ok) out += ", style=dashed";
      out += "];\n";
    }
    return out + "}\n";
  }

  json j;
  j["nodes"] = json::array();
  for (const auto &id : nodes) {
    const Character *c = registry.Find(id);
    j["nodes"].push_back({{"id", id},
                          {"name", name_of(id)},
                          {"gender", GenderName(c ? c->gender : Gender::kUnknown)}});
  }
  j["edges"] = json::array();
  for (const auto &f : facts) {
    json e = {{"a1", f.a1},
              {"relation", f.relation},
              {"a2", f.a2},
              {"count", f.count},
              {"provenance", ProvenanceName(f.provenance)}};
    if (f.derivation) e["rule"] = f.derivation->rule_id;
    if (const auto ok = correct(f)) e["correct"] = *ok;
    j["edges"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

std::vector<KinshipFact> ParseGraphJson(std::string_view text) {
  const json j = ParseJson(text, "graph");
  if (!j.is_object() || !j.contains("edges") || !j["edges"].is_array()) {
    throw ValidationError("graph: expected an object with an 'edges' array");
  }
  std::vector<KinshipFact> out;
  try {
    for (const auto &e : j["edges"]) {
      KinshipFact f;
      f.a1 = e.at("a1").get<std::string>();
      f.relation = e.at("relation").get<std::string>();
      f.a2 = e.at("a2").get<std::string>();
      f.count = e.value("count", 1);
      f.provenance = e.value("provenance", std::string("seed")) == "propagated"
                         ? Provenance::kPropagated
                         : Provenance::kSeed;
      if (e.contains("rule")) f.derivation = Derivation{e["rule"].get<std::string>(), {}};
      out.push_back(std::move(f));
    }
  } catch (const json::exception &ex) {
    throw ValidationError(std::string("graph: ") + ex.what());
  }
  return out;
}

std::string AttributionsToJson(const AttributionResult &result) {
  json j = json::array();
  for (const auto &[id, a] : result.utterances) {
    json e = {{"utterance_id", id.ToString()},
              {"category", CategoryName(a.category)}};
    e["character_id"] = a.speaker ? json(*a.speaker) : json(nullptr);
    j.push_back(std::move(e));
  }
  return j.dump(2);
}

SpeakerMap ParseAttributionsJson(std::string_view text) {
  json j = ParseJson(text, "attributions");
  // Accept either a bare array or a full annotation document.
  if (j.is_object() && j.contains("attributions")) j = j["attributions"];
  if (!j.is_array()) throw ValidationError("attributions: expected a JSON array");
  SpeakerMap out;
  try {
    for (const auto &e : j) {
      const auto &c = e.at("character_id");
      if (c.is_null()) continue;
      out[UtteranceId::Parse(e.at("utterance_id").get<std::string>())] =
          c.get<std::string>();
    }
  } catch (const json::exception &ex) {
    throw ValidationError(std::string("attributions: ") + ex.what());
  }
  return out;
}

std::string DocumentToJson(const Document &doc) {
  json paragraphs = json::array();
  for (const Paragraph &p : doc.paragraphs) {
    json utterances = json::array();
    for (const Utterance &u : p.utterances) {
      utterances.push_back({{"id", u.id.ToString()},
                            {"text", u.text},
                            {"speaker_utterance", u.is_speaker_utterance},
                            {"closed", u.closed},
                            {"continues", u.continues}});
    }
    json mentions = json::array();
    for (const CharacterMention &m : p.mentions) {
      json e = {{"kind", MentionKindName(m.kind)},
                {"surface", m.surface},
                {"offset", m.span.begin},
                {"in_quote", m.in_quote}};
      e["character_id"] = m.resolved ? json(*m.resolved) : json(nullptr);
      mentions.push_back(std::move(e));
    }
    paragraphs.push_back({{"index", p.index},
                          {"begin", p.span.begin},
                          {"end", p.span.end},
                          {"utterances", std::move(utterances)},
                          {"mentions", std::move(mentions)}});
  }
  const CorpusStats s = ComputeStats(doc);
  json diagnostics = json::array();
  for (const Diagnostic &d : doc.diagnostics) {
    diagnostics.push_back({{"paragraph", d.paragraph}, {"message", d.message}});
  }
  json j = {{"source", doc.source_name},
            {"stats",
             {{"paragraphs", s.paragraphs},
              {"utterances", s.utterances},
              {"speaker_utterances", s.speaker_utterances},
              {"named_mentions", s.named_mentions},
              {"nominal_mentions", s.nominal_mentions},
              {"pronoun_mentions", s.pronoun_mentions},
              {"diagnostics", s.diagnostics}}},
            {"paragraphs", std::move(paragraphs)},
            {"diagnostics", std::move(diagnostics)}};
  return j.dump(2);
}

std::string DetectionsToJson(const VocativeDetections &d) {
  json j = json::array();
  for (std::size_t i = 0; i < d.occurrences.size(); ++i) {
    const auto &o = d.occurrences[i];
    j.push_back({{"utterance_id", o.utterance.ToString()},
                 {"token_index", o.token_index},
                 {"lemma", o.lemma},
                 {"offset", o.offset},
                 {"vocative", static_cast<bool>(d.positive[i])}});
  }
  return j.dump(2);
}

VocativeDetections ParseDetectionsJson(std::string_view text) {
  const json j = ParseJson(text, "vocatives");
  if (!j.is_array()) throw ValidationError("vocatives: expected a JSON array");
  VocativeDetections d;
  try {
    for (const auto &e : j) {
      d.occurrences.push_back({UtteranceId::Parse(e.at("utterance_id").get<std::string>()),
                               e.at("lemma").get<std::string>(),
                               e.at("token_index").get<std::size_t>(),
                               e.value("offset", std::size_t{0})});
      d.positive.push_back(e.at("vocative").get<bool>());
    }
  } catch (const json::exception &ex) {
    throw ValidationError(std::string("vocatives: ") + ex.what());
  }
  return d;
}

}  // namespace famrel
