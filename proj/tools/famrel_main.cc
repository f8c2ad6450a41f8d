// famrel: command-line driver for the family-relation extraction pipeline.
//
// Exit status: 0 on success, 1 on invalid input or arguments, 2 on I/O
// failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "famrel/attribution.h"
#include "famrel/corpus.h"
#include "famrel/error.h"
#include "famrel/extraction.h"
#include "famrel/kinship.h"
#include "famrel/pipeline.h"
#include "famrel/rules.h"
#include "famrel/vocative.h"

#ifndef FAMREL_DEFAULT_DATA_DIR
#define FAMREL_DEFAULT_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace famrel;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct CorpusArgs {
  std::string narrative;
  std::string annotations;
  std::string lexicon_dir = std::string(FAMREL_DEFAULT_DATA_DIR) + "/lexicons";
  std::string quotes = "straight";
};

struct AttributionArgs {
  std::string ranking = "hybrid";
  double threshold = 0.5;
  std::string combiner = "mean";
  std::string chain_source = "gold";
  std::string classifier = "logistic";
  int folds = 10;
  std::string model;
};

struct GraphArgs {
  std::string rules = std::string(FAMREL_DEFAULT_DATA_DIR) + "/rules/default.rules";
  std::string format = "dot";
};

void AddCorpusOptions(CLI::App *app, CorpusArgs &a, bool narrative_required = true) {
  auto *n = app->add_option("--narrative", a.narrative, "narrative text file");
  if (narrative_required) n->required();
  app->add_option("--annotations", a.annotations, "annotation JSON")->required();
  app->add_option("--lexicon-dir", a.lexicon_dir, "directory holding the lexicon files");
  app->add_option("--quotes", a.quotes, "quotation style")
      ->check(CLI::IsMember({"straight", "typographic"}));
}

void AddAttributionOptions(CLI::App *app, AttributionArgs &a) {
  app->add_option("--ranking", a.ranking, "candidate ranking")
      ->check(CLI::IsMember({"label", "probability", "hybrid", "combined"}));
  app->add_option("--threshold", a.threshold, "probability cutoff")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--combiner", a.combiner, "ensemble combiner for combined ranking")
      ->check(CLI::IsMember({"max", "mean", "median", "product"}));
  app->add_option("--chain-source", a.chain_source, "speaker source for chained categories")
      ->check(CLI::IsMember({"gold", "predicted"}));
  app->add_option("--classifier", a.classifier, "classifier used by label/probability ranking")
      ->check(CLI::IsMember({"tree", "rules", "logistic"}));
  app->add_option("--folds", a.folds, "cross-validation folds")->check(CLI::Range(2, 100));
  app->add_option("--model", a.model, "trained attribution model (skips cross validation)");
}

void AddGraphOptions(CLI::App *app, GraphArgs &g) {
  app->add_option("--rules", g.rules, "propagation rule file");
  app->add_option("--format", g.format, "graph output format")
      ->check(CLI::IsMember({"dot", "json"}));
}

Corpus Load(const CorpusArgs &a) {
  ParseOptions options;
  options.quotes = a.quotes == "typographic" ? QuoteStyle::kTypographic : QuoteStyle::kStraight;
  return LoadCorpus(a.narrative, a.annotations, a.lexicon_dir, options);
}

GoldAnnotations LoadGold(const std::string &path) { return ParseAnnotations(ReadFile(path)); }

AttributionConfig ToConfig(const AttributionArgs &a) {
  AttributionConfig c;
  c.ranking = ParseRanking(a.ranking);
  c.threshold = a.threshold;
  c.combiner = ParseCombiner(a.combiner);
  c.chain_source = ParseChainSource(a.chain_source);
  c.classifier = ParseClassifierKind(a.classifier);
  c.folds = a.folds;
  return c;
}

void Emit(const std::string &out, const std::string &content) {
  if (out.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
  } else {
    WriteFile(out, content);
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Extract family relations from narrative fiction"};
  app.require_subcommand(1);

  CorpusArgs corpus_args;
  AttributionArgs attr_args;
  GraphArgs graph_args;
  std::string out;

  auto *parse = app.add_subcommand("parse", "parse a narrative and print its structure");
  AddCorpusOptions(parse, corpus_args);
  parse->add_option("--out", out, "output file (default stdout)");

  std::string save_model;
  auto *attribute = app.add_subcommand("attribute", "attribute utterances to speakers");
  AddCorpusOptions(attribute, corpus_args);
  AddAttributionOptions(attribute, attr_args);
  attribute->add_option("--out", out, "attributions JSON output");
  attribute->add_option("--save-model", save_model,
                        "train on all gold labels and write the model here");

  std::string detector = "pattern";
  std::string labels_path;
  auto *detect = app.add_subcommand("detect-vocatives", "find vocative utterances");
  AddCorpusOptions(detect, corpus_args);
  detect->add_option("--detector", detector, "vocative detector")
      ->check(CLI::IsMember({"pattern", "supervised"}));
  detect->add_option("--labels", labels_path, "gold vocative labels JSON");
  detect->add_option("--out", out, "detections JSON output");

  std::string attributions_path, vocatives_path;
  auto *extract = app.add_subcommand("extract", "extract seed relations from vocatives");
  AddCorpusOptions(extract, corpus_args);
  extract->add_option("--attributions", attributions_path,
                      "attributions JSON (default: gold attributions)");
  extract->add_option("--vocatives", vocatives_path,
                      "detections JSON (default: pattern detector)");
  std::string cleaning_path;
  extract->add_option("--cleaning-file", cleaning_path, "seeds to drop");
  extract->add_option("--out", out, "seeds JSON output");

  std::string seeds_path;
  bool no_titles = false;
  auto *propagate = app.add_subcommand("propagate", "expand seeds with propagation rules");
  propagate->add_option("--seeds", seeds_path, "seeds JSON")->required();
  propagate->add_option("--annotations", corpus_args.annotations, "annotation JSON")
      ->required();
  AddGraphOptions(propagate, graph_args);
  propagate->add_flag("--no-title-inference", no_titles,
                      "skip Mr./Mrs. spouse inference");
  propagate->add_option("--out", out, "graph output");

  std::string graph_path;
  auto *evaluate = app.add_subcommand("evaluate", "score seeds or a graph against gold");
  evaluate->add_option("--annotations", corpus_args.annotations, "annotation JSON")
      ->required();
  auto *eval_graph = evaluate->add_option("--graph", graph_path, "graph JSON");
  auto *eval_seeds = evaluate->add_option("--seeds", seeds_path, "seeds JSON");
  eval_graph->excludes(eval_seeds);
  evaluate->add_option("--out", out, "report JSON output");

  bool mark_errors = false;
  auto *exporter = app.add_subcommand("export", "render a graph as DOT or JSON");
  exporter->add_option("--graph", graph_path, "graph JSON")->required();
  exporter->add_option("--annotations", corpus_args.annotations, "annotation JSON")
      ->required();
  exporter->add_option("--format", graph_args.format, "output format")
      ->check(CLI::IsMember({"dot", "json"}));
  exporter->add_flag("--mark-errors", mark_errors, "dash relations absent from gold");
  exporter->add_option("--out", out, "output file");

  std::vector<std::string> arms;
  std::string out_dir;
  auto *run = app.add_subcommand("run", "run the whole pipeline for one or more arms");
  AddCorpusOptions(run, corpus_args);
  AddAttributionOptions(run, attr_args);
  AddGraphOptions(run, graph_args);
  run->add_option("--arm", arms, "experiment arm (repeatable)")
      ->check(CLI::IsMember({"extracted", "cleaned", "oracle", "cleaned-oracle",
                             "cleaned_oracle"}));
  run->add_option("--cleaning-file", cleaning_path, "seeds to drop in cleaned arms");
  run->add_option("--detector", detector, "vocative detector")
      ->check(CLI::IsMember({"pattern", "supervised"}));
  run->add_option("--labels", labels_path, "gold vocative labels JSON");
  run->add_flag("--no-title-inference", no_titles, "skip Mr./Mrs. spouse inference");
  run->add_option("--out-dir", out_dir, "directory for seeds, graphs and reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*parse) {
      const Corpus corpus = Load(corpus_args);
      Emit(out, DocumentToJson(corpus.document));
      for (const auto &d : corpus.document.diagnostics) {
        std::cerr << "paragraph " << d.paragraph << ": " << d.message << '\n';
      }
      return 0;
    }

    if (*attribute) {
      const Corpus corpus = Load(corpus_args);
      const AttributionConfig config = ToConfig(attr_args);
      std::vector<std::string> diagnostics;
      std::optional<AttributionModel> model;
      if (!attr_args.model.empty()) {
        model = AttributionModel::Deserialize(ReadFile(attr_args.model));
      }
      const AttributionResult result =
          PredictSpeakers(corpus, config, model ? &*model : nullptr, diagnostics);
      Emit(out, AttributionsToJson(result));
      for (const auto &d : diagnostics) std::cerr << d << '\n';
      for (const auto &[category, tally] : result.tallies) {
        std::cerr << CategoryName(category) << ": " << tally.total << " utterances, "
                  << tally.attributed << " attributed, " << tally.correct << "/"
                  << tally.gold_labelled << " correct\n";
      }
      std::cerr << "accuracy: " << result.correct << "/" << result.gold_labelled << '\n';
      if (!save_model.empty()) {
        const AttributionContext ctx(corpus.document, corpus.lexicons,
                                     corpus.gold.characters);
        const auto pairs = BuildTrainingPairs(ctx, corpus.gold, config.window);
        TrainingReport report;
        WriteFile(save_model, TrainModel(pairs, &report).Serialize());
        for (const auto &w : report.warnings) std::cerr << w << '\n';
      }
      return 0;
    }

    if (*detect) {
      const Corpus corpus = Load(corpus_args);
      std::optional<VocativeLabelMap> labels;
      if (!labels_path.empty()) labels = ParseVocativeLabels(ReadFile(labels_path));
      const VocativeDetections d =
          DetectVocatives(corpus, ParseVocativeDetector(detector),
                          labels ? &*labels : nullptr, attr_args.folds);
      Emit(out, DetectionsToJson(d));
      const auto predicted = d.VocativeUtterances();
      std::cerr << d.occurrences.size() << " nominal occurrences, " << predicted.size()
                << " vocative utterances\n";
      if (labels) {
        const auto m = ScoreVocatives(predicted, GoldVocativeUtterances(*labels));
        std::cerr << "P=" << m.precision << " R=" << m.recall << " F=" << m.f << '\n';
      }
      return 0;
    }

    if (*extract) {
      const Corpus corpus = Load(corpus_args);
      const SpeakerMap speakers = attributions_path.empty()
                                      ? corpus.gold.attributions
                                      : ParseAttributionsJson(ReadFile(attributions_path));
      const VocativeDetections d =
          vocatives_path.empty()
              ? DetectVocatives(corpus, VocativeDetector::kPattern, nullptr)
              : ParseDetectionsJson(ReadFile(vocatives_path));
      const ExtractionResult r = ExtractSeeds(corpus.document, speakers, d.Vocatives(),
                                              corpus.lexicons, corpus.gold.characters);
      std::vector<SeedRelation> seeds = r.seeds;
      if (!cleaning_path.empty()) {
        seeds = ApplyCleaning(seeds, ParseCleaningList(ReadFile(cleaning_path), cleaning_path));
      }
      Emit(out, SeedsToJson(seeds));
      for (const auto &diag : r.diagnostics) std::cerr << diag << '\n';
      return 0;
    }

    if (*propagate) {
      const GoldAnnotations gold = LoadGold(corpus_args.annotations);
      const RuleSet rules = LoadRules(graph_args.rules);
      std::vector<SeedFact> facts = ToFacts(ParseSeeds(ReadFile(seeds_path)));
      if (!no_titles) {
        for (auto &f : InferSpousesFromTitles(gold.characters)) facts.push_back(f);
      }
      const PropagationResult r = Propagate(facts, rules, gold.characters);
      Emit(out, ExportGraph(r.graph, gold.characters, ParseGraphFormat(graph_args.format)));
      for (const auto &d : r.diagnostics) std::cerr << d << '\n';
      std::cerr << "rounds=" << r.stats.rounds << " added=" << r.stats.added
                << " replaced=" << r.stats.replaced << " cancelled=" << r.stats.cancelled
                << '\n';
      return 0;
    }

    if (*evaluate) {
      const GoldAnnotations gold = LoadGold(corpus_args.annotations);
      std::vector<RelationTriple> predicted;
      if (!graph_path.empty()) {
        for (const auto &f : ParseGraphJson(ReadFile(graph_path))) predicted.push_back(f.triple());
      } else if (!seeds_path.empty()) {
        for (const auto &s : ParseSeeds(ReadFile(seeds_path))) predicted.push_back(s.triple());
      } else {
        throw ValidationError("evaluate needs --graph or --seeds");
      }
      const EvaluationReport report =
          EvaluateRelations(predicted, gold.relations, gold.characters,
                            graph_path.empty() ? "seeds" : "graph");
      std::cout << FormatReport(report) << '\n';
      if (!out.empty()) WriteFile(out, ReportToJson(report));
      return 0;
    }

    if (*exporter) {
      const GoldAnnotations gold = LoadGold(corpus_args.annotations);
      KinshipGraph graph(&gold.characters);
      for (const auto &f : ParseGraphJson(ReadFile(graph_path))) {
        for (const CharacterId *id : {&f.a1, &f.a2}) {
          if (!gold.characters.Contains(*id)) {
            throw ValidationError("graph references unknown character '" + *id + "'");
          }
        }
        graph.Put(f);
      }
      std::optional<std::span<const RelationTriple>> g;
      if (mark_errors) g = std::span<const RelationTriple>(gold.relations);
      Emit(out, ExportGraph(graph, gold.characters, ParseGraphFormat(graph_args.format), g));
      return 0;
    }

    if (*run) {
      const Corpus corpus = Load(corpus_args);
      PipelineConfig config;
      config.attribution = ToConfig(attr_args);
      config.detector = ParseVocativeDetector(detector);
      if (!labels_path.empty()) config.vocative_labels = ParseVocativeLabels(ReadFile(labels_path));
      config.rules = LoadRules(graph_args.rules);
      if (!cleaning_path.empty()) {
        config.cleaning = ParseCleaningList(ReadFile(cleaning_path), cleaning_path);
      }
      config.infer_titles = !no_titles;
      std::optional<AttributionModel> model;
      if (!attr_args.model.empty()) {
        model = AttributionModel::Deserialize(ReadFile(attr_args.model));
        config.model = &*model;
      }
      if (arms.empty()) arms.push_back("extracted");
      const GraphFormat format = ParseGraphFormat(graph_args.format);
      if (!out_dir.empty()) fs::create_directories(out_dir);

      for (const std::string &arm_name : arms) {
        const ArmResult r = RunArm(corpus, config, ParseArm(arm_name));
        const std::string name(ArmName(r.arm));
        for (const auto &d : r.diagnostics) std::cerr << name << ": " << d << '\n';
        if (r.attribution) {
          std::cout << name << " attribution accuracy: " << r.attribution->correct << "/"
                    << r.attribution->gold_labelled << '\n';
        }
        std::cout << FormatReport(r.seed_report) << '\n'
                  << FormatReport(r.propagated_report) << '\n';
        if (!out_dir.empty()) {
          const fs::path dir(out_dir);
          WriteFile(dir / (name + "_seeds.json"), SeedsToJson(r.seeds));
          WriteFile(dir / (name + "_graph." + graph_args.format),
                    ExportGraph(r.propagation.graph, corpus.gold.characters, format,
                                std::span<const RelationTriple>(corpus.gold.relations)));
          WriteFile(dir / (name + "_seed_report.json"), ReportToJson(r.seed_report));
          WriteFile(dir / (name + "_propagated_report.json"),
                    ReportToJson(r.propagated_report));
          if (r.attribution) {
            WriteFile(dir / (name + "_attributions.json"), AttributionsToJson(*r.attribution));
          }
        }
      }
      return 0;
    }
  } catch (const IoError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const fs::filesystem_error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
