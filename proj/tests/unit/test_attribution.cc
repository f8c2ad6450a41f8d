#include <set>

#include "doctest.h"
#include "famrel/attribution.h"
#include "famrel/error.h"
#include "fixtures.h"
#include "json.hpp"

using namespace famrel;
using namespace famrel::testing;

namespace {

CharacterRegistry Cast() {
  return MakeRegistry({{"eliz", "Elizabeth", 'f', {"Lizzy"}},
                       {"jane", "Jane", 'f', {}},
                       {"mrb", "Mr. Bennet", 'm', {}},
                       {"mrsb", "Mrs. Bennet", 'f', {}}});
}

struct Fixture {
  CharacterRegistry registry;
  Document doc;
  AttributionContext ctx;
  Fixture(const std::string &text, CharacterRegistry reg)
      : registry(std::move(reg)),
        doc(Parse(text, registry)),
        ctx(doc, DefaultLexicons(), registry) {}
  const Utterance &U(int p, int q) const { return *doc.FindUtterance({p, q}); }
};

// Scores every candidate as negative, so supervised categories abstain.
CandidateScore Abstain(const Utterance &, std::size_t, std::span<const double>) {
  return CandidateScore{{false, false, false}, {0.0, 0.0, 0.0}, 0, Side::kBefore};
}

CandidateScore Score(std::vector<bool> labels, std::vector<double> probs,
                     std::size_t distance = 0, Side side = Side::kBefore) {
  return CandidateScore{std::move(labels), std::move(probs), distance, side};
}

LabeledPair Pair(int i, int label) {
  return {UtteranceId{i, 0}, 0, {double(label), double(i % 2), double(i % 5)}, label};
}

}  // namespace

TEST_CASE("a speech-tagged quote is a character trigram") {
  Fixture f("\"No,\" said Mr. Bennet.", Cast());
  CHECK(f.ctx.Categorize(f.U(0, 0)) == UtteranceCategory::kCharacterTrigram);
  const auto who = f.ctx.AttributeHeuristic(f.U(0, 0), UtteranceCategory::kCharacterTrigram,
                                            [](const UtteranceId &) { return std::nullopt; });
  CHECK(who == std::optional<CharacterId>("mrb"));
}

TEST_CASE("mention before the quote also forms a trigram") {
  Fixture f("Jane replied, \"Not yet.\"", Cast());
  CHECK(f.ctx.Categorize(f.U(0, 0)) == UtteranceCategory::kCharacterTrigram);
}

TEST_CASE("a sentence boundary breaks the trigram") {
  Fixture f("Jane sat down. \"Not yet.\"", Cast());
  CHECK(f.ctx.Categorize(f.U(0, 0)) == UtteranceCategory::kBackoff);
}

TEST_CASE("a trigram whose mention does not resolve attributes nobody") {
  Fixture f("\"No,\" said her mother.", Cast());
  REQUIRE(f.ctx.Categorize(f.U(0, 0)) == UtteranceCategory::kCharacterTrigram);
  CHECK_FALSE(f.ctx
                  .AttributeHeuristic(f.U(0, 0), UtteranceCategory::kCharacterTrigram,
                                      [](const UtteranceId &) { return std::nullopt; })
                  .has_value());
}

TEST_CASE("the second utterance of a paragraph is an added quote") {
  Fixture f("\"Well,\" she began. \"I never did.\"", Cast());
  CHECK(f.ctx.Categorize(f.U(0, 1)) == UtteranceCategory::kAddedQuote);
  std::map<UtteranceId, CharacterId> known = {{{0, 0}, "jane"}};
  const auto who = f.ctx.AttributeHeuristic(
      f.U(0, 1), UtteranceCategory::kAddedQuote,
      [&](const UtteranceId &id) -> std::optional<CharacterId> {
        auto it = known.find(id);
        return it == known.end() ? std::nullopt : std::optional(it->second);
      });
  CHECK(who == std::optional<CharacterId>("jane"));
}

TEST_CASE("three alone paragraphs form an apparent conversation") {
  Fixture f("\"Who is there?\"\n\n\"Only me.\"\n\n\"Come in, then.\"", Cast());
  CHECK(f.ctx.Categorize(f.U(0, 0)) == UtteranceCategory::kQuoteAlone);
  CHECK(f.ctx.Categorize(f.U(1, 0)) == UtteranceCategory::kQuoteAlone);
  CHECK(f.ctx.Categorize(f.U(2, 0)) == UtteranceCategory::kApparentConversation);
  std::map<UtteranceId, CharacterId> turns = {{{0, 0}, "eliz"}, {{1, 0}, "jane"}};
  const auto who = f.ctx.AttributeHeuristic(
      f.U(2, 0), UtteranceCategory::kApparentConversation,
      [&](const UtteranceId &id) -> std::optional<CharacterId> {
        auto it = turns.find(id);
        return it == turns.end() ? std::nullopt : std::optional(it->second);
      });
  CHECK(who == std::optional<CharacterId>("eliz"));
}

TEST_CASE("a pronoun speech tag is anaphora") {
  Fixture f("Jane sat down.\n\n\"Not yet,\" she said.", Cast());
  CHECK(f.ctx.Categorize(f.U(1, 0)) == UtteranceCategory::kAnaphora);
  const auto cands = f.ctx.GatherCandidates(f.U(1, 0), UtteranceCategory::kAnaphora, 2);
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].kind == MentionKind::kPronoun);
  CHECK(cands[0].side == Side::kAfter);
  CHECK(cands[0].character == std::optional<CharacterId>("jane"));
}

TEST_CASE("heuristic attribution refuses supervised categories") {
  Fixture f("\"Yes.\"", Cast());
  CHECK_THROWS_AS(f.ctx.AttributeHeuristic(f.U(0, 0), UtteranceCategory::kQuoteAlone,
                                           [](const UtteranceId &) { return std::nullopt; }),
                  ValidationError);
}

TEST_CASE("candidates come from neighbouring paragraphs, nearest first") {
  Fixture f("Jane came in.\n\n\"Yes.\"\n\nElizabeth looked up at once.", Cast());
  const auto cands = f.ctx.GatherCandidates(f.U(1, 0), UtteranceCategory::kQuoteAlone, 2);
  REQUIRE(cands.size() == 2);
  CHECK(cands[0].character == std::optional<CharacterId>("eliz"));
  CHECK(cands[0].distance == 0);
  CHECK(cands[0].side == Side::kAfter);
  CHECK(cands[1].character == std::optional<CharacterId>("jane"));
  CHECK(cands[1].distance == 2);  // "came in"
}

TEST_CASE("no surrounding mentions means no candidates and an abstention") {
  Fixture f("\"Yes.\"", Cast());
  CHECK(f.ctx.GatherCandidates(f.U(0, 0), UtteranceCategory::kQuoteAlone, 2).empty());
  AttributionConfig config;
  const auto r = AttributeAll(f.ctx, nullptr, config, Abstain);
  CHECK_FALSE(r.utterances.at({0, 0}).speaker.has_value());
}

TEST_CASE("mentions inside quotes are never candidates") {
  Fixture f("\"Where is Jane?\"", Cast());
  CHECK(f.ctx.GatherCandidates(f.U(0, 0), UtteranceCategory::kQuoteAlone, 2).empty());
}

TEST_CASE("appearance count feature counts named narration mentions") {
  std::string text;
  for (int i = 0; i < 40; ++i) text += "Jane walked. ";
  text += "\"Yes.\"";
  Fixture f(text, Cast());
  const auto cands = f.ctx.GatherCandidates(f.U(0, 0), UtteranceCategory::kBackoff, 2);
  REQUIRE_FALSE(cands.empty());
  CHECK(f.ctx.AppearanceCount("jane") == 40);
  CHECK(f.ctx.ExtractFeatures(f.U(0, 0), cands[0])[kFeatAppearanceCount] == 40);
}

TEST_CASE("utterance length counts the words inside the quote") {
  Fixture f("Jane sat. \"one two three four five six seven eight nine ten eleven twelve\"",
            Cast());
  const auto cands = f.ctx.GatherCandidates(f.U(0, 0), UtteranceCategory::kBackoff, 2);
  REQUIRE_FALSE(cands.empty());
  CHECK(f.ctx.ExtractFeatures(f.U(0, 0), cands[0])[kFeatUtteranceLength] == 12);
}

TEST_CASE("a candidate right after the quote with a verb between") {
  Fixture f("\"Hello there,\" said Jane.", Cast());
  const auto cands = f.ctx.GatherCandidates(f.U(0, 0), UtteranceCategory::kBackoff, 2);
  REQUIRE(cands.size() == 1);
  const auto x = f.ctx.ExtractFeatures(f.U(0, 0), cands[0]);
  CHECK(x.size() == kAttributionFeatureCount);
  CHECK(x[kFeatAdjacent] == 1);
  CHECK(x[kFeatVerbBetween] == 1);
  CHECK(x[kFeatVerbNextToCandidate] == 1);
  CHECK(x[kFeatSideAfter] == 1);
  CHECK(x[kFeatDistance] == 1);
  CHECK(x[kFeatEndsWithComma] == 1);
  CHECK(x[kFeatNamed] == 1);
  CHECK(x[kFeatSameParagraph] == 1);
  CHECK(x == f.ctx.ExtractFeatures(f.U(0, 0), cands[0]));
}

TEST_CASE("feature names cover the vector") {
  std::set<std::string_view> names;
  for (std::size_t i = 0; i < kAttributionFeatureCount; ++i) {
    names.insert(AttributionFeatureName(i));
  }
  CHECK(names.size() == kAttributionFeatureCount);
  CHECK_THROWS_AS(AttributionFeatureName(kAttributionFeatureCount), ValidationError);
}

TEST_CASE("label ranking takes a unique positive and abstains otherwise") {
  AttributionConfig config;
  config.ranking = Ranking::kLabel;
  config.classifier = ClassifierKind::kDecisionTree;
  const std::vector<CandidateScore> one = {Score({true, false, false}, {.9, .1, .1}),
                                           Score({false, true, true}, {.2, .9, .9}),
                                           Score({false, false, false}, {.1, .1, .1})};
  CHECK(RankCandidates(one, config) == std::optional<std::size_t>(0));
  const std::vector<CandidateScore> two = {Score({true, false, false}, {.9, 0, 0}),
                                           Score({true, false, false}, {.8, 0, 0})};
  CHECK_FALSE(RankCandidates(two, config).has_value());
  const std::vector<CandidateScore> none = {Score({false, false, false}, {.4, 0, 0})};
  CHECK_FALSE(RankCandidates(none, config).has_value());
}

TEST_CASE("probability ranking takes the argmax above the threshold") {
  AttributionConfig config;
  config.ranking = Ranking::kProbability;
  config.classifier = ClassifierKind::kLogistic;
  const std::vector<CandidateScore> s = {Score({false, false, false}, {0, 0, 0.4}),
                                         Score({false, false, true}, {0, 0, 0.9})};
  config.threshold = 0.5;
  CHECK(RankCandidates(s, config) == std::optional<std::size_t>(1));
  config.threshold = 0.95;
  CHECK_FALSE(RankCandidates(s, config).has_value());
}

TEST_CASE("probability ties go to the closer candidate, then the later one") {
  AttributionConfig config;
  config.ranking = Ranking::kProbability;
  const std::vector<CandidateScore> by_distance = {
      Score({0, 0, 1}, {0, 0, .7}, 3, Side::kAfter), Score({0, 0, 1}, {0, 0, .7}, 1)};
  CHECK(RankCandidates(by_distance, config) == std::optional<std::size_t>(1));
  const std::vector<CandidateScore> by_side = {
      Score({0, 0, 1}, {0, 0, .7}, 2, Side::kBefore),
      Score({0, 0, 1}, {0, 0, .7}, 2, Side::kAfter)};
  CHECK(RankCandidates(by_side, config) == std::optional<std::size_t>(1));
}

TEST_CASE("hybrid ranking falls back to probabilities when labels are ambiguous") {
  AttributionConfig config;
  config.ranking = Ranking::kHybrid;
  const std::vector<CandidateScore> s = {Score({0, 0, 1}, {0, 0, .6}),
                                         Score({0, 0, 1}, {0, 0, .8})};
  CHECK(RankCandidates(s, config) == std::optional<std::size_t>(1));
  const std::vector<CandidateScore> unique = {Score({0, 0, 0}, {0, 0, .45}),
                                              Score({0, 0, 1}, {0, 0, .55})};
  CHECK(RankCandidates(unique, config) == std::optional<std::size_t>(1));
}

TEST_CASE("combined ranking aggregates the ensemble") {
  const std::vector<double> p = {0.2, 0.9, 0.4};
  CHECK(CombineProbabilities(p, Combiner::kMax) == doctest::Approx(0.9));
  CHECK(CombineProbabilities(p, Combiner::kMean) == doctest::Approx(0.5));
  CHECK(CombineProbabilities(p, Combiner::kMedian) == doctest::Approx(0.4));
  CHECK(CombineProbabilities(p, Combiner::kProduct) == doctest::Approx(0.072));
  AttributionConfig config;
  config.ranking = Ranking::kCombined;
  config.combiner = Combiner::kMean;
  const std::vector<CandidateScore> s = {Score({1, 0, 0}, {.9, .3, .3}),
                                         Score({0, 1, 1}, {.4, .7, .7})};
  CHECK(RankCandidates(s, config) == std::optional<std::size_t>(1));
  config.combiner = Combiner::kMax;
  CHECK(RankCandidates(s, config) == std::optional<std::size_t>(0));
}

TEST_CASE("ranking option names round-trip") {
  for (Ranking r : {Ranking::kLabel, Ranking::kProbability, Ranking::kHybrid,
                    Ranking::kCombined}) {
    CHECK(ParseRanking(RankingName(r)) == r);
  }
  for (Combiner c : {Combiner::kMax, Combiner::kMean, Combiner::kMedian, Combiner::kProduct}) {
    CHECK(ParseCombiner(CombinerName(c)) == c);
  }
  CHECK(ParseChainSource("predicted") == ChainSource::kPredicted);
  CHECK_THROWS_AS(ParseRanking("vote"), ValidationError);
  CHECK_THROWS_AS(ParseChainSource("oracle"), ValidationError);
}

TEST_CASE("cross validation trains one model per disjoint fold") {
  std::vector<LabeledPair> pairs;
  for (int i = 0; i < 100; ++i) pairs.push_back(Pair(i, i % 5 == 0));
  const CrossValidatedModels cv = TrainCrossValidated(pairs, 10, 9);
  CHECK(cv.models.size() == 10);
  std::vector<int> per_fold(10);
  for (int f : cv.fold_of_pair) ++per_fold[f];
  for (int n : per_fold) CHECK(n == 10);
  REQUIRE(cv.report.fold_accuracy.size() == 10);
  for (const auto &fold : cv.report.fold_accuracy) {
    for (double a : fold) {
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
    }
  }
}

TEST_CASE("cross validation needs as many positives as folds") {
  std::vector<LabeledPair> pairs;
  for (int i = 0; i < 100; ++i) pairs.push_back(Pair(i, i < 5));
  CHECK_THROWS_AS(TrainCrossValidated(pairs, 10, 1), ValidationError);
}

TEST_CASE("all-positive training pairs warn and predict positive") {
  std::vector<LabeledPair> pairs;
  for (int i = 0; i < 20; ++i) pairs.push_back(Pair(i, 1));
  TrainingReport report;
  const AttributionModel model = TrainModel(pairs, &report);
  CHECK_FALSE(report.warnings.empty());
  const CandidateScore s = model.Score(pairs[3].features);
  for (bool l : s.labels) CHECK(l);
}

TEST_CASE("attribution models serialise with a format version") {
  std::vector<LabeledPair> pairs;
  for (int i = 0; i < 60; ++i) pairs.push_back(Pair(i, i % 3 == 0));
  const AttributionModel model = TrainModel(pairs);
  const std::string text = model.Serialize();
  const AttributionModel back = AttributionModel::Deserialize(text);
  for (const auto &p : pairs) {
    const auto a = model.Score(p.features), b = back.Score(p.features);
    CHECK(a.labels == b.labels);
    for (std::size_t m = 0; m < a.probabilities.size(); ++m) {
      CHECK(a.probabilities[m] == doctest::Approx(b.probabilities[m]));
    }
  }
  auto j = nlohmann::json::parse(text);
  CHECK(j["version"] == AttributionModel::kFormatVersion);
  j["version"] = AttributionModel::kFormatVersion + 1;
  CHECK_THROWS_WITH_AS(AttributionModel::Deserialize(j.dump()),
                       doctest::Contains("version"), ValidationError);
  CHECK_THROWS_AS(AttributionModel::Deserialize("{}"), ValidationError);
}

TEST_CASE("an all-trigram chapter is fully attributed") {
  Fixture f(
      "\"Good morning,\" said Jane.\n\n\"Is it?\" asked Elizabeth.\n\n"
      "Mr. Bennet replied, \"It is.\"\n\n\"Hush,\" cried Mrs. Bennet.",
      Cast());
  const auto r = AttributeAll(f.ctx, nullptr, AttributionConfig{}, Abstain);
  REQUIRE(r.utterances.size() == 4);
  for (const auto &[id, a] : r.utterances) {
    CAPTURE(id.ToString());
    CHECK(a.category == UtteranceCategory::kCharacterTrigram);
    CHECK(a.speaker.has_value());
  }
  CHECK(r.tallies.at(UtteranceCategory::kCharacterTrigram).attributed == 4);
}

TEST_CASE("the six-category chapter is categorised as annotated") {
  const Corpus c = LoadFixtureCorpus("six_categories");
  const auto expected = nlohmann::json::parse(
      ReadFile(FixtureDir() / "six_categories.categories.json"));
  AttributionContext ctx(c.document, DefaultLexicons(), c.gold.characters);
  std::set<std::string> seen;
  REQUIRE(expected.size() == c.document.SpeakerUtterances().size());
  for (const auto &e : expected) {
    const auto id = UtteranceId::Parse(e["utterance_id"].get<std::string>());
    const Utterance *u = c.document.FindUtterance(id);
    REQUIRE(u != nullptr);
    CAPTURE(id.ToString());
    CHECK(CategoryName(ctx.Categorize(*u)) == e["category"].get<std::string>());
    seen.insert(e["category"].get<std::string>());
  }
  CHECK(seen.size() == 6);
}

TEST_CASE("gold and predicted chains diverge after a missed chain head") {
  const Corpus c = LoadFixtureCorpus("six_categories");
  AttributionContext ctx(c.document, DefaultLexicons(), c.gold.characters);
  AttributionConfig gold_chain;
  gold_chain.chain_source = ChainSource::kGold;
  AttributionConfig predicted_chain = gold_chain;
  predicted_chain.chain_source = ChainSource::kPredicted;

  const auto with_gold = AttributeAll(ctx, &c.gold, gold_chain, Abstain);
  const auto with_predicted = AttributeAll(ctx, &c.gold, predicted_chain, Abstain);
  // 13:0 continues the turn-taking of 11:0, a quote_alone the scorer abstains on.
  CHECK(with_gold.utterances.at({13, 0}).speaker == std::optional<CharacterId>("jane"));
  CHECK_FALSE(with_predicted.utterances.at({13, 0}).speaker.has_value());
  CHECK(with_gold.correct > with_predicted.correct);

  for (const auto &[id, a] : with_gold.utterances) {
    if (IsSupervisedCategory(a.category)) continue;
    CAPTURE(id.ToString());
    CHECK(a.speaker == std::optional<CharacterId>(c.gold.attributions.at(id)));
  }
}

TEST_CASE("accuracy counts abstentions on gold utterances as errors") {
  const Corpus c = LoadFixtureCorpus("six_categories");
  AttributionContext ctx(c.document, DefaultLexicons(), c.gold.characters);
  const auto r = AttributeAll(ctx, &c.gold, AttributionConfig{}, Abstain);
  CHECK(r.gold_labelled == 14);
  int heuristic = 0;
  for (const auto &[cat, t] : r.tallies) {
    if (!IsSupervisedCategory(cat)) heuristic += t.total;
  }
  CHECK(r.correct == heuristic);
  CHECK(r.accuracy() == doctest::Approx(double(heuristic) / 14));
}
