#include <random>
#include <set>

#include "doctest.h"
#include "famrel/error.h"
#include "famrel/vocative.h"
#include "fixtures.h"

using namespace famrel;
using namespace famrel::testing;

namespace {

struct One {
  CharacterRegistry registry = MakeRegistry({{"jane", "Jane", 'f', {}}});
  Document doc;
  std::vector<NominalOccurrence> occ;
  explicit One(const std::string &text) : doc(Parse(text, registry)) {
    occ = SelectCandidates(doc, doc.AllUtterances(), DefaultLexicons());
  }
  std::vector<double> Features(std::size_t i = 0) const {
    return ExtractVocativeFeatures(doc, occ.at(i));
  }
};

}  // namespace

TEST_CASE("candidate selection finds lexicon nominals") {
  One a("\"I shall tell my mother.\"");
  REQUIRE(a.occ.size() == 1);
  CHECK(a.occ[0].lemma == "mother");
  CHECK(a.occ[0].token_index == 4);
  CHECK(a.occ[0].utterance == UtteranceId{0, 0});
  One b("\"The carriage arrived.\"");
  CHECK(b.occ.empty());
  One c("\"My sister-in-law and my mamma.\"");
  REQUIRE(c.occ.size() == 2);
  CHECK(c.occ[0].lemma == "sister-in-law");
  CHECK(c.occ[1].lemma == "mamma");
}

TEST_CASE("nominals in narration are not candidates") {
  One a("Her mother smiled. \"Good day.\"");
  CHECK(a.occ.empty());
}

TEST_CASE("pattern examples") {
  One yes("\"Yes, my dear aunt, I will.\"");
  CHECK(DetectPattern(yes.doc, yes.occ.at(0)));
  One lives("\"My aunt lives in town.\"");
  CHECK_FALSE(DetectPattern(lives.doc, lives.occ.at(0)));
  One oh("\"Oh, mother! how can you.\"");
  CHECK(DetectPattern(oh.doc, oh.occ.at(0)));
}

TEST_CASE("pattern modifiers must appear in the order my, dear, nominal") {
  One dearest("\"Good night, dearest mother.\"");
  CHECK(DetectPattern(dearest.doc, dearest.occ.at(0)));
  One dear_my("\"Good night, dear my mother.\"");
  CHECK_FALSE(DetectPattern(dear_my.doc, dear_my.occ.at(0)));
  One adjective("\"Good night, my good mother.\"");
  CHECK_FALSE(DetectPattern(adjective.doc, adjective.occ.at(0)));
}

TEST_CASE("quotation boundaries count as punctuation") {
  One alone("\"Mamma\"");
  CHECK(DetectPattern(alone.doc, alone.occ.at(0)));
  const auto f = alone.Features();
  CHECK(f[kVocAtStart] == 1);
  CHECK(f[kVocAtEnd] == 1);
  CHECK(f[kVocPunctRight] == 1);
  CHECK(f[kVocSurroundedByPunct] == 1);
}

TEST_CASE("feature vector of the aunt example") {
  One a("\"Yes, my dear aunt, I will.\"");
  const auto f = a.Features();
  REQUIRE(f.size() == kVocativeFeatureCount);
  CHECK(f[kVocMyDear] == 1);
  CHECK(f[kVocMyAlone] == 0);
  CHECK(f[kVocDearAlone] == 0);
  CHECK(f[kVocSurroundedByCommas] == 1);
  CHECK(f[kVocSurroundedByPunct] == 1);
  CHECK(f[kVocCommaRight] == 1);
  CHECK(f[kVocPunctRight] == 1);
  CHECK(f[kVocAtStart] == 0);
  CHECK(f[kVocAtEnd] == 0);
  CHECK(f[kVocMyDearAnywhere] == 1);
  CHECK(f[kVocRepeated] == 0);
  for (double v : f) CHECK((v == 0.0 || v == 1.0));
}

TEST_CASE("final nominal before the closing quote sits at the end") {
  One a("\"You are too good to me, sister\"");
  const auto f = a.Features();
  CHECK(f[kVocAtEnd] == 1);
  CHECK(f[kVocPunctRight] == 1);
  CHECK(f[kVocCommaRight] == 0);
  CHECK(f[kVocYouAnywhere] == 1);
}

TEST_CASE("a repeated nominal sets the multiplicity feature on each occurrence") {
  One a("\"Sister, dear sister, wake up!\"");
  REQUIRE(a.occ.size() == 2);
  CHECK(a.Features(0)[kVocRepeated] == 1);
  CHECK(a.Features(1)[kVocRepeated] == 1);
  CHECK(a.Features(1)[kVocDearAlone] == 1);
}

TEST_CASE("lexical neighbours") {
  One a("\"Oh, I thank you mother you know.\"");
  const auto f = a.Features();
  CHECK(f[kVocOhBefore] == 1);
  CHECK(f[kVocYouBefore] == 1);
  CHECK(f[kVocYouAfter] == 1);
  CHECK(f[kVocPunctRight] == 0);
  One b("\"Is it you, mother?\"");
  const auto g = b.Features();
  CHECK(g[kVocYouBefore] == 1);  // punctuation is skipped
  CHECK(g[kVocQuestionRight] == 1);
}

TEST_CASE("feature names are distinct") {
  std::set<std::string_view> names;
  for (std::size_t i = 0; i < kVocativeFeatureCount; ++i) names.insert(VocativeFeatureName(i));
  CHECK(names.size() == kVocativeFeatureCount);
}

TEST_CASE("an occurrence outside its utterance is rejected") {
  One a("\"Mother.\"");
  NominalOccurrence bad = a.occ.at(0);
  bad.token_index = 40;
  CHECK_THROWS_AS(DetectPattern(a.doc, bad), ValidationError);
}

TEST_CASE("vocative labels parse and round-trip") {
  const auto labels = ParseVocativeLabels(
      R"([{"utterance_id":"3:0","token_index":2,"label":1},
          {"utterance_id":"4:1","token_index":0,"label":false}])");
  CHECK(labels.size() == 2);
  CHECK(labels.at({{3, 0}, 2}));
  CHECK_FALSE(labels.at({{4, 1}, 0}));
  CHECK(ParseVocativeLabels(VocativeLabelsToJson(labels)) == labels);
  CHECK_THROWS_AS(ParseVocativeLabels(R"([{"utterance_id":"3:0","label":1}])"),
                  ValidationError);
  CHECK_THROWS_AS(ParseVocativeLabels(R"([{"utterance_id":"3:0","token_index":1,"label":2}])"),
                  ValidationError);
  CHECK_THROWS_AS(ParseVocativeLabels(R"({"a":1})"), ValidationError);
}

TEST_CASE("pattern detector agrees with the hand-applied grammar on 50 utterances") {
  const VocativeFixture f = LoadVocative50();
  const VocativeLabelMap hand = Vocative50PatternLabels();
  const auto occ = SelectCandidates(f.document, f.document.AllUtterances(), DefaultLexicons());
  REQUIRE(occ.size() == hand.size());
  for (const auto &o : occ) {
    CAPTURE(o.utterance.ToString());
    CAPTURE(o.lemma);
    REQUIRE(hand.contains({o.utterance, o.token_index}));
    CHECK(DetectPattern(f.document, o) == hand.at({o.utterance, o.token_index}));
  }
}

TEST_CASE("utterance-level scoring") {
  const std::set<UtteranceId> predicted = {{0, 0}, {1, 0}, {2, 0}};
  const std::set<UtteranceId> gold = {{0, 0}, {2, 0}, {3, 0}, {4, 0}};
  const PrecisionRecall pr = ScoreVocatives(predicted, gold);
  CHECK(pr.precision == doctest::Approx(2.0 / 3));
  CHECK(pr.recall == doctest::Approx(0.5));
  CHECK(pr.f == doctest::Approx(4.0 / 7));
}

TEST_CASE("one positive occurrence makes the utterance vocative") {
  One a("\"Mother, my mother is ill.\"");
  const VocativeDetections d = DetectAllPattern(a.doc, a.occ);
  REQUIRE(d.positive.size() == 2);
  CHECK(d.positive[0]);
  CHECK_FALSE(d.positive[1]);
  CHECK(d.VocativeUtterances() == std::set<UtteranceId>{{0, 0}});
  CHECK(d.Vocatives().size() == 1);
}

TEST_CASE("supervised detection is perfect on a separable fixture") {
  std::mt19937_64 rng(11);
  const VocativeFixture f = MakeSeparableVocatives(rng, 120);
  const auto occ = SelectCandidates(f.document, f.document.AllUtterances(), DefaultLexicons());
  REQUIRE(occ.size() == 120);
  const auto r = DetectSupervised(f.document, occ, f.labels, 10, 5);
  CHECK(r.metrics.precision == 1.0);
  CHECK(r.metrics.recall == 1.0);
  CHECK(r.metrics.f == 1.0);
}

TEST_CASE("supervised detection needs as many positives as folds") {
  std::mt19937_64 rng(12);
  const VocativeFixture f = MakeSeparableVocatives(rng, 20);  // 7 positives
  const auto occ = SelectCandidates(f.document, f.document.AllUtterances(), DefaultLexicons());
  CHECK_THROWS_AS(DetectSupervised(f.document, occ, f.labels, 10, 5), ValidationError);
}
