#ifndef FAMREL_TESTS_SUPPORT_FIXTURES_H_
#define FAMREL_TESTS_SUPPORT_FIXTURES_H_

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "famrel/corpus.h"
#include "famrel/kinship.h"
#include "famrel/rules.h"
#include "famrel/vocative.h"

namespace famrel::testing {

std::filesystem::path DataDir();      // repository data/
std::filesystem::path FixtureDir();   // tests/data/

const Lexicons &DefaultLexicons();
const RuleSet &DefaultRules();

// Characters given as {id, name, gender letter, extra aliases}.
struct CharacterSpec {
  std::string id;
  std::string name;
  char gender = 'u';
  std::vector<std::string> aliases;
};
CharacterRegistry MakeRegistry(const std::vector<CharacterSpec> &specs);

Document Parse(const std::string &text, const CharacterRegistry &registry);

Corpus LoadFixtureCorpus(const std::string &stem);

// A random family: up to `max_members` people in at most three generations,
// with the true relation of every related pair.
struct RandomFamily {
  CharacterRegistry registry;
  std::vector<SeedFact> truth;  // gendered, one orientation per pair
};
RandomFamily MakeRandomFamily(std::mt19937_64 &rng, int max_members);

// Random seeds drawn from the family's true relations, counts in [1, 5].
std::vector<SeedFact> SampleSeeds(const RandomFamily &family, std::mt19937_64 &rng);

// Arbitrary (possibly contradictory) seeds over a random registry.
struct RandomSeedSet {
  CharacterRegistry registry;
  std::vector<SeedFact> seeds;
};
RandomSeedSet MakeFuzzSeeds(std::mt19937_64 &rng);

// Ordered pair -> (relation, count), the part of a graph the engine promises.
std::map<std::pair<CharacterId, CharacterId>, std::pair<std::string, int>> Snapshot(
    const KinshipGraph &graph);

// Undirected connected components over characters that take part in a fact.
int ComponentCount(const KinshipGraph &graph);

// Parsed corpus plus per-occurrence vocative labels.
struct VocativeFixture {
  CharacterRegistry registry;
  Document document;
  VocativeLabelMap labels;
};

// The hand-labelled 50-utterance fixture; `labels` are the gold decisions.
VocativeFixture LoadVocative50();
// The hand-applied pattern decisions for the same occurrences.
VocativeLabelMap Vocative50PatternLabels();

// `occurrences` single-nominal utterances, every third one vocative. Vocative
// ones read ", my dear T," and the others use T as a plain noun phrase.
VocativeFixture MakeSeparableVocatives(std::mt19937_64 &rng, int occurrences);

// Predicted and gold cousin relations over fresh characters with exactly
// `tp` shared, `fp` predicted only and `fn` gold only triples.
struct CountedSets {
  CharacterRegistry registry;
  std::vector<RelationTriple> predicted;
  std::vector<RelationTriple> gold;
};
CountedSets MakeCountedSets(int tp, int fp, int fn);

}  // namespace famrel::testing

#endif  // FAMREL_TESTS_SUPPORT_FIXTURES_H_
