#include "fixtures.h"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "famrel/relation.h"

#ifndef FAMREL_TEST_DATA_DIR
#error "FAMREL_TEST_DATA_DIR must be defined"
#endif
#ifndef FAMREL_DATA_DIR
#error "FAMREL_DATA_DIR must be defined"
#endif

namespace famrel::testing {

std::filesystem::path DataDir() { return FAMREL_DATA_DIR; }
std::filesystem::path FixtureDir() { return FAMREL_TEST_DATA_DIR; }

const Lexicons &DefaultLexicons() {
  static const Lexicons lex = Lexicons::LoadDirectory(DataDir() / "lexicons");
  return lex;
}

const RuleSet &DefaultRules() {
  static const RuleSet rules = LoadRules(DataDir() / "rules" / "default.rules");
  return rules;
}

CharacterRegistry MakeRegistry(const std::vector<CharacterSpec> &specs) {
  std::vector<Character> out;
  for (const auto &s : specs) {
    Character c;
    c.id = s.id;
    c.name = s.name;
    c.gender = s.gender == 'f' ? Gender::kFemale
               : s.gender == 'm' ? Gender::kMale
                                 : Gender::kUnknown;
    c.aliases = s.aliases;
    out.push_back(std::move(c));
  }
  return CharacterRegistry(std::move(out));
}

Document Parse(const std::string &text, const CharacterRegistry &registry) {
  return ParseNarrative(text, registry, DefaultLexicons());
}

Corpus LoadFixtureCorpus(const std::string &stem) {
  return LoadCorpus(FixtureDir() / (stem + ".txt"), FixtureDir() / (stem + ".json"),
                    DataDir() / "lexicons");
}

namespace {

struct Person {
  CharacterId id;
  Gender gender;
  int father = -1;
  int mother = -1;
  int spouse = -1;
  int generation = 0;
};

std::string Rel(const char *female, const char *male, Gender g) {
  return g == Gender::kFemale ? female : male;
}

}  // namespace

RandomFamily MakeRandomFamily(std::mt19937_64 &rng, int max_members) {
  std::vector<Person> people;
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  auto add = [&](Gender g, int generation) {
    people.push_back({"p" + std::to_string(people.size()), g, -1, -1, -1, generation});
    return static_cast<int>(people.size()) - 1;
  };
  auto marry = [&](int a, int b) {
    people[a].spouse = b;
    people[b].spouse = a;
  };
  auto random_gender = [&] { return coin(0.5) ? Gender::kFemale : Gender::kMale; };

  const int founders_father = add(Gender::kMale, 0);
  const int founders_mother = add(Gender::kFemale, 0);
  marry(founders_father, founders_mother);
  std::vector<std::pair<int, int>> couples = {{founders_father, founders_mother}};

  while (static_cast<int>(people.size()) < max_members) {
    const auto [f, m] = couples[std::uniform_int_distribution<std::size_t>(
        0, couples.size() - 1)(rng)];
    const int child = add(random_gender(), people[f].generation + 1);
    people[child].father = f;
    people[child].mother = m;
    if (people[child].generation < 2 && static_cast<int>(people.size()) < max_members &&
        coin(0.4)) {
      const Gender g = people[child].gender == Gender::kFemale ? Gender::kMale
                                                              : Gender::kFemale;
      const int partner = add(g, people[child].generation);
      marry(child, partner);
      couples.push_back(g == Gender::kMale ? std::make_pair(partner, child)
                                           : std::make_pair(child, partner));
    }
    if (coin(0.15)) break;
  }

  std::vector<Character> chars;
  for (const Person &p : people) chars.push_back({p.id, p.id, p.gender, {p.id}});
  RandomFamily family{CharacterRegistry(std::move(chars)), {}};

  const int n = static_cast<int>(people.size());
  auto parent_of = [&](int a, int b) {
    return people[b].father == a || people[b].mother == a;
  };
  auto siblings = [&](int a, int b) {
    return a != b && people[a].father >= 0 && people[a].father == people[b].father &&
           people[a].mother == people[b].mother;
  };
  auto parent_sibling = [&](int a, int b) {
    for (int p : {people[b].father, people[b].mother}) {
      if (p < 0) continue;
      if (siblings(a, p)) return true;
      if (people[a].spouse >= 0 && siblings(people[a].spouse, p)) return true;
    }
    return false;
  };
  auto grandparent = [&](int a, int b) {
    for (int p : {people[b].father, people[b].mother}) {
      if (p >= 0 && parent_of(a, p)) return true;
    }
    return false;
  };
  auto cousins = [&](int a, int b) {
    for (int pa : {people[a].father, people[a].mother}) {
      for (int pb : {people[b].father, people[b].mother}) {
        if (pa >= 0 && pb >= 0 && siblings(pa, pb)) return true;
      }
    }
    return false;
  };
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const Gender g = people[a].gender;
      std::string r;
      if (parent_of(a, b)) r = Rel("mother_of", "father_of", g);
      else if (parent_of(b, a)) r = Rel("daughter_of", "son_of", g);
      else if (people[a].spouse == b) r = Rel("wife_of", "husband_of", g);
      else if (siblings(a, b)) r = Rel("sister_of", "brother_of", g);
      else if (grandparent(a, b)) r = Rel("grandmother_of", "grandfather_of", g);
      else if (grandparent(b, a)) r = Rel("granddaughter_of", "grandson_of", g);
      else if (parent_sibling(a, b)) r = Rel("aunt_of", "uncle_of", g);
      else if (parent_sibling(b, a)) r = Rel("niece_of", "nephew_of", g);
      else if (cousins(a, b)) r = "cousin_of";
      if (!r.empty()) family.truth.push_back({people[a].id, r, people[b].id, 1});
    }
  }
  return family;
}

std::vector<SeedFact> SampleSeeds(const RandomFamily &family, std::mt19937_64 &rng) {
  std::vector<SeedFact> pool = family.truth;
  std::shuffle(pool.begin(), pool.end(), rng);
  if (pool.empty()) return {};
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, pool.size())(rng);
  pool.resize(k);
  std::uniform_int_distribution<int> count(1, 5);
  for (SeedFact &s : pool) {
    s.count = count(rng);
    if (std::bernoulli_distribution(0.5)(rng)) {
      const std::string inv =
          InverseRelation(s.relation, family.registry.GenderOf(s.a2));
      s = {s.a2, inv, s.a1, s.count};
    }
  }
  return pool;
}

RandomSeedSet MakeFuzzSeeds(std::mt19937_64 &rng) {
  const int n = std::uniform_int_distribution<int>(2, 8)(rng);
  std::vector<Character> chars;
  for (int i = 0; i < n; ++i) {
    const int g = std::uniform_int_distribution<int>(0, 4)(rng);
    const Gender gender = g < 2 ? Gender::kFemale : g < 4 ? Gender::kMale : Gender::kUnknown;
    const std::string id = "c" + std::to_string(i);
    chars.push_back({id, id, gender, {id}});
  }
  RandomSeedSet out{CharacterRegistry(std::move(chars)), {}};
  const auto relations = AllRelationNames();
  const int m = std::uniform_int_distribution<int>(1, 12)(rng);
  std::uniform_int_distribution<int> person(0, n - 1);
  std::uniform_int_distribution<std::size_t> rel(0, relations.size() - 1);
  std::uniform_int_distribution<int> count(1, 5);
  for (int i = 0; i < m; ++i) {
    const int a = person(rng);
    int b = person(rng);
    while (b == a) b = person(rng);
    out.seeds.push_back({"c" + std::to_string(a), relations[rel(rng)],
                         "c" + std::to_string(b), count(rng)});
  }
  return out;
}

std::map<std::pair<CharacterId, CharacterId>, std::pair<std::string, int>> Snapshot(
    const KinshipGraph &graph) {
  std::map<std::pair<CharacterId, CharacterId>, std::pair<std::string, int>> out;
  for (const auto &[pair, fact] : graph.facts()) out[pair] = {fact.relation, fact.count};
  return out;
}

int ComponentCount(const KinshipGraph &graph) {
  std::map<CharacterId, CharacterId> parent;
  std::function<CharacterId(const CharacterId &)> find = [&](const CharacterId &x) {
    auto it = parent.find(x);
    if (it == parent.end()) return parent[x] = x;
    if (it->second == x) return x;
    return it->second = find(it->second);
  };
  for (const auto &[pair, fact] : graph.facts()) {
    const CharacterId a = find(pair.first), b = find(pair.second);
    if (a != b) parent[a] = b;
  }
  std::set<CharacterId> roots;
  for (const auto &[x, p] : parent) roots.insert(find(x));
  return static_cast<int>(roots.size());
}

}  // namespace famrel::testing

namespace famrel::testing {

VocativeFixture LoadVocative50() {
  VocativeFixture f;
  const GoldAnnotations gold =
      ParseAnnotations(ReadFile(FixtureDir() / "vocative50.json"));
  f.registry = gold.characters;
  f.document = Parse(ReadFile(FixtureDir() / "vocative50.txt"), f.registry);
  f.labels = ParseVocativeLabels(ReadFile(FixtureDir() / "vocative50.labels.json"));
  return f;
}

VocativeLabelMap Vocative50PatternLabels() {
  return ParseVocativeLabels(ReadFile(FixtureDir() / "vocative50.pattern.json"));
}

VocativeFixture MakeSeparableVocatives(std::mt19937_64 &rng, int occurrences) {
  static const std::vector<std::string> nominals = {
      "mother", "father", "sister", "brother", "aunt", "uncle", "cousin", "niece"};
  static const std::vector<std::string> openers = {"Well", "Yes", "Indeed", "Come",
                                                   "Truly", "Now"};
  static const std::vector<std::string> tails = {
      "I will go", "we shall see", "it is late", "the rain has stopped",
      "nothing more can be done"};
  static const std::vector<std::string> verbs = {"arrived", "wrote", "waited",
                                                 "laughed", "stayed"};
  auto pick = [&](const std::vector<std::string> &v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  VocativeFixture f;
  f.registry = MakeRegistry({{"jane", "Jane", 'f', {}}});
  std::string text;
  std::vector<std::pair<std::string, bool>> planned;
  for (int i = 0; i < occurrences; ++i) {
    const bool vocative = i % 3 == 0;
    const std::string t = pick(nominals);
    const std::string utterance =
        vocative ? pick(openers) + ", my dear " + t + ", " + pick(tails) + "."
                 : "The " + t + " " + pick(verbs) + " and " + pick(tails) + ".";
    if (i) text += "\n\n";
    text += "\"" + utterance + "\"";
    planned.emplace_back(t, vocative);
  }
  f.document = Parse(text, f.registry);
  for (int i = 0; i < occurrences; ++i) {
    const Utterance &u = f.document.paragraphs[i].utterances.at(0);
    const auto tokens = InnerTokens(f.document, u);
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      if (tokens[k].lower == planned[i].first) {
        f.labels[{u.id, k}] = planned[i].second;
        break;
      }
    }
  }
  return f;
}

}  // namespace famrel::testing

namespace famrel::testing {

CountedSets MakeCountedSets(int tp, int fp, int fn) {
  CountedSets s;
  std::vector<CharacterSpec> specs;
  const int pairs = tp + fp + fn;
  for (int i = 0; i < 2 * pairs; ++i) {
    specs.push_back({"p" + std::to_string(i), "Person " + std::to_string(i), 'f', {}});
  }
  s.registry = MakeRegistry(specs);
  for (int k = 0; k < pairs; ++k) {
    const RelationTriple t{"p" + std::to_string(2 * k), "cousin_of",
                           "p" + std::to_string(2 * k + 1)};
    if (k < tp + fp) s.predicted.push_back(t);
    if (k < tp || k >= tp + fp) s.gold.push_back(t);
  }
  return s;
}

}  // namespace famrel::testing
