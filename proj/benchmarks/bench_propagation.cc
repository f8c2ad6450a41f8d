#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "famrel/kinship.h"
#include "famrel/rules.h"

namespace {

using namespace famrel;

const RuleSet &Rules() {
  static const RuleSet rules = LoadRules(std::string(FAMREL_DATA_DIR) + "/rules/default.rules");
  return rules;
}

// Two parents with `children` children. Seeds name one parent link and a
// sibling chain, so saturation has to fill in every remaining pair.
struct Family {
  CharacterRegistry registry;
  std::vector<SeedFact> seeds;
};

Family MakeFamily(int children) {
  std::vector<Character> people = {{"mum", "Mum", Gender::kFemale, {"Mum"}},
                                   {"dad", "Dad", Gender::kMale, {"Dad"}}};
  for (int i = 0; i < children; ++i) {
    const std::string id = "c" + std::to_string(i);
    people.push_back({id, id, i % 2 ? Gender::kMale : Gender::kFemale, {id}});
  }
  Family f{CharacterRegistry(std::move(people)), {}};
  f.seeds.push_back({"mum", "wife_of", "dad", 1});
  f.seeds.push_back({"mum", "mother_of", "c0", 2});
  for (int i = 0; i + 1 < children; ++i) {
    const std::string rel = i % 2 ? "brother_of" : "sister_of";
    f.seeds.push_back({"c" + std::to_string(i), rel, "c" + std::to_string(i + 1), 1});
  }
  return f;
}

void BM_PropagateSiblingChain(benchmark::State &state) {
  const Family f = MakeFamily(static_cast<int>(state.range(0)));
  std::size_t facts = 0;
  for (auto _ : state) {
    auto r = Propagate(f.seeds, Rules(), f.registry);
    facts = r.graph.size();
    benchmark::DoNotOptimize(r);
  }
  state.counters["facts"] = static_cast<double>(facts);
}
BENCHMARK(BM_PropagateSiblingChain)->RangeMultiplier(2)->Range(4, 32)->Unit(benchmark::kMillisecond);

void BM_ExpandRules(benchmark::State &state) {
  const std::string text = ReadFile(std::string(FAMREL_DATA_DIR) + "/rules/default.rules");
  for (auto _ : state) {
    benchmark::DoNotOptimize(ParseRules(text, "default.rules"));
  }
}
BENCHMARK(BM_ExpandRules);

}  // namespace
