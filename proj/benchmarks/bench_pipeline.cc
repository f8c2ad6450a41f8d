#include <benchmark/benchmark.h>

#include <string>

#include "famrel/pipeline.h"

namespace {

using namespace famrel;

const std::string kFixtures = FAMREL_FIXTURE_DIR;
const std::string kLexicons = std::string(FAMREL_DATA_DIR) + "/lexicons";

void BM_ParseNarrative(benchmark::State &state) {
  const Corpus c = LoadCorpus(kFixtures + "/e2e.txt", kFixtures + "/e2e.json", kLexicons);
  const std::string chapter = ReadFile(kFixtures + "/e2e.txt");
  std::string text;
  for (int i = 0; i < state.range(0); ++i) text += chapter + "\n";
  for (auto _ : state) {
    benchmark::DoNotOptimize(ParseNarrative(text, c.gold.characters, c.lexicons));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseNarrative)->RangeMultiplier(4)->Range(1, 64);

void BM_RunArm(benchmark::State &state) {
  const Corpus c = LoadCorpus(kFixtures + "/e2e.txt", kFixtures + "/e2e.json", kLexicons);
  PipelineConfig config;
  config.rules = LoadRules(std::string(FAMREL_DATA_DIR) + "/rules/default.rules");
  const Arm arm = static_cast<Arm>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunArm(c, config, arm));
  }
  state.SetLabel(std::string(ArmName(arm)));
}
BENCHMARK(BM_RunArm)
    ->Arg(static_cast<int>(Arm::kExtracted))
    ->Arg(static_cast<int>(Arm::kOracle))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
