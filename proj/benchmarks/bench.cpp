// Copyright 2026 The abacmine Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "abacmine/miner.hpp"
#include "abacmine/semantics.hpp"
#include "abacmine/similarity.hpp"
#include "abacmine/synth.hpp"

namespace abacmine {
namespace {

Policy synthetic(std::size_t rules) {
  SynthPolicyConfig cfg;
  cfg.n_rules = rules;
  cfg.seed = 42;
  return gen_synthetic_policy(cfg);
}

void BM_PolicyMeaning(benchmark::State& state) {
  const Policy p = synthetic(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(policy_meaning(*p.universe, p.rules));
  state.counters["tuples"] = static_cast<double>(p.universe->tuple_count());
}
BENCHMARK(BM_PolicyMeaning)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_MinePolicy(benchmark::State& state) {
  const Policy p = synthetic(static_cast<std::size_t>(state.range(0)));
  Rng rng(1);
  const auto summary = gen_log_summary(p, make_distributions(p, {}, rng), 0.8, rng);
  MiningConfig cfg;
  cfg.quality = QualityConfig::for_completeness(0.8);
  for (auto _ : state) benchmark::DoNotOptimize(mine_policy(p.universe, summary, cfg));
}
BENCHMARK(BM_MinePolicy)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SemanticSimilarity(benchmark::State& state) {
  const Policy a = synthetic(static_cast<std::size_t>(state.range(0)));
  const Policy b{a.universe, {a.rules.begin(), a.rules.begin() + static_cast<long>(a.rules.size() / 2)}};
  for (auto _ : state) benchmark::DoNotOptimize(semantic_similarity(a, b));
}
BENCHMARK(BM_SemanticSimilarity)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_SyntacticSimilarity(benchmark::State& state) {
  const Policy a = synthetic(static_cast<std::size_t>(state.range(0)));
  SynthPolicyConfig other;
  other.n_rules = a.rules.size();
  other.seed = 43;
  const Policy b{a.universe, gen_synthetic_policy(other).rules};
  for (auto _ : state) benchmark::DoNotOptimize(syntactic_similarity(a, b));
}
BENCHMARK(BM_SyntacticSimilarity)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace abacmine

BENCHMARK_MAIN();
