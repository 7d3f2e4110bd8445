/*
 * Copyright (c) 2026, The archref Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "archref/corpus.hpp"
#include "archref/frontend.hpp"
#include "archref/oracle.hpp"
#include "archref/rules.hpp"

namespace archref {
namespace {

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void BM_EnumerateInputs(benchmark::State& state) {
  const auto channels = corpus::channels();
  ChannelMap in{{"In", channels.at("In")}, {"Key", channels.at("Key")}};
  const auto budget = EnumerationBudget::exhaustive(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    std::size_t count = 0;
    enumerate_inputs(in, budget, [&](const NamedStreamTuple&) { return ++count, true; });
    benchmark::DoNotOptimize(count);
  }
}
BENCHMARK(BM_EnumerateInputs)->DenseRange(1, 3);

void BM_RunCorpus(benchmark::State& state) {
  const auto ticks = static_cast<std::size_t>(state.range(0));
  auto bb = blackbox(corpus::initial_system());
  auto inputs = enumerate_inputs(bb->inputs(), EnumerationBudget::sampled(ticks, 64, 3));
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(*bb, inputs[k++ % inputs.size()], ticks));
  }
}
BENCHMARK(BM_RunCorpus)->Arg(4)->Arg(8)->Arg(16);

void BM_BlackboxOracle(benchmark::State& state) {
  const auto ticks = static_cast<std::size_t>(state.range(0));
  auto s = corpus::initial_system();
  auto inputs = enumerate_inputs(s.inputs, EnumerationBudget::sampled(ticks, 64, 5));
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(blackbox_oracle(s, inputs[k++ % inputs.size()], ticks));
  }
}
BENCHMARK(BM_BlackboxOracle)->Arg(2)->Arg(4);

void BM_TraceInclusion(benchmark::State& state) {
  auto initial = corpus::initial_system();
  auto final_system = apply_script(initial, corpus::eight_step_script(),
                                   corpus::rule_context({}, CheckMode::syntactic()))
                          .system;
  const auto budget = EnumerationBudget::exhaustive(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_trace_inclusion(initial, final_system, budget));
  }
}
BENCHMARK(BM_TraceInclusion)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_CodecRoundtrip(benchmark::State& state) {
  std::mt19937_64 rng(9);
  corpus::Entries x(static_cast<std::size_t>(state.range(0)));
  for (auto& e : x) {
    e.key = static_cast<std::uint16_t>(rng() % 2);
    e.datum = static_cast<std::uint16_t>(rng() % 4);
  }
  corpus::Database m(std::vector<corpus::Datum>{1, std::nullopt});
  for (auto _ : state) {
    benchmark::DoNotOptimize(corpus::rho_star(m, corpus::delta_star(m, x, 4), 4));
  }
}
BENCHMARK(BM_CodecRoundtrip)->Arg(6)->Arg(64)->Arg(1024);

void BM_ParseCorpus(benchmark::State& state) {
  const auto text = read(std::string(ARCHREF_FIXTURES_DIR) + "/db_initial.arch");
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_architecture(text));
  }
}
BENCHMARK(BM_ParseCorpus);

void BM_ReplayScript(benchmark::State& state) {
  auto initial = corpus::initial_system();
  auto steps = corpus::eight_step_script();
  auto context = corpus::rule_context({}, CheckMode::syntactic());
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_script(initial, steps, context));
  }
}
BENCHMARK(BM_ReplayScript);

}  // namespace
}  // namespace archref

BENCHMARK_MAIN();
