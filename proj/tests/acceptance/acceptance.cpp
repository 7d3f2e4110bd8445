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

// Acceptance run: one line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "archref/corpus.hpp"
#include "archref/frontend.hpp"
#include "archref/oracle.hpp"
#include "archref/rules.hpp"
#include "support.hpp"

namespace archref {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Runtime limits in seconds, one per criterion.
constexpr double kLimit[] = {0, 1, 300, 30, 120, 60, 120, 600, 600, 60, 10};

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string read(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fixtures() { return ARCHREF_FIXTURES_DIR; }

std::vector<fs::path> arch_fixtures() {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(fixtures())) {
    if (e.path().extension() == ".arch") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

System single(BehaviorPtr m, const std::string& name = "P") {
  return System{m->inputs(), m->outputs(), {make_component(name, std::move(m))}};
}

// The witness reproduces under the new system and not under the old one.
bool replays(const System& old_system, const System& new_system, const Witness& w) {
  return run(*blackbox(new_system), w.input, w.ticks).count(w.output) > 0 &&
         !membership(*blackbox(old_system), w.input, w.output, w.ticks);
}

// ---------------------------------------------------------------------------

Outcome consistency_fixtures() {
  int checked = 0;
  for (int n = 1; n <= 5; ++n) {
    const auto stem = fixtures() / "consistency" / ("condition" + std::to_string(n));
    auto bad = parse_architecture(read(stem.string() + "_violating.arch"));
    auto good = parse_architecture(read(stem.string() + "_repaired.arch"));
    auto v = check_consistency(bad.require_system());
    if (v.size() != 1 || v[0].condition != n) {
      return {false, "condition " + std::to_string(n) + " violating fixture misreported"};
    }
    if (!check_consistency(good.require_system()).empty()) {
      return {false, "condition " + std::to_string(n) + " repaired fixture flagged"};
    }
    checked += 2;
  }
  return {true, std::to_string(checked) + " fixtures"};
}

Outcome executor_oracle_agreement() {
  std::mt19937_64 rng(2026);
  testing::RandomLimits limits;  // <= 3 components, <= 3 states, |A| <= 2
  std::size_t inputs = 0;
  const int systems = 100;
  for (int n = 0; n < systems; ++n) {
    auto s = testing::random_system(rng, limits);
    auto bb = blackbox(s);
    bool agree = true;
    enumerate_inputs(s.inputs, EnumerationBudget::exhaustive(4, 1),
                     [&](const NamedStreamTuple& in) {
                       ++inputs;
                       agree = run(*bb, in, 4) == blackbox_oracle(s, in, 4);
                       return agree;
                     });
    if (!agree) return {false, "disagreement on system " + std::to_string(n)};
  }
  return {true, std::to_string(systems) + " systems, " + std::to_string(inputs) +
                    " inputs at T=4 L=1"};
}

Outcome time_guardedness() {
  constexpr std::size_t kPairs = 200;
  std::vector<std::pair<std::string, BehaviorPtr>> machines;
  auto m = corpus::build_machines();
  machines = {{"PRE", m.pre},
              {"RDB", m.rdb},
              {"ENC", m.enc},
              {"DEC", m.dec},
              {"RDB_R", m.rdb_r},
              {"corrupted DEC", corpus::corrupted_decoder()},
              {"interleaving DB", corpus::interleaving_database()}};
  std::mt19937_64 rng(7);
  auto alpha = testing::small_alphabet();
  for (int n = 0; n < 50; ++n) {
    ChannelMap in{{"x", alpha}, {"y", alpha}};
    ChannelMap out{{"y", alpha}, {"z", alpha}};
    machines.emplace_back("random " + std::to_string(n),
                          testing::random_machine(rng, "R", in, out, 3));
  }
  std::size_t pairs = 0;
  for (const auto& [name, machine] : machines) {
    auto report = check_time_guardedness(*machine, kPairs, 4, 1, 11);
    pairs += report.pairs_checked;
    if (!report.ok()) return {false, name + " reported as not guarded"};
    if (report.pairs_checked < kPairs) return {false, name + ": too few pairs"};
  }
  auto echo = check_time_guardedness(testing::instantaneous_echo("x", "y"),
                                     {{"x", alpha}}, kPairs, 4, 1, 11);
  if (echo.ok()) return {false, "instantaneous echo not caught"};
  return {true, std::to_string(machines.size()) + " machines, " + std::to_string(pairs) +
                    " pairs, echo caught"};
}

Outcome structure_rules() {
  const auto budget = EnumerationBudget::exhaustive(5, 1);
  // Small corpus alphabets keep T=5 exhaustive.
  const corpus::Config cfg{1, 2};
  const auto ch = corpus::channels(cfg);
  const auto s0 = corpus::initial_system(cfg);

  struct Case {
    std::string rule;
    System before;
    System after;
  };
  std::vector<Case> cases;
  auto with_enc = add_component(s0, "ENC").system;
  auto with_d = add_output_channel(with_enc, "ENC", "D", ch.at("D")).system;
  auto with_i = add_input_channel(with_d, "ENC", "I").system;
  cases.push_back({"add-component", s0, with_enc});
  cases.push_back({"add-output-channel", with_enc, with_d});
  cases.push_back({"add-input-channel", with_d, with_i});
  cases.push_back({"remove-input-channel",
                   with_i, remove_input_channel(with_i, "ENC", "I", CheckMode::bounded(3)).system});
  cases.push_back({"remove-output-channel", with_d,
                   remove_output_channel(with_d, "ENC", "D").system});
  cases.push_back({"remove-component", with_enc, remove_component(with_enc, "ENC").system});
  auto folded = fold(s0, {"PRE", "RDB"}, "ALL").system;
  cases.push_back({"fold", s0, folded});
  cases.push_back({"expand", folded, expand(folded, "ALL").system});
  cases.push_back({"rename-channel", s0, rename_channel(s0, "I", "J").system});

  // A second fixture family over the two-letter alphabet.
  auto alpha = testing::small_alphabet();
  System chain{{{"x", alpha}},
               {{"z", alpha}},
               {make_component("A", testing::unit_delay("A", "x", "y", alpha)),
                make_component("B", testing::unit_delay("B", "y", "z", alpha))}};
  auto chain_fold = fold(chain, {"A", "B"}, "AB").system;
  cases.push_back({"fold", chain, chain_fold});
  cases.push_back({"expand", chain_fold, expand(chain_fold, "AB").system});
  cases.push_back({"rename-channel", chain, rename_channel(chain, "y", "w").system});

  for (const auto& c : cases) {
    auto v = check_trace_equality(c.before, c.after, budget);
    if (!v.holds()) return {false, c.rule + ": " + to_string(v.status) + " " + v.coverage};
  }
  return {true, std::to_string(cases.size()) + " rule applications, equal at T=5 L=1"};
}

Outcome behavioral_refinement() {
  constexpr Symbol a = 0, b = 1;
  auto alpha = testing::small_alphabet();
  const std::vector<Interval> all{{a}, {b}, {}};
  auto coarse = single(testing::chooser("P", "y", alpha, all));
  // Every nonempty subset of the options is a submachine.
  int refined = 0;
  for (unsigned mask = 1; mask < 8; ++mask) {
    std::vector<Interval> options;
    for (unsigned k = 0; k < 3; ++k) {
      if (mask & (1u << k)) options.push_back(all[k]);
    }
    auto r = refine_behavior(coarse, "P", testing::chooser("P", "y", alpha, options),
                             CheckMode::syntactic());
    if (!check_trace_inclusion(coarse, r.system, EnumerationBudget::exhaustive(4)).holds()) {
      return {false, "submachine refinement not included"};
    }
    ++refined;
  }

  auto narrow = single(testing::chooser("P", "y", alpha, {{a}}));
  auto mutant = testing::chooser("P", "y", alpha, {{a}, {b}});
  try {
    refine_behavior(narrow, "P", mutant, CheckMode::bounded(2));
    return {false, "emit-extending mutant accepted"};
  } catch (const RuleRejection& e) {
    const auto& w = e.obligation().counterexample;
    if (!w || w->ticks > 2) return {false, "rejection without a witness at T<=2"};
    // The component witness replays at system level too: one component, same interface.
    if (!replays(narrow, single(mutant), *w)) return {false, "witness does not replay"};
  }
  return {true, std::to_string(refined) + " submachines included, mutant rejected"};
}

Outcome roundtrip_theorem() {
  constexpr std::size_t kKeys = 2, kData = 4, kMaxLength = 6, kDatabases = 1000;
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> cell(-1, kData - 1);
  std::vector<corpus::Database> databases;
  for (std::size_t k = 0; k < kDatabases; ++k) {
    std::vector<corpus::Datum> cells;
    for (std::size_t key = 0; key < kKeys; ++key) {
      int v = cell(rng);
      cells.push_back(v < 0 ? corpus::Datum{} : corpus::Datum(static_cast<std::uint16_t>(v)));
    }
    databases.emplace_back(std::move(cells));
  }
  std::size_t sequences = 0, failures = 0;
  corpus::Entries x;
  std::function<void()> extend = [&] {
    ++sequences;
    for (const auto& m : databases) {
      if (corpus::rho_star(m, corpus::delta_star(m, x, kData), kData) != x) ++failures;
    }
    if (x.size() == kMaxLength) return;
    for (std::uint16_t key = 0; key < kKeys; ++key) {
      for (std::uint16_t d = 0; d < kData; ++d) {
        x.push_back({key, d});
        extend();
        x.pop_back();
      }
    }
  };
  extend();
  return {failures == 0, std::to_string(sequences) + " sequences x " +
                             std::to_string(kDatabases) + " databases, " +
                             std::to_string(failures) + " failures"};
}

Outcome eight_step_replay() {
  const auto arch = fixtures() / "db_initial.arch";
  const auto script = fixtures() / "delta_refactor.script";
#ifdef ARCHREF_CLI
  const std::string cmd = std::string("\"") + ARCHREF_CLI + "\" refine \"" + arch.string() +
                          "\" \"" + script.string() + "\" --mode bounded --depth 6 > /dev/null";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    return {false, "cli exit status " + std::to_string(WEXITSTATUS(status))};
  }
#else
  return {false, "built without the command line tool"};
#endif

  auto doc = parse_architecture(read(arch), arch.string());
  auto steps = parse_script(read(script), script.string());
  auto r = apply_script(doc.require_system(), steps, doc.rule_context(CheckMode::bounded(6)));
  if (!r.ledger.all_discharged()) return {false, "obligations left open"};
  std::size_t bounded = 0;
  for (const auto& o : r.ledger.entries()) {
    if (o.discharge == "syntactic") continue;
    const bool invariant_premise = o.rule == "refine-behavior-with-invariant" &&
                                   o.premise.find("roundtrip(l)") != std::string::npos;
    if (!invariant_premise || o.discharge.find("T=6") == std::string::npos ||
        o.discharge.find("L=1") == std::string::npos) {
      return {false, "step " + std::to_string(o.step) + " discharged by " + o.discharge};
    }
    ++bounded;
  }
  if (bounded != 2) return {false, std::to_string(bounded) + " bounded premises"};
  const auto expected = corpus::expected_shapes();
  if (r.trail.size() != expected.size()) return {false, "trail length differs"};
  for (std::size_t k = 0; k < expected.size(); ++k) {
    if (corpus::shape_of(r.trail[k]) != expected[k]) {
      return {false, "shape differs after step " + std::to_string(k + 1)};
    }
  }
  return {true, std::to_string(r.ledger.entries().size()) +
                    " obligations, 2 bounded at T=6 L=1, exit 0, shapes match"};
}

Outcome end_to_end() {
  auto initial = corpus::initial_system();
  auto r = apply_script(initial, corpus::eight_step_script(),
                        corpus::rule_context({}, CheckMode::bounded(6)));
  const auto budget = EnumerationBudget::exhaustive(5, 1);
  auto v = check_trace_inclusion(initial, r.system, budget);
  if (!v.holds()) return {false, "final system: " + to_string(v.status) + " " + v.coverage};

  // Mutant: the unfolded pipeline with a decoder that corrupts data.
  auto mutant = r.trail[10];
  mutant.find("DEC")->behavior = corpus::corrupted_decoder();
  auto m = check_trace_inclusion(initial, mutant, budget);
  if (!m.fails() || !m.witness) return {false, "corrupted DEC not rejected"};
  if (!replays(initial, mutant, *m.witness)) return {false, "mutant witness does not replay"};
  return {true, "inclusion holds (" + v.coverage + "), mutant fails at tick " +
                    std::to_string(m.witness->ticks)};
}

Outcome transitivity() {
  constexpr Symbol a = 0, b = 1;
  auto alpha = testing::small_alphabet();
  System s0{{},
            {{"z", alpha}},
            {make_component("P", testing::chooser("P", "y", alpha, {{a}, {b}, {}})),
             make_component("Q", testing::unit_delay("Q", "y", "z", alpha))}};
  const auto mode = CheckMode::bounded(4);
  auto s1 = refine_behavior(s0, "P", testing::chooser("P", "y", alpha, {{a}, {b}}), mode).system;
  auto s2 = refine_behavior(s1, "P", testing::chooser("P", "y", alpha, {{b}}), mode).system;
  const auto budget = EnumerationBudget::exhaustive(5, 1);
  if (!check_trace_inclusion(s0, s2, budget).holds()) return {false, "chooser chain"};
  if (check_trace_inclusion(s2, s0, budget).holds()) return {false, "chain is not strict"};

  // Two accepted corpus steps: decoder behavior, then the invariant step.
  auto trail = apply_script(corpus::initial_system(), corpus::eight_step_script(),
                            corpus::rule_context({}, CheckMode::bounded(4)))
                   .trail;
  if (!check_trace_inclusion(trail[6], trail[9], EnumerationBudget::exhaustive(4)).holds()) {
    return {false, "corpus chain"};
  }
  return {true, "chooser chain and corpus steps 4 to 6 included end to end"};
}

Outcome frontend_roundtrip() {
  std::size_t texts = 0;
  auto roundtrip = [&](const System& s) {
    const auto text = emit_canonical(s);
    auto again = parse_architecture(text, "canonical.arch");
    ++texts;
    return emit_canonical(again.require_system()) == text &&
           structurally_equal(again.require_system(), s);
  };
  for (const auto& path : arch_fixtures()) {
    auto doc = parse_architecture(read(path), path.string());
    const auto text = emit_canonical(doc);
    if (emit_canonical(parse_architecture(text, path.string())) != text) {
      return {false, path.filename().string() + " does not round-trip"};
    }
    if (!roundtrip(doc.require_system())) return {false, path.filename().string()};
    testing::parse_dot(emit_dot(doc.require_system()));
  }
  auto json = document_from_json(read(fixtures() / "db_initial.json"));
  if (!roundtrip(json.require_system())) return {false, "db_initial.json"};
  auto r = apply_script(corpus::initial_system(), corpus::eight_step_script(),
                        corpus::rule_context({}, CheckMode::syntactic()));
  for (const auto& s : r.trail) {
    if (!roundtrip(s)) return {false, "refactoring trail system"};
    testing::parse_dot(emit_dot(s));
  }
  return {true, std::to_string(texts) + " systems, dot parses"};
}

}  // namespace
}  // namespace archref

int main() {
  using namespace archref;
  const std::vector<std::function<Outcome()>> criteria = {
      consistency_fixtures, executor_oracle_agreement, time_guardedness,
      structure_rules,      behavioral_refinement,     roundtrip_theorem,
      eight_step_replay,    end_to_end,                transitivity,
      frontend_roundtrip};
  int failed = 0;
  for (std::size_t n = 1; n <= criteria.size(); ++n) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[n - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = seconds < kLimit[n];
    const bool pass = o.ok && in_time;
    if (!pass) ++failed;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2f s, limit %.0f s", seconds, kLimit[n]);
    std::cout << "criterion " << n << ": " << (pass ? "PASS" : "FAIL") << " (" << o.detail
              << "; " << timing << (in_time ? "" : ", over time") << ")" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
