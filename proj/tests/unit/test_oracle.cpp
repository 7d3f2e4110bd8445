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

#include <gtest/gtest.h>

#include "archref/corpus.hpp"
#include "archref/errors.hpp"
#include "archref/oracle.hpp"
#include "archref/rules.hpp"
#include "support.hpp"

namespace archref {
namespace {

using testing::chooser;
using testing::small_alphabet;

constexpr Symbol a = 0, b = 1;

System single(BehaviorPtr m) {
  return System{m->inputs(), m->outputs(), {make_component("P", std::move(m))}};
}

// The corpus after the first `count` rule applications.
System corpus_after(std::size_t count) {
  auto steps = corpus::eight_step_script();
  steps.resize(count);
  return apply_script(corpus::initial_system(), steps,
                      corpus::rule_context({}, CheckMode::bounded(3)))
      .system;
}

void expect_replays(const System& old_system, const System& new_system, const Verdict& v) {
  ASSERT_TRUE(v.fails());
  ASSERT_TRUE(v.witness);
  const auto& w = *v.witness;
  auto produced = run(*blackbox(new_system), w.input, w.ticks);
  EXPECT_TRUE(produced.count(w.output));
  EXPECT_FALSE(membership(*blackbox(old_system), w.input, w.output, w.ticks));
}

TEST(Enumerate, SingleSymbolTwoTicks) {
  ChannelMap ch{{"c", small_alphabet(1)}};
  auto all = enumerate_inputs(ch, EnumerationBudget::exhaustive(2, 1));
  EXPECT_EQ(all.size(), 4u);
  EXPECT_EQ(std::set<NamedStreamTuple>(all.begin(), all.end()).size(), 4u);
}

TEST(Enumerate, ZeroBoundGivesSilence) {
  ChannelMap ch{{"c", small_alphabet(2)}, {"d", small_alphabet(2)}};
  auto all = enumerate_inputs(ch, EnumerationBudget::exhaustive(3, 0));
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0], silent_tuple({"c", "d"}, 3));
}

TEST(Enumerate, MatchesClosedFormAndReference) {
  for (std::size_t channels = 0; channels <= 2; ++channels) {
    for (std::size_t size = 1; size <= 3; ++size) {
      for (std::size_t bound = 0; bound <= 2; ++bound) {
        for (std::size_t ticks = 1; ticks <= 3; ++ticks) {
          ChannelMap ch;
          for (std::size_t k = 0; k < channels; ++k) {
            ch["c" + std::to_string(k)] = small_alphabet(size);
          }
          if (testing::closed_form_count(ch, ticks, bound) > 20000) continue;
          auto budget = EnumerationBudget::exhaustive(ticks, bound);
          auto all = enumerate_inputs(ch, budget);
          std::set<NamedStreamTuple> unique(all.begin(), all.end());
          EXPECT_EQ(unique.size(), all.size());
          EXPECT_EQ(all.size(), testing::closed_form_count(ch, ticks, bound));
          EXPECT_EQ(input_space_size(ch, budget), all.size());
          auto ref = testing::all_inputs(ch, ticks, bound);
          EXPECT_EQ(unique, std::set<NamedStreamTuple>(ref.begin(), ref.end()));
        }
      }
    }
  }
}

TEST(Enumerate, SampledIsReproducible) {
  ChannelMap ch{{"c", small_alphabet(2)}};
  auto budget = EnumerationBudget::sampled(4, 5, 42);
  auto first = enumerate_inputs(ch, budget);
  auto second = enumerate_inputs(ch, budget);
  EXPECT_EQ(first.size(), 5u);
  EXPECT_EQ(first, second);
  for (const auto& x : first) EXPECT_EQ(x.tick_len(), 4u);
}

TEST(Enumerate, CeilingRaisesBudgetError) {
  ChannelMap ch{{"c", small_alphabet(2)}, {"d", small_alphabet(2)}};
  auto budget = EnumerationBudget::exhaustive(8, 1);
  budget.ceiling = 1000;
  EXPECT_THROW(enumerate_inputs(ch, budget), BudgetError);
}

TEST(Enumerate, VisitorStopsEarly) {
  ChannelMap ch{{"c", small_alphabet(2)}};
  std::size_t seen = 0;
  enumerate_inputs(ch, EnumerationBudget::exhaustive(3, 1), [&](const NamedStreamTuple&) {
    return ++seen < 5;
  });
  EXPECT_EQ(seen, 5u);
}

TEST(Inclusion, Reflexive) {
  auto s = corpus::initial_system();
  EXPECT_TRUE(check_trace_inclusion(s, s, EnumerationBudget::exhaustive(3)).holds());
}

TEST(Inclusion, ChaosIsTop) {
  auto alpha = small_alphabet();
  auto top = single(with_chaotic_outputs(trivial_behavior(), {{"y", alpha}}));
  auto some = single(chooser("P", "y", alpha, {{a}, {b, b}}));
  EXPECT_TRUE(check_trace_inclusion(top, some, EnumerationBudget::exhaustive(3, 2)).holds());
  EXPECT_TRUE(check_trace_inclusion(some, top, EnumerationBudget::exhaustive(3)).fails());
}

TEST(Inclusion, InterfaceMismatchThrows) {
  auto alpha = small_alphabet();
  EXPECT_THROW(check_trace_inclusion(single(chooser("P", "y", alpha, {{a}})),
                                     single(chooser("P", "z", alpha, {{a}})),
                                     EnumerationBudget::exhaustive(2)),
               InterfaceError);
}

TEST(Inclusion, AgreesWithBruteForce) {
  std::mt19937_64 rng(99);
  testing::RandomLimits limits;
  limits.max_components = 2;
  limits.max_system_inputs = 1;
  int failures = 0;
  for (int n = 0; n < 40; ++n) {
    auto old_system = testing::random_system(rng, limits);
    // Same interface, fresh behaviors.
    auto new_system = old_system;
    for (auto& c : new_system.components) {
      c.behavior = testing::random_machine(rng, c.name, c.inputs, c.outputs, 2);
    }
    auto v = check_trace_inclusion(old_system, new_system, EnumerationBudget::exhaustive(3));
    ASSERT_FALSE(v.inconclusive());
    EXPECT_EQ(v.holds(), testing::brute_system_inclusion(old_system, new_system, 3, 1))
        << "pair " << n;
    if (v.fails()) {
      ++failures;
      expect_replays(old_system, new_system, v);
    }
  }
  EXPECT_GT(failures, 0);
}

TEST(Inclusion, FailureIsMonotoneInBudget) {
  auto alpha = small_alphabet();
  auto old_system = single(chooser("P", "y", alpha, {{a}, {}}));
  auto new_system = single(chooser("P", "y", alpha, {{a}, {b}}));
  for (std::size_t t = 1; t <= 4; ++t) {
    for (std::size_t l = 1; l <= 2; ++l) {
      auto v = check_trace_inclusion(old_system, new_system, EnumerationBudget::exhaustive(t, l));
      expect_replays(old_system, new_system, v);
    }
  }
}

TEST(Equality, AddComponentKeepsTraces) {
  auto s = corpus::initial_system();
  auto r = add_component(s, "ENC");
  EXPECT_TRUE(check_trace_equality(s, r.system, EnumerationBudget::exhaustive(3)).holds());
}

TEST(Equality, ShrinkingNondeterminismIsInclusionOnly) {
  auto alpha = small_alphabet();
  auto wide = single(chooser("P", "y", alpha, {{a}, {b}}));
  auto narrow = refine_behavior(wide, "P", chooser("P", "y", alpha, {{a}}),
                                CheckMode::syntactic())
                    .system;
  auto budget = EnumerationBudget::exhaustive(3);
  EXPECT_TRUE(check_trace_inclusion(wide, narrow, budget).holds());
  EXPECT_TRUE(check_trace_equality(wide, narrow, budget).fails());
}

TEST(Equality, FoldKeepsCorpusTraces) {
  auto s = corpus::initial_system();
  auto folded = fold(s, {"PRE", "RDB"}, "ALL").system;
  EXPECT_TRUE(check_trace_equality(s, folded, EnumerationBudget::exhaustive(4)).holds());
}

TEST(InvariantValidity, TrueHoldsVacuously) {
  auto v = check_invariant_validity(corpus::initial_system(), true_invariant(),
                                    EnumerationBudget::exhaustive(3));
  EXPECT_TRUE(v.holds());
}

TEST(InvariantValidity, CorpusRoundtripHoldsAfterStepFive) {
  auto s = corpus_after(9);
  auto v = check_invariant_validity(s, corpus::psi_invariant(), EnumerationBudget::exhaustive(6));
  EXPECT_TRUE(v.holds()) << v.coverage;
}

TEST(InvariantValidity, CorruptedDecoderBreaksRoundtrip) {
  auto s = corpus_after(9);
  s.find("DEC")->behavior = corpus::corrupted_decoder();
  auto psi = corpus::psi_invariant();
  auto v = check_invariant_validity(s, psi, EnumerationBudget::exhaustive(6));
  ASSERT_TRUE(v.fails());
  ASSERT_TRUE(v.witness);
  EXPECT_FALSE(psi(restrict(v.witness->flow, psi.domain)));
}

TEST(InvariantValidity, BudgetExhaustionIsInconclusive) {
  auto s = corpus_after(9);
  auto budget = EnumerationBudget::exhaustive(6);
  budget.ceiling = 50;
  EXPECT_TRUE(check_invariant_validity(s, corpus::psi_invariant(), budget).inconclusive());
}

TEST(ValidateInvariant, InputRestrictionIsRejected) {
  auto s = corpus::initial_system();
  auto v = validate_invariant(s, empty_invariant("quiet", "In"), EnumerationBudget::exhaustive(2));
  EXPECT_TRUE(v.fails());
}

TEST(ValidateInvariant, InternalChannelInvariantPasses) {
  auto s = corpus_after(9);
  auto v = validate_invariant(s, corpus::psi_invariant(), EnumerationBudget::exhaustive(2));
  EXPECT_TRUE(v.holds());
}

TEST(ValidateInvariant, ForeignChannelThrows) {
  auto s = corpus::initial_system();
  EXPECT_THROW(validate_invariant(s, empty_invariant("x", "Nowhere"),
                                  EnumerationBudget::exhaustive(2)),
               InterfaceError);
}

TEST(RefinementUnderInvariant, SameBehaviorHolds) {
  auto s = corpus_after(9);
  auto v = check_refinement_under_invariant(s, "RDB", *s.find("RDB")->behavior,
                                            corpus::psi_invariant(),
                                            EnumerationBudget::exhaustive(3));
  EXPECT_TRUE(v.holds());
}

TEST(RefinementUnderInvariant, CorpusReplacementHoldsUnderRoundtrip) {
  auto s = corpus_after(9);
  auto v = check_refinement_under_invariant(s, "RDB", *corpus::build_machines().rdb_r,
                                            corpus::psi_invariant(),
                                            EnumerationBudget::exhaustive(4));
  EXPECT_TRUE(v.holds()) << v.coverage;
}

TEST(RefinementUnderInvariant, CorpusReplacementFailsUnderTrue) {
  auto s = corpus_after(9);
  auto v = check_refinement_under_invariant(s, "RDB", *corpus::build_machines().rdb_r,
                                            true_invariant(), EnumerationBudget::exhaustive(4));
  ASSERT_TRUE(v.fails());
  ASSERT_TRUE(v.witness);
  const auto& flow = v.witness->flow;
  ASSERT_TRUE(flow.contains("I") && flow.contains("R"));
  EXPECT_FALSE(corpus::psi_invariant()(restrict(flow, corpus::psi_invariant().domain)));
}

}  // namespace
}  // namespace archref
