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

#include "archref/errors.hpp"
#include "archref/machine.hpp"
#include "support.hpp"

namespace archref {
namespace {

using testing::all_inputs;
using testing::chooser;
using testing::small_alphabet;
using testing::tuple;
using testing::unit_delay;

constexpr Symbol a = 0, b = 1;

TEST(Run, UnitDelayShiftsByOneTick) {
  auto m = unit_delay("Id", "I", "O", small_alphabet());
  auto out = run(*m, tuple({{"I", {{a}, {}}}}, 2), 2);
  EXPECT_EQ(out, (std::set<NamedStreamTuple>{tuple({{"O", {{}, {a}}}}, 2)}));
}

TEST(Run, TrivialBehaviorGivesEmptyTuple) {
  auto out = run(*trivial_behavior(), NamedStreamTuple(3), 3);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(out.begin()->domain().empty());
  EXPECT_EQ(out.begin()->tick_len(), 3u);
}

TEST(Run, CountsInitialEmitOptions) {
  auto m = chooser("M", "y", small_alphabet(), {{a}, {b}});
  EXPECT_EQ(run(*m, NamedStreamTuple(1), 1).size(), 2u);
  EXPECT_EQ(run(*m, NamedStreamTuple(3), 3).size(), 8u);
}

TEST(Run, InterfaceMismatchThrows) {
  auto m = unit_delay("Id", "I", "O", small_alphabet());
  EXPECT_THROW(run(*m, tuple({{"J", {{a}}}}, 1), 1), InterfaceError);
  EXPECT_THROW(membership(*m, tuple({{"J", {{a}}}}, 1), tuple({{"O", {{}}}}, 1), 1),
               InterfaceError);
}

TEST(Membership, SoundForRunOutputs) {
  auto m = unit_delay("Id", "I", "O", small_alphabet());
  auto in = tuple({{"I", {{a}, {b}, {}}}}, 3);
  for (const auto& o : run(*m, in, 3)) EXPECT_TRUE(membership(*m, in, o, 3));
}

TEST(Membership, IdentityRejectsWrongFirstTick) {
  auto m = unit_delay("Id", "I", "O", small_alphabet());
  EXPECT_FALSE(membership(*m, tuple({{"I", {{a}}}}, 1), tuple({{"O", {{b}}}}, 1), 1));
  EXPECT_TRUE(membership(*m, tuple({{"I", {{a}}}}, 1), tuple({{"O", {{}}}}, 1), 1));
}

TEST(Membership, ChaoticChannelsMatchAnything) {
  auto base = chooser("M", "y", small_alphabet(), {{a}});
  auto m = with_chaotic_outputs(base, {{"p", small_alphabet()}});
  EXPECT_EQ(m->chaotic(), ChannelSet{"p"});
  auto out = tuple({{"y", {{a}, {a}}}, {"p", {{b, b, a}, {}}}}, 2);
  EXPECT_TRUE(membership(*m, NamedStreamTuple(2), out, 2));
  EXPECT_TRUE(membership(*m, NamedStreamTuple(2), restrict(out, {"y"}), 2));
  auto runs = run(*m, NamedStreamTuple(2), 2);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs.begin()->domain(), ChannelSet{"y"});
}

// o in run(m, i) exactly when membership(m, i, o), over every output tuple.
TEST(Membership, AgreesWithRunExhaustively) {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 25; ++n) {
    auto alpha = small_alphabet(1 + n % 2);
    ChannelMap ins{{"i", alpha}};
    ChannelMap outs{{"o", alpha}};
    if (n % 3 == 0) outs["q"] = alpha;
    auto m = testing::random_machine(rng, "M", ins, outs, 3);
    const std::size_t T = 3;
    auto candidates = all_inputs(outs, T, 1);
    for (const auto& in : all_inputs(ins, T, 1)) {
      auto runs = run(*m, in, T);
      EXPECT_FALSE(runs.empty());
      for (const auto& o : candidates) {
        ASSERT_EQ(runs.count(o) == 1, membership(*m, in, o, T)) << "machine " << n;
      }
    }
  }
}

TEST(Adapt, IdentityKeepsRuns) {
  auto m = unit_delay("Id", "I", "O", small_alphabet());
  auto same = adapt_interface(m, m->inputs(), m->output_names());
  for (const auto& in : all_inputs(m->inputs(), 3, 1)) {
    EXPECT_EQ(run(*same, in, 3), run(*m, in, 3));
  }
}

TEST(Adapt, AddedInputIsIgnored) {
  auto alpha = small_alphabet();
  auto m = unit_delay("Id", "I", "O", alpha);
  auto wide = adapt_interface(m, {{"I", alpha}, {"X", alpha}}, {"O"});
  EXPECT_EQ(wide->input_names(), (ChannelSet{"I", "X"}));
  for (const auto& in : all_inputs(wide->inputs(), 3, 1)) {
    EXPECT_EQ(run(*wide, in, 3), run(*m, restrict(in, {"I"}), 3));
  }
  EXPECT_EQ(wide->reads(), ChannelSet{"I"});
}

TEST(Adapt, DroppedOutputIsRestrictedAway) {
  std::mt19937_64 rng(3);
  auto alpha = small_alphabet();
  ChannelMap ins{{"I", alpha}}, outs{{"D", alpha}, {"O", alpha}};
  for (int n = 0; n < 10; ++n) {
    auto m = testing::random_machine(rng, "M", ins, outs, 3);
    auto narrow = adapt_interface(m, ins, {"O"});
    for (const auto& in : all_inputs(ins, 3, 1)) {
      std::set<NamedStreamTuple> expected;
      for (const auto& o : run(*m, in, 3)) expected.insert(restrict(o, {"O"}));
      EXPECT_EQ(run(*narrow, in, 3), expected);
    }
  }
}

TEST(Adapt, PreconditionsAreChecked) {
  auto alpha = small_alphabet();
  auto m = unit_delay("Id", "I", "O", alpha);
  EXPECT_THROW(adapt_interface(m, {}, {"O"}), AdaptionError);
  EXPECT_THROW(adapt_interface(m, m->inputs(), {"O", "Z"}), AdaptionError);
}

TEST(Adapt, TwoStepsEqualOneStep) {
  std::mt19937_64 rng(5);
  auto alpha = small_alphabet();
  ChannelMap ins{{"I", alpha}}, outs{{"D", alpha}, {"E", alpha}, {"O", alpha}};
  ChannelMap wide{{"I", alpha}, {"X", alpha}, {"Y", alpha}};
  for (int n = 0; n < 5; ++n) {
    auto m = testing::random_machine(rng, "M", ins, outs, 3);
    auto once = adapt_interface(m, wide, {"O"});
    auto twice = adapt_interface(
        adapt_interface(m, {{"I", alpha}, {"X", alpha}}, {"E", "O"}), wide, {"O"});
    EXPECT_TRUE(structurally_equal(*once, *twice));
    for (const auto& in : all_inputs(wide, 2, 1)) {
      EXPECT_EQ(run(*once, in, 2), run(*twice, in, 2));
    }
  }
}

TEST(Views, RenameRoundTripCancels) {
  auto m = unit_delay("Id", "I", "O", small_alphabet());
  auto renamed = with_renamed_channel(m, "I", "J");
  EXPECT_EQ(renamed->input_names(), ChannelSet{"J"});
  auto back = with_renamed_channel(renamed, "J", "I");
  EXPECT_TRUE(structurally_equal(*back, *m));
}

TEST(Views, HiddenInputReadsEmpty) {
  auto m = unit_delay("Id", "I", "O", small_alphabet());
  auto blind = with_hidden_inputs(m, {"I"});
  EXPECT_TRUE(blind->inputs().empty());
  EXPECT_EQ(run(*blind, NamedStreamTuple(3), 3),
            run(*m, tuple({{"I", {{}, {}, {}}}}, 3), 3));
}

TEST(Guardedness, MooreMachinesHaveNoViolations) {
  auto m = unit_delay("Id", "I", "O", small_alphabet());
  auto report = check_time_guardedness(*m, 200, 4);
  EXPECT_GE(report.pairs_checked, 200u);
  EXPECT_TRUE(report.ok());
}

TEST(Guardedness, TrivialBehaviorHasNoViolations) {
  EXPECT_TRUE(check_time_guardedness(*trivial_behavior(), 50, 3).ok());
}

TEST(Guardedness, InstantaneousEchoIsCaughtAtTickZero) {
  auto alpha = small_alphabet();
  auto report = check_time_guardedness(testing::instantaneous_echo("I", "O"),
                                       {{"I", alpha}}, 200, 3);
  ASSERT_FALSE(report.ok());
  bool at_zero = false;
  for (const auto& v : report.violations) {
    at_zero = at_zero || v.shared_ticks == 0;
    EXPECT_EQ(truncate(v.x, v.shared_ticks), truncate(v.y, v.shared_ticks));
  }
  EXPECT_TRUE(at_zero);
}

TEST(Submachine, Reflexive) {
  std::mt19937_64 rng(9);
  auto alpha = small_alphabet();
  auto m = testing::random_machine(rng, "M", {{"I", alpha}}, {{"O", alpha}}, 3);
  EXPECT_TRUE(submachine_refines(*m, *m));
}

TEST(Submachine, DroppedEmitOptionRefines) {
  auto alpha = small_alphabet();
  auto coarse = chooser("M", "y", alpha, {{a}, {b}, {}});
  auto fine = chooser("M", "y", alpha, {{a}, {}});
  EXPECT_TRUE(submachine_refines(*fine, *coarse));
  EXPECT_FALSE(submachine_refines(*coarse, *fine));
}

TEST(Submachine, UnrelatedMachinesDoNotRefine) {
  auto alpha = small_alphabet();
  auto ma = chooser("M", "y", alpha, {{a}});
  auto mb = chooser("M", "y", alpha, {{b}});
  EXPECT_FALSE(submachine_refines(*ma, *mb));
  EXPECT_FALSE(submachine_refines(*mb, *ma));
}

TEST(Submachine, InterfaceMismatchThrows) {
  auto alpha = small_alphabet();
  EXPECT_THROW(submachine_refines(*chooser("M", "y", alpha, {{a}}),
                                  *chooser("M", "z", alpha, {{a}})),
               InterfaceError);
}

// Sound: a positive answer implies run-set inclusion on every input.
TEST(Submachine, ImpliesTraceInclusion) {
  std::mt19937_64 rng(21);
  auto alpha = small_alphabet();
  ChannelMap ins{{"I", alpha}}, outs{{"O", alpha}};
  int positives = 0;
  for (int n = 0; n < 300; ++n) {
    auto fine = testing::random_machine(rng, "F", ins, outs, 2);
    auto coarse = testing::random_machine(rng, "C", ins, outs, 2);
    if (submachine_refines(*fine, *coarse)) {
      ++positives;
      EXPECT_TRUE(testing::brute_inclusion(*fine, *coarse, 4, 1)) << "pair " << n;
    }
  }
  EXPECT_GT(positives, 0);
}

TEST(Table, RejectsMalformedDefinitions) {
  auto alpha = small_alphabet();
  EXPECT_THROW(TableMachine("M", {}, {{"y", alpha}}, {}, {}, "s"), DefinitionError);
  TableState s{"s", {}, {}};
  EXPECT_THROW(TableMachine("M", {}, {{"y", alpha}}, {}, {s}, "s"), DefinitionError);
  s.emits.push_back({});
  EXPECT_THROW(TableMachine("M", {}, {{"y", alpha}}, {}, {s}, "t"), DefinitionError);
}

}  // namespace
}  // namespace archref
