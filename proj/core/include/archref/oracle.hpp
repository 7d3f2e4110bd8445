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

#ifndef ARCHREF_ORACLE_HPP_
#define ARCHREF_ORACLE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "archref/invariant.hpp"
#include "archref/machine.hpp"
#include "archref/system.hpp"

namespace archref {

/// Default search ceiling; ARCHREF_BUDGET_CEILING overrides it.
std::size_t default_budget_ceiling();

struct EnumerationBudget {
  enum class Mode { kExhaustive, kSampled };

  std::size_t depth = 5;           // ticks T
  std::size_t interval_bound = 1;  // messages per interval L
  Mode mode = Mode::kExhaustive;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  /// Largest number of search nodes (or enumerated tuples) allowed.
  std::size_t ceiling = default_budget_ceiling();

  static EnumerationBudget exhaustive(std::size_t depth,
                                      std::size_t interval_bound = 1);
  static EnumerationBudget sampled(std::size_t depth, std::size_t samples,
                                   std::uint64_t seed,
                                   std::size_t interval_bound = 1);
  std::string describe() const;
};

/// Size of the exhaustive input space:
/// ((sum over l <= L of |A|^l) per channel, multiplied) ^ T.
/// Saturates at SIZE_MAX.
std::size_t input_space_size(const ChannelMap& channels,
                             const EnumerationBudget& budget);

/// Calls `visit` on every input tuple of the budget's space (exhaustive) or
/// on `samples` reproducible pseudo-random tuples (sampled). Stops early
/// when `visit` returns false. Throws BudgetError when an exhaustive space
/// exceeds the ceiling.
void enumerate_inputs(const ChannelMap& channels, const EnumerationBudget& budget,
                      const std::function<bool(const NamedStreamTuple&)>& visit);

std::vector<NamedStreamTuple> enumerate_inputs(const ChannelMap& channels,
                                               const EnumerationBudget& budget);

/// A replayable counterexample: feeding `input` for `ticks` ticks, the
/// refined side can produce `output` and the reference side cannot. For
/// invariant checks `flow` holds the offending message flow.
struct Witness {
  NamedStreamTuple input;
  NamedStreamTuple output;
  NamedStreamTuple flow;
  std::size_t ticks = 0;
  std::string note;
};

struct Verdict {
  enum class Status { kHolds, kFails, kInconclusive };

  Status status = Status::kHolds;
  std::optional<Witness> witness;
  std::string coverage;
  std::size_t explored = 0;

  bool holds() const { return status == Status::kHolds; }
  bool fails() const { return status == Status::kFails; }
  bool inconclusive() const { return status == Status::kInconclusive; }
};

std::string to_string(Verdict::Status status);

/**
 * Bounded trace inclusion between machines with the same inputs: every
 * output prefix `fine` can produce is one `coarse` can produce on the same
 * input, compared on the outputs `coarse` emits. Coarse chaotic outputs
 * match anything. Outputs emitted by coarse must be outputs of fine.
 */
Verdict check_machine_inclusion(const MachineBehavior& fine,
                                const MachineBehavior& coarse,
                                const EnumerationBudget& budget);

/// Bounded check of [[new]](i) included in [[old]](i) for all inputs i.
Verdict check_trace_inclusion(const System& old_system, const System& new_system,
                              const EnumerationBudget& budget);

/// Inclusion in both directions.
Verdict check_trace_equality(const System& a, const System& b,
                             const EnumerationBudget& budget);

/// Whether every run of `s` satisfies `psi` on every prefix up to the
/// budget depth.
Verdict check_invariant_validity(const System& s, const Invariant& psi,
                                 const EnumerationBudget& budget);

/// For every bounded flow l over in.c and the invariant domain with psi(l),
/// every output of `replacement` on l restricted to in.c is an output of the
/// current behavior of `component`.
Verdict check_refinement_under_invariant(const System& s,
                                         const std::string& component,
                                         const MachineBehavior& replacement,
                                         const Invariant& psi,
                                         const EnumerationBudget& budget);

/// Rejects (Fails) invariants that restrict the system inputs: for every
/// bounded assignment of the invariant's input channels some assignment of
/// its remaining channels must satisfy it. Throws InterfaceError when the
/// domain leaves the system's inputs and controlled channels.
Verdict validate_invariant(const System& s, const Invariant& psi,
                           const EnumerationBudget& budget);

}  // namespace archref

#endif  // ARCHREF_ORACLE_HPP_
