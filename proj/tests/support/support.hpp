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

#ifndef ARCHREF_TESTS_SUPPORT_HPP_
#define ARCHREF_TESTS_SUPPORT_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "archref/corpus.hpp"
#include "archref/machine.hpp"
#include "archref/oracle.hpp"
#include "archref/stream.hpp"
#include "archref/system.hpp"

namespace archref::testing {

// ---------------------------------------------------------------------------
// Small fixtures

/// Alphabet {a} or {a, b}.
AlphabetPtr small_alphabet(std::size_t size = 2, const std::string& name = "A");

/// Emits on `out` whatever arrived on `in` one tick earlier (intervals of at
/// most one message).
BehaviorPtr unit_delay(const std::string& name, const std::string& in,
                       const std::string& out, const AlphabetPtr& alphabet);

/// Single state, no inputs; emits any of `options` on `out` every tick.
BehaviorPtr chooser(const std::string& name, const std::string& out,
                    const AlphabetPtr& alphabet, const std::vector<Interval>& options);

/// A tuple from literal intervals, e.g. {{"I", {{0}, {}, {1}}}}.
NamedStreamTuple tuple(const std::map<std::string, std::vector<Interval>>& entries,
                       std::size_t ticks);

// ---------------------------------------------------------------------------
// Random generation

struct RandomLimits {
  std::size_t max_components = 3;
  std::size_t max_states = 3;
  std::size_t max_alphabet = 2;
  std::size_t max_system_inputs = 2;
  std::size_t max_outputs_per_component = 2;
  double chaos_probability = 0.0;
};

/// A table machine over the given interface with at most `max_states`
/// states, interval literals of at most one message, and nondeterministic
/// emissions and transitions.
BehaviorPtr random_machine(std::mt19937_64& rng, const std::string& name,
                           const ChannelMap& inputs, const ChannelMap& outputs,
                           std::size_t max_states, const ChannelSet& chaotic = {});

/// A consistent random system. Components may read their own outputs.
System random_system(std::mt19937_64& rng, const RandomLimits& limits = {});

// ---------------------------------------------------------------------------
// Independent reference implementations

/// Odometer enumeration of every input tuple with intervals of at most
/// `bound` messages. Written without the library's enumerator.
std::vector<NamedStreamTuple> all_inputs(const ChannelMap& channels, std::size_t ticks,
                                         std::size_t bound);

/// Closed form ((sum_{l<=L} |A|^l) per channel, multiplied)^T.
std::size_t closed_form_count(const ChannelMap& channels, std::size_t ticks,
                              std::size_t bound);

/// Whether every output of `fine` is an output of `coarse` for every input,
/// comparing full run sets. Channels chaotic in `coarse` are left out of the
/// comparison; channels chaotic only in `fine` make the answer false.
bool brute_inclusion(const MachineBehavior& fine, const MachineBehavior& coarse,
                     std::size_t ticks, std::size_t bound);

/// Same, for the blackbox behaviors of two systems.
bool brute_system_inclusion(const System& old_system, const System& new_system,
                            std::size_t ticks, std::size_t bound);

/// Recursive codec evaluators following the head/tail definitions.
corpus::Entries reference_delta_star(const corpus::Database& m, const corpus::Entries& x,
                                     std::size_t n);
corpus::Entries reference_rho_star(const corpus::Database& m, const corpus::Entries& x,
                                   std::size_t n);

/// Emits at tick t the input of tick t. Not time guarded.
BehaviorFunction instantaneous_echo(const std::string& in, const std::string& out);

// ---------------------------------------------------------------------------
// DOT

struct DotEdge {
  std::string from;
  std::string to;
  std::string label;
  bool operator==(const DotEdge& o) const = default;
  bool operator<(const DotEdge& o) const {
    return std::tie(from, to, label) < std::tie(o.from, o.to, o.label);
  }
};

struct DotGraph {
  bool directed = false;
  std::string name;
  std::set<std::string> nodes;
  std::map<std::string, std::map<std::string, std::string>> node_attributes;
  std::vector<DotEdge> edges;
};

/// Parses the Graphviz DOT language (graph, digraph, strict, subgraphs,
/// attribute statements, ports, quoted and HTML identifiers). Throws
/// std::runtime_error with a position on malformed input.
DotGraph parse_dot(const std::string& text);

}  // namespace archref::testing

#endif  // ARCHREF_TESTS_SUPPORT_HPP_
