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

#ifndef ARCHREF_SYSTEM_HPP_
#define ARCHREF_SYSTEM_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "archref/errors.hpp"
#include "archref/machine.hpp"
#include "archref/stream.hpp"

namespace archref {

struct System;

/// A named filter. `sub` records the subarchitecture a hierarchical
/// component was folded from.
struct Component {
  std::string name;
  ChannelMap inputs;
  ChannelMap outputs;
  BehaviorPtr behavior;
  std::shared_ptr<const System> sub;
};

/// Builds a component whose interface is that of `behavior`.
Component make_component(std::string name, BehaviorPtr behavior);

struct System {
  ChannelMap inputs;
  ChannelMap outputs;
  std::vector<Component> components;

  const Component* find(const std::string& name) const;
  Component* find(const std::string& name);
  /// Union of the component output channels.
  ChannelMap controlled() const;
  /// Union of the component input channels.
  ChannelMap consumed() const;
  /// Every channel mentioned by the system or its components.
  ChannelMap all_channels() const;
  /// Components reading `channel`, by name.
  std::vector<std::string> readers(const std::string& channel) const;
  /// Component writing `channel`, or nullptr.
  const Component* writer(const std::string& channel) const;
};

/// Structural equality: same interface, same components by name, each with
/// the same interface, a structurally equal behavior and an equal `sub`.
bool structurally_equal(const System& a, const System& b);
bool structurally_equal(const Component& a, const Component& b);

struct Violation {
  int condition = 0;  // 1..5
  std::string message;
  std::vector<std::string> subjects;  // component or channel names
};

std::vector<Violation> check_consistency(const System& s);

class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

struct ComposeOptions {
  /// Chaotic outputs read by a sibling are fed every interval of at most
  /// this many messages.
  std::size_t chaos_bound = 1;
  /// Chaotic outputs materialized even when nobody reads them.
  ChannelSet materialize;
};

/**
 * Parallel composition with implicit feedback. Outputs are the union of the
 * part outputs; inputs are the remaining part inputs. All parts advance in
 * lock step; every tick's channel contents are fixed by the states reached
 * before that tick.
 *
 * Throws CompositionError when two parts share an output.
 */
BehaviorPtr compose(const std::vector<BehaviorPtr>& parts,
                    const ComposeOptions& options = {});

struct CompositeParts {
  std::vector<BehaviorPtr> parts;
  ComposeOptions options;
};

/// Parts and options of a machine built by compose(); nullopt otherwise.
std::optional<CompositeParts> composite_parts(const MachineBehavior& m);

/// Composite of the components restricted and extended to the system
/// interface. Throws ConsistencyError for inconsistent systems.
BehaviorPtr blackbox(const System& s, const ComposeOptions& options = {});

struct OracleOptions {
  std::size_t interval_bound = 1;
  std::size_t node_budget = 5'000'000;
};

/**
 * Reference semantics by exhaustive search: every tuple l over the system
 * inputs and component outputs whose component output intervals hold at
 * most `interval_bound` messages, that agrees with `input` and that every
 * component accepts. Returns the projections of such l onto out.S.
 * Throws BudgetError when the search exceeds the node budget.
 */
std::set<NamedStreamTuple> blackbox_oracle(const System& s,
                                           const NamedStreamTuple& input,
                                           std::size_t ticks,
                                           const OracleOptions& options = {});

/// The system packaged as one hierarchical component named `name`.
Component as_component(const System& s, const std::string& name);

}  // namespace archref

#endif  // ARCHREF_SYSTEM_HPP_
