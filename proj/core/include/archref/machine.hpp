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

#ifndef ARCHREF_MACHINE_HPP_
#define ARCHREF_MACHINE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "archref/stream.hpp"

namespace archref {

/// Opaque machine state. Composite machines concatenate child states.
using State = std::vector<std::int32_t>;

/// One tick's intervals, aligned with a machine's channel order.
using Valuation = std::vector<Interval>;

struct StateHash {
  std::size_t operator()(const State& s) const noexcept;
};

enum class MachineKind { kTable, kBuiltin, kView, kComposite, kTrivial, kOpaque };

/// Interval literals each input channel is compared against by a machine's
/// guards. Step results depend on an input interval only through equality
/// with these literals and through emptiness.
using GuardLiterals = std::map<std::string, std::set<Interval>>;

/**
 * A nondeterministic, per-tick Moore machine.
 *
 * At tick t the machine emits one of emit(s) from its current state s, then
 * moves to one of step(s, v) where v holds the tick-t input intervals. Output
 * at tick t therefore depends only on inputs of ticks 0..t-1, which makes the
 * denoted behavior time guarded.
 *
 * Chaotic outputs are never emitted; they stand for arbitrary content.
 */
class MachineBehavior {
 public:
  MachineBehavior(ChannelMap inputs, ChannelMap outputs, ChannelSet chaotic);
  virtual ~MachineBehavior() = default;

  MachineBehavior(const MachineBehavior&) = delete;
  MachineBehavior& operator=(const MachineBehavior&) = delete;

  const ChannelMap& inputs() const { return inputs_; }
  const ChannelMap& outputs() const { return outputs_; }
  const ChannelSet& chaotic() const { return chaotic_; }
  ChannelSet input_names() const { return names_of(inputs_); }
  ChannelSet output_names() const { return names_of(outputs_); }

  /// Input names in order; step() valuations align with it.
  const std::vector<std::string>& input_order() const { return input_order_; }
  /// Non-chaotic outputs in order; emit() valuations align with it.
  const std::vector<std::string>& emitted() const { return emitted_; }

  virtual MachineKind kind() const = 0;
  virtual std::vector<State> initial_states() const = 0;
  /// Appends the possible emissions of `state`. Never appends nothing.
  virtual void emit(const State& state, std::vector<Valuation>& out) const = 0;
  /// Appends the possible successors of `state` under `input`.
  virtual void step(const State& state, const Valuation& input,
                    std::vector<State>& out) const = 0;
  /// Inputs referenced by a guard or an update.
  virtual ChannelSet reads() const = 0;
  virtual std::optional<GuardLiterals> guard_literals() const {
    return std::nullopt;
  }
  virtual bool same_definition(const MachineBehavior& other) const = 0;

 private:
  ChannelMap inputs_;
  ChannelMap outputs_;
  ChannelSet chaotic_;
  std::vector<std::string> input_order_;
  std::vector<std::string> emitted_;
};

using BehaviorPtr = std::shared_ptr<const MachineBehavior>;

bool structurally_equal(const MachineBehavior& a, const MachineBehavior& b);

/// Base of the machines that are declared under a name and referenced by it.
class NamedMachine : public MachineBehavior {
 public:
  NamedMachine(std::string name, ChannelMap inputs, ChannelMap outputs,
               ChannelSet chaotic)
      : MachineBehavior(std::move(inputs), std::move(outputs),
                        std::move(chaotic)),
        name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// ---------------------------------------------------------------------------
// Table machines

struct Guard {
  enum class Test { kEquals, kEmpty, kNonEmpty, kAny };
  std::string channel;
  Test test = Test::kAny;
  Interval literal;  // kEquals only

  bool operator==(const Guard&) const = default;
};

/// Fires when every guard holds; moves to any of `targets`.
struct Transition {
  std::vector<Guard> guards;
  std::vector<std::string> targets;

  bool operator==(const Transition&) const = default;
};

struct TableState {
  std::string name;
  /// Each entry is one emission option; missing channels emit nothing.
  std::vector<std::map<std::string, Interval>> emits;
  std::vector<Transition> transitions;

  bool operator==(const TableState&) const = default;
};

/**
 * Explicit finite state machine. When no transition of the current state
 * fires, the machine stays where it is.
 */
class TableMachine : public NamedMachine {
 public:
  TableMachine(std::string name, ChannelMap inputs, ChannelMap outputs,
               ChannelSet chaotic, std::vector<TableState> states,
               std::string initial);

  const std::vector<TableState>& states() const { return states_; }
  const std::string& initial_name() const { return initial_; }

  MachineKind kind() const override { return MachineKind::kTable; }
  std::vector<State> initial_states() const override;
  void emit(const State& state, std::vector<Valuation>& out) const override;
  void step(const State& state, const Valuation& input,
            std::vector<State>& out) const override;
  ChannelSet reads() const override;
  std::optional<GuardLiterals> guard_literals() const override;
  bool same_definition(const MachineBehavior& other) const override;

 private:
  struct CompiledGuard {
    std::size_t input_index;
    Guard::Test test;
    Interval literal;
  };
  struct CompiledTransition {
    std::vector<CompiledGuard> guards;
    std::vector<std::int32_t> targets;
  };

  std::vector<TableState> states_;
  std::string initial_;
  std::int32_t initial_index_ = 0;
  std::vector<std::vector<Valuation>> emits_;
  std::vector<std::vector<CompiledTransition>> transitions_;
};

// ---------------------------------------------------------------------------
// Trivial behavior

/// The unique behavior without inputs and outputs.
BehaviorPtr trivial_behavior();

// ---------------------------------------------------------------------------
// Builtin (registered) machines

using BuiltinParams = std::map<std::string, std::string>;

/// Machines implemented natively and instantiated from `kind(params)`.
class BuiltinMachine : public NamedMachine {
 public:
  BuiltinMachine(std::string name, std::string builtin_kind,
                 BuiltinParams params, ChannelMap inputs, ChannelMap outputs)
      : NamedMachine(std::move(name), std::move(inputs), std::move(outputs), {}),
        builtin_kind_(std::move(builtin_kind)),
        params_(std::move(params)) {}

  const std::string& builtin_kind() const { return builtin_kind_; }
  const BuiltinParams& params() const { return params_; }

  MachineKind kind() const override { return MachineKind::kBuiltin; }
  bool same_definition(const MachineBehavior& other) const override;

 private:
  std::string builtin_kind_;
  BuiltinParams params_;
};

using BuiltinFactory = std::function<BehaviorPtr(
    const std::string& name, const BuiltinParams& params,
    const ChannelMap& declared_channels)>;

class BuiltinRegistry {
 public:
  void add(std::string kind, BuiltinFactory factory);
  bool has(const std::string& kind) const;
  /// Throws DefinitionError for unknown kinds or bad parameters.
  BehaviorPtr make(const std::string& kind, const std::string& name,
                   const BuiltinParams& params,
                   const ChannelMap& declared_channels) const;

 private:
  std::map<std::string, BuiltinFactory> factories_;
};

// ---------------------------------------------------------------------------
// Interface views

/**
 * Interface change applied to a base machine, in normal form.
 *
 * Hidden inputs and dropped outputs are keyed by the base machine's channel
 * names; extra inputs and chaotic outputs by the resulting names.
 */
struct InterfaceChange {
  std::map<std::string, std::string> rename;
  ChannelSet hidden_inputs;
  ChannelSet dropped_outputs;
  ChannelMap extra_inputs;
  ChannelMap chaotic_outputs;

  bool is_identity() const;
};

/// A base machine seen through an InterfaceChange. Hidden base inputs read
/// the empty interval; extra inputs are ignored.
class ViewMachine : public MachineBehavior {
 public:
  ViewMachine(BehaviorPtr base, InterfaceChange change);

  const BehaviorPtr& base() const { return base_; }
  const InterfaceChange& change() const { return change_; }
  /// Name a base channel appears under.
  std::string label(const std::string& base_channel) const;

  MachineKind kind() const override { return MachineKind::kView; }
  std::vector<State> initial_states() const override;
  void emit(const State& state, std::vector<Valuation>& out) const override;
  void step(const State& state, const Valuation& input,
            std::vector<State>& out) const override;
  ChannelSet reads() const override;
  std::optional<GuardLiterals> guard_literals() const override;
  bool same_definition(const MachineBehavior& other) const override;

 private:
  struct Interface {
    ChannelMap inputs;
    ChannelMap outputs;
    ChannelSet chaotic;
  };
  static Interface interface_of(const BehaviorPtr& base,
                                const InterfaceChange& change);
  ViewMachine(BehaviorPtr base, InterfaceChange change, Interface iface);

  BehaviorPtr base_;
  InterfaceChange change_;
  // For each base input: index into this view's input order, or -1 (hidden).
  std::vector<int> input_source_;
  // For each emitted output of the view: index into the base's emitted order.
  std::vector<std::size_t> output_source_;
};

/// Each helper returns a view in normal form over the innermost base, or the
/// base itself when the changes cancel out. Channel names refer to the
/// current interface of `m`.
BehaviorPtr with_extra_inputs(const BehaviorPtr& m, const ChannelMap& channels);
BehaviorPtr with_hidden_inputs(const BehaviorPtr& m, const ChannelSet& channels);
BehaviorPtr with_dropped_outputs(const BehaviorPtr& m, const ChannelSet& channels);
BehaviorPtr with_chaotic_outputs(const BehaviorPtr& m, const ChannelMap& channels);
BehaviorPtr with_renamed_channel(const BehaviorPtr& m, const std::string& from,
                                 const std::string& to);

/// Extends the inputs to `inputs` and restricts the outputs to `outputs`.
/// Throws AdaptionError unless inputs(m) is a subset of `inputs` and
/// `outputs` a subset of outputs(m).
BehaviorPtr adapt_interface(const BehaviorPtr& m, const ChannelMap& inputs,
                            const ChannelSet& outputs);

// ---------------------------------------------------------------------------
// Execution

/// Output prefixes over the non-chaotic outputs for every resolution of the
/// machine's nondeterminism, each `ticks` long. The input domain must equal
/// the machine's inputs.
std::set<NamedStreamTuple> run(const MachineBehavior& m,
                               const NamedStreamTuple& input, std::size_t ticks);

/// Whether some resolution reproduces `output` on the first `ticks` ticks.
/// Chaotic channels in `output` match anything and may be absent.
bool membership(const MachineBehavior& m, const NamedStreamTuple& input,
                const NamedStreamTuple& output, std::size_t ticks);

/// Any input-to-output-set function; used to audit time guardedness of
/// things that are not Moore machines.
using BehaviorFunction = std::function<std::set<NamedStreamTuple>(
    const NamedStreamTuple& input, std::size_t ticks)>;

struct GuardednessViolation {
  std::size_t shared_ticks;  // x and y agree on ticks [0, shared_ticks)
  NamedStreamTuple x;
  NamedStreamTuple y;
};

struct GuardednessReport {
  std::size_t pairs_checked = 0;
  std::vector<GuardednessViolation> violations;
  bool ok() const { return violations.empty(); }
};

GuardednessReport check_time_guardedness(const BehaviorFunction& f,
                                         const ChannelMap& inputs,
                                         std::size_t samples, std::size_t ticks,
                                         std::size_t interval_bound = 1,
                                         std::uint64_t seed = 0);

GuardednessReport check_time_guardedness(const MachineBehavior& m,
                                         std::size_t samples, std::size_t ticks,
                                         std::size_t interval_bound = 1,
                                         std::uint64_t seed = 0);

/**
 * Syntactic refinement check: true when every behavior of `fine` is a
 * behavior of `coarse`, established by a simulation between the reachable
 * states of the two machines. Sound, not complete; answers false whenever
 * it cannot decide. Coarse chaotic outputs match anything.
 *
 * Throws InterfaceError unless both have the same input and output channels.
 */
bool submachine_refines(const MachineBehavior& fine,
                        const MachineBehavior& coarse);

}  // namespace archref

#endif  // ARCHREF_MACHINE_HPP_
