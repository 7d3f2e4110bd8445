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

#include "archref/machine.hpp"

#include <algorithm>
#include <unordered_map>

#include "archref/errors.hpp"
#include "detail.hpp"

namespace archref {

namespace detail {

std::vector<std::size_t> index_map(const std::vector<std::string>& from,
                                   const std::vector<std::string>& to) {
  std::vector<std::size_t> out(to.size(), kAbsent);
  for (std::size_t i = 0; i < to.size(); ++i) {
    auto it = std::lower_bound(from.begin(), from.end(), to[i]);
    if (it != from.end() && *it == to[i]) {
      out[i] = static_cast<std::size_t>(it - from.begin());
    }
  }
  return out;
}

std::vector<Valuation> per_tick(const NamedStreamTuple& x,
                                const std::vector<std::string>& order,
                                std::size_t ticks) {
  std::vector<const TimedStreamPrefix*> columns;
  columns.reserve(order.size());
  for (const auto& name : order) columns.push_back(&x.at(name));
  std::vector<Valuation> out(ticks, Valuation(order.size()));
  for (std::size_t t = 0; t < ticks; ++t) {
    for (std::size_t c = 0; c < order.size(); ++c) {
      out[t][c] = columns[c]->at(t);
    }
  }
  return out;
}

NamedStreamTuple from_per_tick(const std::vector<Valuation>& history,
                               const std::vector<std::string>& order) {
  std::map<std::string, TimedStreamPrefix> entries;
  for (std::size_t c = 0; c < order.size(); ++c) {
    std::vector<Interval> intervals;
    intervals.reserve(history.size());
    for (const auto& v : history) intervals.push_back(v[c]);
    entries.emplace(order[c], TimedStreamPrefix(std::move(intervals)));
  }
  return NamedStreamTuple(std::move(entries), history.size());
}

std::vector<std::string> ordered(const ChannelSet& names) {
  return {names.begin(), names.end()};
}

bool same_channels(const ChannelMap& a, const ChannelMap& b) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (!ia->second->same_as(*ib->second)) return false;
  }
  return true;
}

std::vector<Valuation> product(const std::vector<std::vector<Interval>>& options,
                               std::size_t cap) {
  std::size_t total = 1;
  for (const auto& o : options) {
    if (o.empty()) return {};
    if (total > cap / o.size()) {
      throw BudgetError("valuation product exceeds " + std::to_string(cap));
    }
    total *= o.size();
  }
  std::vector<Valuation> out;
  out.reserve(total);
  std::vector<std::size_t> digits(options.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    Valuation v(options.size());
    for (std::size_t c = 0; c < options.size(); ++c) v[c] = options[c][digits[c]];
    out.push_back(std::move(v));
    for (std::size_t c = options.size(); c-- > 0;) {
      if (++digits[c] < options[c].size()) break;
      digits[c] = 0;
    }
  }
  return out;
}

}  // namespace detail

std::size_t StateHash::operator()(const State& s) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (auto v : s) {
    h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(v));
    h *= 1099511628211ULL;
  }
  return h;
}

MachineBehavior::MachineBehavior(ChannelMap inputs, ChannelMap outputs,
                                 ChannelSet chaotic)
    : inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      chaotic_(std::move(chaotic)) {
  for (const auto& c : chaotic_) {
    if (!outputs_.count(c)) {
      throw DefinitionError("chaotic channel " + c + " is not an output");
    }
  }
  for (const auto& [name, alphabet] : inputs_) {
    if (!alphabet) throw DefinitionError("input " + name + " has no alphabet");
    input_order_.push_back(name);
  }
  for (const auto& [name, alphabet] : outputs_) {
    if (!alphabet) throw DefinitionError("output " + name + " has no alphabet");
    if (!chaotic_.count(name)) emitted_.push_back(name);
  }
}

bool structurally_equal(const MachineBehavior& a, const MachineBehavior& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind()) return false;
  return a.same_definition(b);
}

// ---------------------------------------------------------------------------
// TableMachine

namespace {

void check_interval(const Interval& interval, const Alphabet& alphabet,
                    const std::string& where) {
  for (auto s : interval) {
    if (s >= alphabet.size()) {
      throw DefinitionError(where + ": symbol outside alphabet " +
                            alphabet.name());
    }
  }
}

bool guard_holds(Guard::Test test, const Interval& literal,
                 const Interval& value) {
  switch (test) {
    case Guard::Test::kEquals:
      return value == literal;
    case Guard::Test::kEmpty:
      return value.empty();
    case Guard::Test::kNonEmpty:
      return !value.empty();
    case Guard::Test::kAny:
      return true;
  }
  return false;
}

}  // namespace

TableMachine::TableMachine(std::string name, ChannelMap inputs,
                           ChannelMap outputs, ChannelSet chaotic,
                           std::vector<TableState> states, std::string initial)
    : NamedMachine(std::move(name), std::move(inputs), std::move(outputs),
                   std::move(chaotic)),
      states_(std::move(states)),
      initial_(std::move(initial)) {
  const std::string where = "machine " + this->name();
  if (states_.empty()) throw DefinitionError(where + " has no states");

  std::map<std::string, std::int32_t> index;
  for (std::size_t k = 0; k < states_.size(); ++k) {
    if (!index.emplace(states_[k].name, static_cast<std::int32_t>(k)).second) {
      throw DefinitionError(where + ": duplicate state " + states_[k].name);
    }
  }
  auto init = index.find(initial_);
  if (init == index.end()) {
    throw DefinitionError(where + ": unknown initial state " + initial_);
  }
  initial_index_ = init->second;

  const auto& order = input_order();
  for (const auto& st : states_) {
    const std::string at = where + " state " + st.name;
    if (st.emits.empty()) throw DefinitionError(at + " has no emission");
    std::vector<Valuation> options;
    for (const auto& option : st.emits) {
      Valuation v(emitted().size());
      for (const auto& [channel, interval] : option) {
        auto pos = std::find(emitted().begin(), emitted().end(), channel);
        if (pos == emitted().end()) {
          throw DefinitionError(at + " emits on " + channel +
                                ", which is not a non-chaotic output");
        }
        check_interval(interval, *this->outputs().at(channel), at);
        v[static_cast<std::size_t>(pos - emitted().begin())] = interval;
      }
      options.push_back(std::move(v));
    }
    detail::sort_unique(options);
    emits_.push_back(std::move(options));

    std::vector<CompiledTransition> compiled;
    for (const auto& tr : st.transitions) {
      CompiledTransition ct;
      for (const auto& g : tr.guards) {
        auto pos = std::find(order.begin(), order.end(), g.channel);
        if (pos == order.end()) {
          throw DefinitionError(at + ": guard on " + g.channel +
                                ", which is not an input");
        }
        if (g.test == Guard::Test::kEquals) {
          check_interval(g.literal, *this->inputs().at(g.channel), at);
        }
        ct.guards.push_back({static_cast<std::size_t>(pos - order.begin()),
                             g.test, g.literal});
      }
      if (tr.targets.empty()) {
        throw DefinitionError(at + ": transition without target");
      }
      for (const auto& target : tr.targets) {
        auto it = index.find(target);
        if (it == index.end()) {
          throw DefinitionError(at + ": unknown target state " + target);
        }
        ct.targets.push_back(it->second);
      }
      compiled.push_back(std::move(ct));
    }
    transitions_.push_back(std::move(compiled));
  }
}

std::vector<State> TableMachine::initial_states() const {
  return {State{initial_index_}};
}

void TableMachine::emit(const State& state, std::vector<Valuation>& out) const {
  const auto& options = emits_.at(static_cast<std::size_t>(state.at(0)));
  out.insert(out.end(), options.begin(), options.end());
}

void TableMachine::step(const State& state, const Valuation& input,
                        std::vector<State>& out) const {
  const auto& transitions = transitions_.at(static_cast<std::size_t>(state.at(0)));
  std::vector<std::int32_t> targets;
  for (const auto& tr : transitions) {
    bool fires = true;
    for (const auto& g : tr.guards) {
      if (!guard_holds(g.test, g.literal, input[g.input_index])) {
        fires = false;
        break;
      }
    }
    if (fires) targets.insert(targets.end(), tr.targets.begin(), tr.targets.end());
  }
  if (targets.empty()) {
    out.push_back(state);
    return;
  }
  detail::sort_unique(targets);
  for (auto t : targets) out.push_back(State{t});
}

ChannelSet TableMachine::reads() const {
  ChannelSet out;
  for (const auto& st : states_) {
    for (const auto& tr : st.transitions) {
      for (const auto& g : tr.guards) {
        if (g.test != Guard::Test::kAny) out.insert(g.channel);
      }
    }
  }
  return out;
}

std::optional<GuardLiterals> TableMachine::guard_literals() const {
  GuardLiterals out;
  for (const auto& name : input_order()) out[name];
  for (const auto& st : states_) {
    for (const auto& tr : st.transitions) {
      for (const auto& g : tr.guards) {
        if (g.test == Guard::Test::kEquals) out[g.channel].insert(g.literal);
      }
    }
  }
  return out;
}

bool TableMachine::same_definition(const MachineBehavior& other) const {
  const auto* o = dynamic_cast<const TableMachine*>(&other);
  return o && o->name() == name() &&
         detail::same_channels(inputs(), o->inputs()) &&
         detail::same_channels(outputs(), o->outputs()) &&
         chaotic() == o->chaotic() && states_ == o->states_ &&
         initial_ == o->initial_;
}

// ---------------------------------------------------------------------------
// Trivial behavior

namespace {

class TrivialMachine final : public MachineBehavior {
 public:
  TrivialMachine() : MachineBehavior({}, {}, {}) {}

  MachineKind kind() const override { return MachineKind::kTrivial; }
  std::vector<State> initial_states() const override { return {State{}}; }
  void emit(const State&, std::vector<Valuation>& out) const override {
    out.emplace_back();
  }
  void step(const State& state, const Valuation&,
            std::vector<State>& out) const override {
    out.push_back(state);
  }
  ChannelSet reads() const override { return {}; }
  std::optional<GuardLiterals> guard_literals() const override {
    return GuardLiterals{};
  }
  bool same_definition(const MachineBehavior& other) const override {
    return other.kind() == MachineKind::kTrivial;
  }
};

}  // namespace

BehaviorPtr trivial_behavior() {
  static const BehaviorPtr instance = std::make_shared<TrivialMachine>();
  return instance;
}

// ---------------------------------------------------------------------------
// Builtins

bool BuiltinMachine::same_definition(const MachineBehavior& other) const {
  const auto* o = dynamic_cast<const BuiltinMachine*>(&other);
  return o && o->name() == name() && o->builtin_kind_ == builtin_kind_ &&
         o->params_ == params_;
}

void BuiltinRegistry::add(std::string kind, BuiltinFactory factory) {
  factories_[std::move(kind)] = std::move(factory);
}

bool BuiltinRegistry::has(const std::string& kind) const {
  return factories_.count(kind) != 0;
}

BehaviorPtr BuiltinRegistry::make(const std::string& kind,
                                  const std::string& name,
                                  const BuiltinParams& params,
                                  const ChannelMap& declared_channels) const {
  auto it = factories_.find(kind);
  if (it == factories_.end()) {
    throw DefinitionError("unknown builtin machine kind " + kind);
  }
  return it->second(name, params, declared_channels);
}

}  // namespace archref
