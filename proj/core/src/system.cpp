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

#include "archref/system.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "detail.hpp"

namespace archref {

Component make_component(std::string name, BehaviorPtr behavior) {
  if (!behavior) throw DefinitionError("component " + name + " has no behavior");
  Component c;
  c.name = std::move(name);
  c.inputs = behavior->inputs();
  c.outputs = behavior->outputs();
  c.behavior = std::move(behavior);
  return c;
}

const Component* System::find(const std::string& name) const {
  for (const auto& c : components) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

Component* System::find(const std::string& name) {
  for (auto& c : components) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ChannelMap System::controlled() const {
  ChannelMap out;
  for (const auto& c : components) out.insert(c.outputs.begin(), c.outputs.end());
  return out;
}

ChannelMap System::consumed() const {
  ChannelMap out;
  for (const auto& c : components) out.insert(c.inputs.begin(), c.inputs.end());
  return out;
}

ChannelMap System::all_channels() const {
  ChannelMap out = inputs;
  out.insert(outputs.begin(), outputs.end());
  for (const auto& c : components) {
    out.insert(c.inputs.begin(), c.inputs.end());
    out.insert(c.outputs.begin(), c.outputs.end());
  }
  return out;
}

std::vector<std::string> System::readers(const std::string& channel) const {
  std::vector<std::string> out;
  for (const auto& c : components) {
    if (c.inputs.count(channel)) out.push_back(c.name);
  }
  return out;
}

const Component* System::writer(const std::string& channel) const {
  for (const auto& c : components) {
    if (c.outputs.count(channel)) return &c;
  }
  return nullptr;
}

bool structurally_equal(const Component& a, const Component& b) {
  if (a.name != b.name) return false;
  if (!detail::same_channels(a.inputs, b.inputs) ||
      !detail::same_channels(a.outputs, b.outputs)) {
    return false;
  }
  if (!a.behavior || !b.behavior) return a.behavior == b.behavior;
  if (!structurally_equal(*a.behavior, *b.behavior)) return false;
  if (!a.sub || !b.sub) return !a.sub && !b.sub;
  return structurally_equal(*a.sub, *b.sub);
}

bool structurally_equal(const System& a, const System& b) {
  if (!detail::same_channels(a.inputs, b.inputs) ||
      !detail::same_channels(a.outputs, b.outputs) ||
      a.components.size() != b.components.size()) {
    return false;
  }
  // Matched as a multiset; inconsistent systems may repeat a name.
  std::vector<bool> used(b.components.size(), false);
  for (const auto& c : a.components) {
    bool found = false;
    for (std::size_t k = 0; k < b.components.size() && !found; ++k) {
      if (!used[k] && b.components[k].name == c.name &&
          structurally_equal(c, b.components[k])) {
        used[k] = found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::vector<Violation> check_consistency(const System& s) {
  std::vector<Violation> out;

  std::map<std::string, int> names;
  for (const auto& c : s.components) ++names[c.name];
  for (const auto& [name, count] : names) {
    if (count > 1) {
      out.push_back({1, "component name " + name + " is used " +
                            std::to_string(count) + " times",
                     {name}});
    }
  }

  std::map<std::string, std::vector<std::string>> writers;
  for (const auto& c : s.components) {
    for (const auto& [ch, _] : c.outputs) writers[ch].push_back(c.name);
  }
  for (const auto& [ch, who] : writers) {
    if (who.size() > 1) {
      std::ostringstream msg;
      msg << "channel " << ch << " is controlled by";
      for (const auto& w : who) msg << ' ' << w;
      auto subjects = who;
      subjects.insert(subjects.begin(), ch);
      out.push_back({2, msg.str(), subjects});
    }
  }

  for (const auto& [ch, _] : s.inputs) {
    auto it = writers.find(ch);
    if (it != writers.end()) {
      out.push_back({3, "system input " + ch + " is controlled by component " +
                            it->second.front(),
                     {ch, it->second.front()}});
    }
  }

  for (const auto& c : s.components) {
    for (const auto& [ch, _] : c.inputs) {
      if (!writers.count(ch) && !s.inputs.count(ch)) {
        out.push_back({4, "component " + c.name + " reads " + ch +
                              ", which nobody controls",
                       {ch, c.name}});
      }
    }
  }

  for (const auto& [ch, _] : s.outputs) {
    if (!writers.count(ch)) {
      out.push_back({5, "system output " + ch + " is not controlled by a component",
                     {ch}});
    }
  }
  return out;
}

namespace {

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  os << "inconsistent system:";
  for (const auto& v : violations) os << " [" << v.condition << "] " << v.message << ';';
  return os.str();
}

void check_component_interfaces(const System& s) {
  for (const auto& c : s.components) {
    if (!c.behavior) throw InterfaceError("component " + c.name + " has no behavior");
    if (!detail::same_channels(c.inputs, c.behavior->inputs()) ||
        !detail::same_channels(c.outputs, c.behavior->outputs())) {
      throw InterfaceError("behavior of component " + c.name +
                           " does not match its declared interface");
    }
  }
}

}  // namespace

ConsistencyError::ConsistencyError(std::vector<Violation> violations)
    : Error(describe(violations)), violations_(std::move(violations)) {}

BehaviorPtr blackbox(const System& s, const ComposeOptions& options) {
  auto violations = check_consistency(s);
  if (!violations.empty()) throw ConsistencyError(std::move(violations));
  check_component_interfaces(s);
  std::vector<const Component*> sorted;
  for (const auto& c : s.components) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(),
            [](const Component* a, const Component* b) { return a->name < b->name; });
  std::vector<BehaviorPtr> parts;
  for (const auto* c : sorted) parts.push_back(c->behavior);
  return adapt_interface(compose(parts, options), s.inputs,
                         names_of(s.outputs));
}

Component as_component(const System& s, const std::string& name) {
  Component c;
  c.name = name;
  c.inputs = s.inputs;
  c.outputs = s.outputs;
  c.behavior = blackbox(s);
  c.sub = std::make_shared<const System>(s);
  return c;
}

// ---------------------------------------------------------------------------
// Reference oracle

namespace {

struct OraclePart {
  const MachineBehavior* machine;
  // For each machine input: position in the l vector.
  std::vector<std::size_t> input_slots;
  // For each machine output: position in the l vector, emitted index or
  // kAbsent for chaotic outputs.
  std::vector<std::size_t> output_slots;
  std::vector<std::size_t> output_emitted;
  std::vector<std::vector<Interval>> candidates;
};

class Oracle {
 public:
  Oracle(const System& s, const NamedStreamTuple& input, std::size_t ticks,
         const OracleOptions& options)
      : ticks_(ticks), budget_(options.node_budget) {
    auto violations = check_consistency(s);
    if (!violations.empty()) throw ConsistencyError(std::move(violations));
    check_component_interfaces(s);
    if (input.domain() != names_of(s.inputs)) {
      throw InterfaceError("oracle input must cover exactly the system inputs");
    }
    if (input.tick_len() < ticks) throw OutOfRangeError("oracle input too short");

    ChannelMap universe = s.inputs;
    for (const auto& [name, alphabet] : s.controlled()) universe.emplace(name, alphabet);
    order_ = detail::ordered(names_of(universe));
    auto slot = [this](const std::string& name) {
      return static_cast<std::size_t>(
          std::lower_bound(order_.begin(), order_.end(), name) - order_.begin());
    };
    for (const auto& name : names_of(s.inputs)) {
      fixed_.emplace_back(slot(name), &input.at(name));
    }
    for (const auto& c : s.components) {
      OraclePart part;
      part.machine = c.behavior.get();
      for (const auto& name : c.behavior->input_order()) {
        part.input_slots.push_back(slot(name));
      }
      const auto& emitted = c.behavior->emitted();
      for (const auto& [name, alphabet] : c.behavior->outputs()) {
        part.output_slots.push_back(slot(name));
        auto pos = std::find(emitted.begin(), emitted.end(), name);
        part.output_emitted.push_back(
            pos == emitted.end() ? detail::kAbsent
                                 : static_cast<std::size_t>(pos - emitted.begin()));
        part.candidates.push_back(enumerate_intervals(*alphabet, options.interval_bound));
      }
      parts_.push_back(std::move(part));
    }
    for (const auto& name : names_of(s.outputs)) projection_.push_back(slot(name));
    projection_names_ = detail::ordered(names_of(s.outputs));
  }

  std::set<NamedStreamTuple> solve() {
    std::vector<std::vector<State>> frontiers;
    for (const auto& p : parts_) {
      auto init = p.machine->initial_states();
      detail::sort_unique(init);
      frontiers.push_back(std::move(init));
    }
    history_.clear();
    tick(0, std::move(frontiers));
    return std::move(results_);
  }

 private:
  void charge() {
    if (++nodes_ > budget_) {
      throw BudgetError("oracle search exceeded " + std::to_string(budget_) +
                        " nodes");
    }
  }

  void tick(std::size_t t, std::vector<std::vector<State>> frontiers) {
    if (t == ticks_) {
      std::vector<Valuation> projected;
      for (const auto& l : history_) {
        Valuation v;
        for (auto k : projection_) v.push_back(l[k]);
        projected.push_back(std::move(v));
      }
      results_.insert(detail::from_per_tick(projected, projection_names_));
      return;
    }
    Valuation l(order_.size());
    for (const auto& [k, prefix] : fixed_) l[k] = prefix->at(t);
    assign(t, 0, 0, l, frontiers);
  }

  // Chooses the interval of output `o` of part `p` at tick `t`.
  void assign(std::size_t t, std::size_t p, std::size_t o, Valuation& l,
              std::vector<std::vector<State>>& frontiers) {
    charge();
    if (p == parts_.size()) {
      advance(t, l, frontiers);
      return;
    }
    const auto& part = parts_[p];
    if (o == part.output_slots.size()) {
      assign(t, p + 1, 0, l, frontiers);
      return;
    }
    for (const auto& candidate : part.candidates[o]) {
      l[part.output_slots[o]] = candidate;
      const auto idx = part.output_emitted[o];
      if (idx == detail::kAbsent) {
        assign(t, p, o + 1, l, frontiers);
        continue;
      }
      std::vector<State> kept;
      std::vector<Valuation> emissions;
      for (const auto& s : frontiers[p]) {
        emissions.clear();
        part.machine->emit(s, emissions);
        for (const auto& e : emissions) {
          if (e[idx] == candidate) {
            kept.push_back(s);
            break;
          }
        }
      }
      if (kept.empty()) continue;
      auto saved = std::move(frontiers[p]);
      frontiers[p] = std::move(kept);
      assign(t, p, o + 1, l, frontiers);
      frontiers[p] = std::move(saved);
    }
  }

  // Every part's frontier is now consistent with its outputs taken one at
  // a time; keep the states whose single emission fits all of them.
  void advance(std::size_t t, const Valuation& l,
               const std::vector<std::vector<State>>& frontiers) {
    std::vector<std::vector<State>> next;
    next.reserve(parts_.size());
    std::vector<Valuation> emissions;
    for (std::size_t p = 0; p < parts_.size(); ++p) {
      const auto& part = parts_[p];
      Valuation wanted(part.machine->emitted().size());
      for (std::size_t o = 0; o < part.output_slots.size(); ++o) {
        if (part.output_emitted[o] != detail::kAbsent) {
          wanted[part.output_emitted[o]] = l[part.output_slots[o]];
        }
      }
      Valuation in;
      for (auto k : part.input_slots) in.push_back(l[k]);
      std::vector<State> succ;
      for (const auto& s : frontiers[p]) {
        emissions.clear();
        part.machine->emit(s, emissions);
        if (std::find(emissions.begin(), emissions.end(), wanted) == emissions.end()) {
          continue;
        }
        if (t + 1 < ticks_) part.machine->step(s, in, succ);
        else succ.push_back(s);
      }
      detail::sort_unique(succ);
      if (succ.empty()) return;
      next.push_back(std::move(succ));
    }
    history_.push_back(l);
    tick(t + 1, std::move(next));
    history_.pop_back();
  }

  std::size_t ticks_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  std::vector<std::string> order_;
  std::vector<std::pair<std::size_t, const TimedStreamPrefix*>> fixed_;
  std::vector<OraclePart> parts_;
  std::vector<std::size_t> projection_;
  std::vector<std::string> projection_names_;
  std::vector<Valuation> history_;
  std::set<NamedStreamTuple> results_;
};

}  // namespace

std::set<NamedStreamTuple> blackbox_oracle(const System& s,
                                           const NamedStreamTuple& input,
                                           std::size_t ticks,
                                           const OracleOptions& options) {
  return Oracle(s, input, ticks, options).solve();
}

}  // namespace archref
