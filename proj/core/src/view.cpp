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

#include <algorithm>

#include "archref/errors.hpp"
#include "archref/machine.hpp"
#include "detail.hpp"

namespace archref {

namespace {

struct ViewInterface {
  ChannelMap inputs;
  ChannelMap outputs;
  ChannelSet chaotic;
};

std::string label_of(const InterfaceChange& change, const std::string& name) {
  auto it = change.rename.find(name);
  return it == change.rename.end() ? name : it->second;
}

void insert_unique(ChannelMap& into, const std::string& name,
                   const AlphabetPtr& alphabet, const char* what) {
  if (!into.emplace(name, alphabet).second) {
    throw InterfaceError(std::string("view has two ") + what + " named " +
                         name);
  }
}

ViewInterface view_interface(const MachineBehavior& base,
                             const InterfaceChange& change) {
  for (const auto& [from, to] : change.rename) {
    if (!base.inputs().count(from) && !base.outputs().count(from)) {
      throw InterfaceError("renamed channel " + from +
                           " is not a channel of the base machine");
    }
    if (to.empty()) throw InterfaceError("empty channel name in rename");
  }
  for (const auto& name : change.hidden_inputs) {
    if (!base.inputs().count(name)) {
      throw InterfaceError("hidden channel " + name + " is not a base input");
    }
  }
  for (const auto& name : change.dropped_outputs) {
    if (!base.outputs().count(name)) {
      throw InterfaceError("dropped channel " + name + " is not a base output");
    }
  }

  ViewInterface out;
  for (const auto& [name, alphabet] : base.inputs()) {
    if (change.hidden_inputs.count(name)) continue;
    insert_unique(out.inputs, label_of(change, name), alphabet, "inputs");
  }
  for (const auto& [name, alphabet] : change.extra_inputs) {
    insert_unique(out.inputs, name, alphabet, "inputs");
  }
  for (const auto& [name, alphabet] : base.outputs()) {
    if (change.dropped_outputs.count(name)) continue;
    const auto label = label_of(change, name);
    insert_unique(out.outputs, label, alphabet, "outputs");
    if (base.chaotic().count(name)) out.chaotic.insert(label);
  }
  for (const auto& [name, alphabet] : change.chaotic_outputs) {
    insert_unique(out.outputs, name, alphabet, "outputs");
    out.chaotic.insert(name);
  }
  return out;
}

class ViewBuilder {
 public:
  explicit ViewBuilder(const BehaviorPtr& m) {
    if (const auto* view = dynamic_cast<const ViewMachine*>(m.get())) {
      base_ = view->base();
      change_ = view->change();
    } else {
      base_ = m;
    }
  }

  const MachineBehavior& base() const { return *base_; }
  InterfaceChange& change() { return change_; }
  std::string label(const std::string& name) const {
    return label_of(change_, name);
  }

  BehaviorPtr build() const {
    if (change_.is_identity()) return base_;
    return std::make_shared<ViewMachine>(base_, change_);
  }

 private:
  BehaviorPtr base_;
  InterfaceChange change_;
};

bool same_map(const ChannelMap& a, const ChannelMap& b) {
  return detail::same_channels(a, b);
}

}  // namespace

bool InterfaceChange::is_identity() const {
  return rename.empty() && hidden_inputs.empty() && dropped_outputs.empty() &&
         extra_inputs.empty() && chaotic_outputs.empty();
}

ViewMachine::Interface ViewMachine::interface_of(
    const BehaviorPtr& base, const InterfaceChange& change) {
  if (!base) throw InterfaceError("view over a null machine");
  auto vi = view_interface(*base, change);
  return {std::move(vi.inputs), std::move(vi.outputs), std::move(vi.chaotic)};
}

ViewMachine::ViewMachine(BehaviorPtr base, InterfaceChange change)
    : ViewMachine(base, change, interface_of(base, change)) {}

ViewMachine::ViewMachine(BehaviorPtr base, InterfaceChange change,
                         Interface iface)
    : MachineBehavior(std::move(iface.inputs), std::move(iface.outputs),
                      std::move(iface.chaotic)),
      base_(std::move(base)),
      change_(std::move(change)) {
  for (auto it = change_.rename.begin(); it != change_.rename.end();) {
    if (it->first == it->second) {
      it = change_.rename.erase(it);
    } else {
      ++it;
    }
  }
  const auto& order = input_order();
  for (const auto& name : base_->input_order()) {
    if (change_.hidden_inputs.count(name)) {
      input_source_.push_back(-1);
      continue;
    }
    auto pos = std::lower_bound(order.begin(), order.end(), label(name));
    input_source_.push_back(static_cast<int>(pos - order.begin()));
  }
  std::map<std::string, std::size_t> base_emitted;
  for (std::size_t k = 0; k < base_->emitted().size(); ++k) {
    const auto& name = base_->emitted()[k];
    if (!change_.dropped_outputs.count(name)) base_emitted.emplace(label(name), k);
  }
  for (const auto& name : emitted()) output_source_.push_back(base_emitted.at(name));
}

std::string ViewMachine::label(const std::string& base_channel) const {
  return label_of(change_, base_channel);
}

std::vector<State> ViewMachine::initial_states() const {
  return base_->initial_states();
}

void ViewMachine::emit(const State& state, std::vector<Valuation>& out) const {
  std::vector<Valuation> inner;
  base_->emit(state, inner);
  bool identity = output_source_.size() == base_->emitted().size();
  for (std::size_t k = 0; identity && k < output_source_.size(); ++k) {
    identity = output_source_[k] == k;
  }
  if (identity) {
    out.insert(out.end(), inner.begin(), inner.end());
    return;
  }
  std::vector<Valuation> projected;
  projected.reserve(inner.size());
  for (const auto& v : inner) {
    Valuation p;
    p.reserve(output_source_.size());
    for (auto k : output_source_) p.push_back(v[k]);
    projected.push_back(std::move(p));
  }
  detail::sort_unique(projected);
  out.insert(out.end(), projected.begin(), projected.end());
}

void ViewMachine::step(const State& state, const Valuation& input,
                       std::vector<State>& out) const {
  Valuation inner(input_source_.size());
  for (std::size_t k = 0; k < input_source_.size(); ++k) {
    if (input_source_[k] >= 0) {
      inner[k] = input[static_cast<std::size_t>(input_source_[k])];
    }
  }
  base_->step(state, inner, out);
}

ChannelSet ViewMachine::reads() const {
  ChannelSet out;
  for (const auto& name : base_->reads()) {
    if (!change_.hidden_inputs.count(name)) out.insert(label(name));
  }
  return out;
}

std::optional<GuardLiterals> ViewMachine::guard_literals() const {
  auto inner = base_->guard_literals();
  if (!inner) return std::nullopt;
  GuardLiterals out;
  for (const auto& name : input_order()) out[name];
  for (auto& [name, literals] : *inner) {
    if (change_.hidden_inputs.count(name)) continue;
    out[label(name)] = std::move(literals);
  }
  return out;
}

bool ViewMachine::same_definition(const MachineBehavior& other) const {
  const auto* o = dynamic_cast<const ViewMachine*>(&other);
  return o && structurally_equal(*base_, *o->base_) &&
         change_.rename == o->change_.rename &&
         change_.hidden_inputs == o->change_.hidden_inputs &&
         change_.dropped_outputs == o->change_.dropped_outputs &&
         same_map(change_.extra_inputs, o->change_.extra_inputs) &&
         same_map(change_.chaotic_outputs, o->change_.chaotic_outputs);
}

BehaviorPtr with_extra_inputs(const BehaviorPtr& m, const ChannelMap& channels) {
  if (channels.empty()) return m;
  ViewBuilder b(m);
  for (const auto& [name, alphabet] : channels) {
    if (m->inputs().count(name)) {
      throw AdaptionError("channel " + name + " is already an input");
    }
    b.change().extra_inputs[name] = alphabet;
  }
  return b.build();
}

BehaviorPtr with_hidden_inputs(const BehaviorPtr& m, const ChannelSet& channels) {
  if (channels.empty()) return m;
  ViewBuilder b(m);
  for (const auto& name : channels) {
    if (!m->inputs().count(name)) {
      throw AdaptionError("channel " + name + " is not an input");
    }
    if (b.change().extra_inputs.erase(name)) continue;
    for (const auto& base_name : b.base().input_order()) {
      if (!b.change().hidden_inputs.count(base_name) &&
          b.label(base_name) == name) {
        b.change().hidden_inputs.insert(base_name);
        break;
      }
    }
  }
  return b.build();
}

BehaviorPtr with_dropped_outputs(const BehaviorPtr& m,
                                 const ChannelSet& channels) {
  if (channels.empty()) return m;
  ViewBuilder b(m);
  for (const auto& name : channels) {
    if (!m->outputs().count(name)) {
      throw AdaptionError("channel " + name + " is not an output");
    }
    if (b.change().chaotic_outputs.erase(name)) continue;
    for (const auto& [base_name, _] : b.base().outputs()) {
      if (!b.change().dropped_outputs.count(base_name) &&
          b.label(base_name) == name) {
        b.change().dropped_outputs.insert(base_name);
        break;
      }
    }
  }
  return b.build();
}

BehaviorPtr with_chaotic_outputs(const BehaviorPtr& m,
                                 const ChannelMap& channels) {
  if (channels.empty()) return m;
  ViewBuilder b(m);
  for (const auto& [name, alphabet] : channels) {
    if (m->outputs().count(name)) {
      throw AdaptionError("channel " + name + " is already an output");
    }
    b.change().chaotic_outputs[name] = alphabet;
  }
  return b.build();
}

BehaviorPtr with_renamed_channel(const BehaviorPtr& m, const std::string& from,
                                 const std::string& to) {
  if (from == to) return m;
  const bool is_input = m->inputs().count(from) != 0;
  const bool is_output = m->outputs().count(from) != 0;
  if (!is_input && !is_output) return m;
  if (m->inputs().count(to) || m->outputs().count(to)) {
    throw AdaptionError("cannot rename " + from + " to existing channel " + to);
  }
  ViewBuilder b(m);
  auto& change = b.change();
  auto rekey = [&](ChannelMap& map) {
    auto node = map.extract(from);
    if (!node.empty()) {
      node.key() = to;
      map.insert(std::move(node));
    }
  };
  rekey(change.extra_inputs);
  rekey(change.chaotic_outputs);

  ChannelSet base_names;
  for (const auto& [name, _] : b.base().inputs()) {
    if (!change.hidden_inputs.count(name)) base_names.insert(name);
  }
  for (const auto& [name, _] : b.base().outputs()) {
    if (!change.dropped_outputs.count(name)) base_names.insert(name);
  }
  for (const auto& name : base_names) {
    if (b.label(name) != from) continue;
    if (name == to) {
      change.rename.erase(name);
    } else {
      change.rename[name] = to;
    }
  }
  return b.build();
}

BehaviorPtr adapt_interface(const BehaviorPtr& m, const ChannelMap& inputs,
                            const ChannelSet& outputs) {
  ChannelMap extra;
  for (const auto& [name, alphabet] : m->inputs()) {
    auto it = inputs.find(name);
    if (it == inputs.end()) {
      throw AdaptionError("input " + name + " missing from adapted interface");
    }
    if (!it->second->same_as(*alphabet)) {
      throw AdaptionError("input " + name + " changes alphabet");
    }
  }
  for (const auto& [name, alphabet] : inputs) {
    if (!m->inputs().count(name)) extra.emplace(name, alphabet);
  }
  ChannelSet dropped;
  for (const auto& name : outputs) {
    if (!m->outputs().count(name)) {
      throw AdaptionError("output " + name + " is not produced by the machine");
    }
  }
  for (const auto& [name, _] : m->outputs()) {
    if (!outputs.count(name)) dropped.insert(name);
  }
  return with_dropped_outputs(with_extra_inputs(m, extra), dropped);
}

}  // namespace archref
