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

#include "archref/system.hpp"
#include "detail.hpp"

namespace archref {

namespace {

struct CompositeInterface {
  ChannelMap inputs;
  ChannelMap outputs;
  ChannelSet chaotic;
  ChannelSet materialized;
};

CompositeInterface composite_interface(const std::vector<BehaviorPtr>& parts,
                                       const ComposeOptions& options) {
  CompositeInterface out;
  ChannelMap everything;
  auto remember = [&everything](const std::string& name, const AlphabetPtr& a) {
    auto [it, fresh] = everything.emplace(name, a);
    if (!fresh && !it->second->same_as(*a)) {
      throw CompositionError("channel " + name + " is used with alphabets " +
                             it->second->name() + " and " + a->name());
    }
  };
  ChannelSet read;
  for (const auto& p : parts) {
    if (!p) throw CompositionError("null part in composition");
    for (const auto& [name, alphabet] : p->outputs()) {
      if (out.outputs.count(name)) {
        throw CompositionError("channel " + name +
                               " is an output of more than one part");
      }
      remember(name, alphabet);
      out.outputs.emplace(name, alphabet);
    }
    for (const auto& [name, alphabet] : p->inputs()) {
      remember(name, alphabet);
      read.insert(name);
    }
  }
  for (const auto& p : parts) {
    for (const auto& [name, alphabet] : p->inputs()) {
      if (!out.outputs.count(name)) out.inputs.emplace(name, alphabet);
    }
    for (const auto& name : p->chaotic()) {
      if (read.count(name) || options.materialize.count(name)) {
        out.materialized.insert(name);
      } else {
        out.chaotic.insert(name);
      }
    }
  }
  return out;
}

/**
 * Lock-step product. State layout: for each part its state length followed
 * by its state, then the chosen emission index of each part, then the
 * chosen interval index of each materialized chaotic channel.
 */
class CompositeMachine final : public MachineBehavior {
 public:
  CompositeMachine(std::vector<BehaviorPtr> parts, ComposeOptions options,
                   CompositeInterface iface)
      : MachineBehavior(iface.inputs, iface.outputs, iface.chaotic),
        parts_(std::move(parts)),
        options_(std::move(options)) {
    materialized_ = detail::ordered(iface.materialized);
    for (const auto& name : materialized_) {
      chaos_values_.push_back(
          enumerate_intervals(*outputs().at(name), options_.chaos_bound));
    }
    // Sources of the composite emission.
    for (const auto& name : emitted()) {
      emit_source_.push_back(locate(name));
    }
    for (const auto& p : parts_) {
      std::vector<Source> sources;
      for (const auto& name : p->input_order()) {
        if (outputs().count(name)) {
          sources.push_back(locate(name));
        } else {
          auto pos = std::lower_bound(input_order().begin(), input_order().end(), name);
          sources.push_back({Source::kInput,
                             static_cast<std::size_t>(pos - input_order().begin()), 0});
        }
      }
      input_sources_.push_back(std::move(sources));
    }
  }

  MachineKind kind() const override { return MachineKind::kComposite; }
  const std::vector<BehaviorPtr>& parts() const { return parts_; }
  const ComposeOptions& options() const { return options_; }

  std::vector<State> initial_states() const override {
    std::vector<std::vector<State>> per_part;
    for (const auto& p : parts_) {
      auto init = p->initial_states();
      detail::sort_unique(init);
      per_part.push_back(std::move(init));
    }
    std::vector<State> out;
    expand(per_part, out);
    return out;
  }

  void emit(const State& state, std::vector<Valuation>& out) const override {
    Decoded d = decode(state);
    Valuation v;
    v.reserve(emit_source_.size());
    for (const auto& src : emit_source_) v.push_back(value(d, src));
    out.push_back(std::move(v));
  }

  void step(const State& state, const Valuation& input,
            std::vector<State>& out) const override {
    Decoded d = decode(state);
    std::vector<std::vector<State>> per_part;
    per_part.reserve(parts_.size());
    for (std::size_t k = 0; k < parts_.size(); ++k) {
      Valuation in;
      in.reserve(input_sources_[k].size());
      for (const auto& src : input_sources_[k]) {
        in.push_back(src.kind == Source::kInput ? input[src.index] : value(d, src));
      }
      std::vector<State> succ;
      parts_[k]->step(d.states[k], in, succ);
      detail::sort_unique(succ);
      per_part.push_back(std::move(succ));
    }
    expand(per_part, out);
  }

  ChannelSet reads() const override {
    ChannelSet out;
    for (const auto& p : parts_) {
      for (const auto& name : p->reads()) {
        if (inputs().count(name)) out.insert(name);
      }
    }
    return out;
  }

  bool same_definition(const MachineBehavior& other) const override {
    const auto* o = dynamic_cast<const CompositeMachine*>(&other);
    if (!o || o->parts_.size() != parts_.size() ||
        o->options_.chaos_bound != options_.chaos_bound ||
        o->options_.materialize != options_.materialize) {
      return false;
    }
    for (std::size_t k = 0; k < parts_.size(); ++k) {
      if (!structurally_equal(*parts_[k], *o->parts_[k])) return false;
    }
    return true;
  }

 private:
  struct Source {
    enum Kind { kInput, kPart, kChaos, kSilent } kind;
    std::size_t index;  // input position, part index or chaos index
    std::size_t slot;   // emitted position within the part
  };

  struct Decoded {
    std::vector<State> states;
    std::vector<std::int32_t> emission;
    std::vector<std::int32_t> chaos;
    std::vector<std::vector<Valuation>> emissions;
  };

  Source locate(const std::string& name) const {
    for (std::size_t k = 0; k < parts_.size(); ++k) {
      if (!parts_[k]->outputs().count(name)) continue;
      const auto& em = parts_[k]->emitted();
      auto pos = std::find(em.begin(), em.end(), name);
      if (pos != em.end()) {
        return {Source::kPart, k, static_cast<std::size_t>(pos - em.begin())};
      }
      auto m = std::lower_bound(materialized_.begin(), materialized_.end(), name);
      if (m != materialized_.end() && *m == name) {
        return {Source::kChaos, static_cast<std::size_t>(m - materialized_.begin()), 0};
      }
      return {Source::kSilent, 0, 0};
    }
    return {Source::kSilent, 0, 0};
  }

  Interval value(const Decoded& d, const Source& src) const {
    switch (src.kind) {
      case Source::kPart:
        return d.emissions[src.index][static_cast<std::size_t>(d.emission[src.index])]
                          [src.slot];
      case Source::kChaos:
        return chaos_values_[src.index][static_cast<std::size_t>(d.chaos[src.index])];
      default:
        return {};
    }
  }

  Decoded decode(const State& state) const {
    Decoded d;
    std::size_t at = 0;
    for (std::size_t k = 0; k < parts_.size(); ++k) {
      const auto len = static_cast<std::size_t>(state.at(at++));
      d.states.emplace_back(state.begin() + static_cast<long>(at),
                            state.begin() + static_cast<long>(at + len));
      at += len;
    }
    for (std::size_t k = 0; k < parts_.size(); ++k) d.emission.push_back(state.at(at++));
    for (std::size_t k = 0; k < materialized_.size(); ++k) d.chaos.push_back(state.at(at++));
    d.emissions.resize(parts_.size());
    for (std::size_t k = 0; k < parts_.size(); ++k) {
      parts_[k]->emit(d.states[k], d.emissions[k]);
    }
    return d;
  }

  // All combinations of part states, emission choices and chaos choices.
  void expand(const std::vector<std::vector<State>>& per_part,
              std::vector<State>& out) const {
    State prefix;
    expand_part(per_part, 0, prefix, std::vector<std::int32_t>{}, out);
  }

  void expand_part(const std::vector<std::vector<State>>& per_part, std::size_t k,
                   State& prefix, std::vector<std::int32_t> counts,
                   std::vector<State>& out) const {
    if (k == per_part.size()) {
      State base = prefix;
      expand_choices(base, counts, 0, out);
      return;
    }
    std::vector<Valuation> emissions;
    for (const auto& s : per_part[k]) {
      const auto mark = prefix.size();
      prefix.push_back(static_cast<std::int32_t>(s.size()));
      prefix.insert(prefix.end(), s.begin(), s.end());
      emissions.clear();
      parts_[k]->emit(s, emissions);
      auto next = counts;
      next.push_back(static_cast<std::int32_t>(emissions.size()));
      expand_part(per_part, k + 1, prefix, std::move(next), out);
      prefix.resize(mark);
    }
  }

  void expand_choices(State& state, const std::vector<std::int32_t>& counts,
                      std::size_t k, std::vector<State>& out) const {
    const std::size_t total = counts.size() + materialized_.size();
    if (k == total) {
      out.push_back(state);
      return;
    }
    const auto n = k < counts.size()
                       ? counts[k]
                       : static_cast<std::int32_t>(chaos_values_[k - counts.size()].size());
    for (std::int32_t i = 0; i < n; ++i) {
      state.push_back(i);
      expand_choices(state, counts, k + 1, out);
      state.pop_back();
    }
  }

  std::vector<BehaviorPtr> parts_;
  ComposeOptions options_;
  std::vector<std::string> materialized_;
  std::vector<std::vector<Interval>> chaos_values_;
  std::vector<Source> emit_source_;
  std::vector<std::vector<Source>> input_sources_;
};

}  // namespace

std::optional<CompositeParts> composite_parts(const MachineBehavior& m) {
  const auto* c = dynamic_cast<const CompositeMachine*>(&m);
  if (!c) return std::nullopt;
  return CompositeParts{c->parts(), c->options()};
}

BehaviorPtr compose(const std::vector<BehaviorPtr>& parts,
                    const ComposeOptions& options) {
  if (parts.empty()) return trivial_behavior();
  auto iface = composite_interface(parts, options);
  if (parts.size() == 1 && iface.materialized.empty()) {
    bool feedback = false;
    for (const auto& [name, _] : parts[0]->inputs()) {
      if (parts[0]->outputs().count(name)) feedback = true;
    }
    if (!feedback) return parts[0];
  }
  return std::make_shared<CompositeMachine>(parts, options, std::move(iface));
}

}  // namespace archref
