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

#include "archref/rules.hpp"

#include <algorithm>
#include <sstream>

#include "detail.hpp"

namespace archref {

CheckMode CheckMode::syntactic() {
  CheckMode m;
  m.kind = Kind::kSyntactic;
  return m;
}

CheckMode CheckMode::bounded(std::size_t depth, std::size_t interval_bound) {
  CheckMode m;
  m.kind = Kind::kBounded;
  m.budget = EnumerationBudget::exhaustive(depth, interval_bound);
  return m;
}

CheckMode CheckMode::sampled(std::size_t depth, std::size_t samples,
                             std::uint64_t seed, std::size_t interval_bound) {
  CheckMode m;
  m.kind = Kind::kBounded;
  m.budget = EnumerationBudget::sampled(depth, samples, seed, interval_bound);
  return m;
}

CheckMode CheckMode::assumed() {
  CheckMode m;
  m.kind = Kind::kAssumed;
  return m;
}

std::string CheckMode::describe() const {
  if (kind == Kind::kBounded) return "bounded " + budget.describe();
  return to_string(kind);
}

std::string to_string(CheckMode::Kind kind) {
  switch (kind) {
    case CheckMode::Kind::kSyntactic:
      return "syntactic";
    case CheckMode::Kind::kBounded:
      return "bounded";
    case CheckMode::Kind::kAssumed:
      return "assumed";
  }
  return "?";
}

std::string to_string(Obligation::Status status) {
  switch (status) {
    case Obligation::Status::kDischarged:
      return "discharged";
    case Obligation::Status::kAssumed:
      return "assumed";
    case Obligation::Status::kFailed:
      return "failed";
  }
  return "?";
}

void ObligationLedger::append(const ObligationLedger& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

bool ObligationLedger::any_failed() const {
  return std::any_of(entries_.begin(), entries_.end(), [](const Obligation& o) {
    return o.status == Obligation::Status::kFailed;
  });
}

bool ObligationLedger::any_assumed() const {
  return std::any_of(entries_.begin(), entries_.end(), [](const Obligation& o) {
    return o.status == Obligation::Status::kAssumed;
  });
}

bool ObligationLedger::all_discharged() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Obligation& o) {
    return o.status == Obligation::Status::kDischarged;
  });
}

std::string ObligationLedger::report() const {
  std::ostringstream os;
  for (const auto& o : entries_) {
    os << "step " << o.step << " | " << o.rule << ' ' << o.subject << " | "
       << o.premise << " | " << o.discharge << " | " << to_string(o.status);
    if (!o.detail.empty()) os << " (" << o.detail << ')';
    os << '\n';
  }
  return os.str();
}

RuleRejection::RuleRejection(std::string rule, Obligation failed,
                             ObligationLedger ledger)
    : Error(rule + " rejected: " + failed.premise +
            (failed.detail.empty() ? "" : " (" + failed.detail + ")")),
      rule_(std::move(rule)),
      failed_(std::move(failed)),
      ledger_(std::move(ledger)) {}

// ---------------------------------------------------------------------------

namespace {

std::string join(const ChannelSet& names) {
  std::string out = "{";
  bool first = true;
  for (const auto& n : names) {
    if (!first) out += ", ";
    first = false;
    out += n;
  }
  return out + "}";
}

/// "label {x, y}", or nothing for an empty set.
std::string note(const std::string& label, const ChannelSet& names) {
  return names.empty() ? std::string() : label + " " + join(names);
}

ChannelSet diff(const ChannelSet& a, const ChannelSet& b) {
  ChannelSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::inserter(out, out.end()));
  return out;
}

ChannelSet meet(const ChannelSet& a, const ChannelSet& b) {
  ChannelSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.end()));
  return out;
}

ChannelSet unite(ChannelSet a, const ChannelSet& b) {
  a.insert(b.begin(), b.end());
  return a;
}

bool subset(const ChannelSet& a, const ChannelSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

/// Collects the obligations of one rule application.
class Premises {
 public:
  Premises(std::string rule, std::string subject, std::size_t step)
      : rule_(std::move(rule)), subject_(std::move(subject)), step_(step) {}

  Obligation make(std::string premise) const {
    Obligation o;
    o.step = step_;
    o.rule = rule_;
    o.subject = subject_;
    o.premise = std::move(premise);
    return o;
  }

  /// A structural premise: holds or rejects the rule.
  void require(bool holds, std::string premise, std::string detail = {}) {
    auto o = make(std::move(premise));
    o.discharge = "syntactic";
    o.detail = std::move(detail);
    if (!holds) {
      o.status = Obligation::Status::kFailed;
      reject(std::move(o));
    }
    ledger_.add(std::move(o));
  }

  void discharged(std::string premise, std::string how, std::string detail = {}) {
    auto o = make(std::move(premise));
    o.discharge = std::move(how);
    o.detail = std::move(detail);
    ledger_.add(std::move(o));
  }

  void assumed(std::string premise, std::string detail = {}) {
    auto o = make(std::move(premise));
    o.discharge = "assumed";
    o.status = Obligation::Status::kAssumed;
    o.detail = std::move(detail);
    ledger_.add(std::move(o));
  }

  /// Records a bounded verdict; rejects on failure.
  void bounded(std::string premise, const CheckMode& mode, const Verdict& v) {
    auto o = make(std::move(premise));
    o.discharge = mode.describe();
    o.detail = v.coverage;
    switch (v.status) {
      case Verdict::Status::kHolds:
        break;
      case Verdict::Status::kInconclusive:
        o.status = Obligation::Status::kAssumed;
        o.detail = "inconclusive: " + v.coverage;
        break;
      case Verdict::Status::kFails:
        o.status = Obligation::Status::kFailed;
        o.counterexample = v.witness;
        if (v.witness) o.detail = v.witness->note;
        reject(std::move(o));
    }
    ledger_.add(std::move(o));
  }

  [[noreturn]] void reject(Obligation o) {
    auto ledger = ledger_;
    ledger.add(o);
    throw RuleRejection(rule_, std::move(o), std::move(ledger));
  }

  ObligationLedger take() { return std::move(ledger_); }

 private:
  std::string rule_;
  std::string subject_;
  std::size_t step_;
  ObligationLedger ledger_;
};

const Component& component_of(const System& s, const std::string& name,
                              Premises& p) {
  const auto* c = s.find(name);
  p.require(c != nullptr, name + " ∈ C");
  return *c;
}

/// Replaces the behavior and interface of one component, dropping its
/// recorded subarchitecture.
System with_behavior(const System& s, const std::string& name, BehaviorPtr behavior) {
  System out = s;
  auto* c = out.find(name);
  c->inputs = behavior->inputs();
  c->outputs = behavior->outputs();
  c->behavior = std::move(behavior);
  c->sub.reset();
  return out;
}

ChannelSet input_names(const System& s) { return names_of(s.inputs); }
ChannelSet output_names(const System& s) { return names_of(s.outputs); }
ChannelSet controlled_names(const System& s) { return names_of(s.controlled()); }

ChannelSet consumed_except(const System& s, const std::set<std::string>& skip) {
  ChannelSet out;
  for (const auto& c : s.components) {
    if (skip.count(c.name)) continue;
    for (const auto& [ch, _] : c.inputs) out.insert(ch);
  }
  return out;
}

void check_interface_match(const Component& c, const MachineBehavior& beta,
                           Premises& p) {
  p.require(detail::same_channels(c.inputs, beta.inputs()) &&
                detail::same_channels(c.outputs, beta.outputs()),
            "interface(β) = (in." + c.name + ", out." + c.name + ")");
}

/// The syntactic-then-bounded discharge of "β(i) ⊆ behav.c(i)".
void discharge_inclusion(const std::string& premise, const MachineBehavior& beta,
                         const MachineBehavior& current, const CheckMode& mode,
                         Premises& p) {
  if (mode.kind == CheckMode::Kind::kAssumed) {
    p.assumed(premise);
    return;
  }
  if (submachine_refines(beta, current)) {
    p.discharged(premise, "syntactic", "simulation");
    return;
  }
  if (mode.kind == CheckMode::Kind::kSyntactic) {
    p.assumed(premise, "no simulation found");
    return;
  }
  p.bounded(premise, mode, check_machine_inclusion(beta, current, mode.budget));
}

}  // namespace

// ---------------------------------------------------------------------------

RuleResult refine_behavior(const System& s, const std::string& component,
                           BehaviorPtr replacement, const CheckMode& mode,
                           std::size_t step) {
  Premises p("refine-behavior", component, step);
  const auto& c = component_of(s, component, p);
  p.require(replacement != nullptr, "β is defined");
  check_interface_match(c, *replacement, p);
  discharge_inclusion("∀i: β(i) ⊆ behav." + component + "(i)", *replacement,
                      *c.behavior, mode, p);
  return {with_behavior(s, component, std::move(replacement)), p.take()};
}

RuleResult refine_behavior_with_invariant(const System& s,
                                          const std::string& component,
                                          BehaviorPtr replacement,
                                          const Invariant& psi,
                                          const CheckMode& mode,
                                          std::size_t step) {
  Premises p("refine-behavior-with-invariant", component, step);
  const auto& c = component_of(s, component, p);
  p.require(replacement != nullptr, "β is defined");
  check_interface_match(c, *replacement, p);
  const auto flow = unite(input_names(s), controlled_names(s));
  p.require(subset(psi.domain, flow),
            "dom(" + psi.name + ") ⊆ I ∪ out.C",
            "domain " + join(psi.domain));

  const std::string no_restriction = psi.name + " does not restrict I";
  if (psi.trivially_true || meet(psi.domain, input_names(s)).empty()) {
    p.discharged(no_restriction, "syntactic", "domain avoids system inputs");
  } else if (mode.kind == CheckMode::Kind::kBounded) {
    auto small = mode.budget;
    small.depth = std::min<std::size_t>(small.depth, 3);
    CheckMode shallow = mode;
    shallow.budget = small;
    p.bounded(no_restriction, shallow, validate_invariant(s, psi, small));
  } else {
    p.assumed(no_restriction);
  }

  const std::string premise1 =
      "(∀c ∈ C: l↾out.c ∈ behav.c(l↾in.c)) ⇒ " + psi.name + "(l)";
  if (psi.trivially_true) {
    p.discharged(premise1, "syntactic", "maximal invariant");
  } else if (mode.kind == CheckMode::Kind::kBounded) {
    p.bounded(premise1, mode, check_invariant_validity(s, psi, mode.budget));
  } else {
    p.assumed(premise1);
  }

  const std::string premise2 = psi.name + "(l) ⇒ β(l↾in." + component +
                               ") ⊆ behav." + component + "(l↾in." + component + ")";
  if (mode.kind == CheckMode::Kind::kAssumed) {
    p.assumed(premise2);
  } else if (submachine_refines(*replacement, *c.behavior)) {
    p.discharged(premise2, "syntactic", "simulation");
  } else if (mode.kind == CheckMode::Kind::kSyntactic) {
    p.assumed(premise2, "no simulation found");
  } else {
    p.bounded(premise2, mode,
              check_refinement_under_invariant(s, component, *replacement, psi,
                                               mode.budget));
  }
  return {with_behavior(s, component, std::move(replacement)), p.take()};
}

RuleResult add_output_channel(const System& s, const std::string& component,
                              const std::string& channel, AlphabetPtr alphabet,
                              std::size_t step) {
  Premises p("add-output-channel", component, step);
  const auto& c = component_of(s, component, p);
  p.require(alphabet != nullptr, channel + " has a declared alphabet");
  const auto used = names_of(s.all_channels());
  p.require(!input_names(s).count(channel) && !controlled_names(s).count(channel),
            channel + " ∉ I ∪ out.C");
  p.require(!used.count(channel), channel + " is unused in S");
  auto beta = with_chaotic_outputs(c.behavior, {{channel, alphabet}});
  return {with_behavior(s, component, std::move(beta)), p.take()};
}

RuleResult remove_output_channel(const System& s, const std::string& component,
                                 const std::string& channel, std::size_t step) {
  Premises p("remove-output-channel", component, step);
  const auto& c = component_of(s, component, p);
  p.require(c.outputs.count(channel) != 0, channel + " ∈ out." + component);
  const auto readers = s.readers(channel);
  std::string who;
  for (const auto& r : readers) who += (who.empty() ? "" : ", ") + r;
  p.require(!output_names(s).count(channel) && readers.empty(),
            channel + " ∉ O ∪ in.C",
            readers.empty() ? std::string(output_names(s).count(channel) ? "exported" : "")
                            : "read by " + who);
  auto beta = with_dropped_outputs(c.behavior, {channel});
  return {with_behavior(s, component, std::move(beta)), p.take()};
}

RuleResult add_input_channel(const System& s, const std::string& component,
                             const std::string& channel, std::size_t step) {
  Premises p("add-input-channel", component, step);
  const auto& c = component_of(s, component, p);
  p.require(!c.inputs.count(channel), channel + " ∉ in." + component);
  const auto controlled = s.controlled();
  p.require(s.inputs.count(channel) || controlled.count(channel),
            channel + " ∈ I ∪ out.C");
  auto it = s.inputs.find(channel);
  const auto& alphabet = it != s.inputs.end() ? it->second : controlled.at(channel);
  auto beta = with_extra_inputs(c.behavior, {{channel, alphabet}});
  return {with_behavior(s, component, std::move(beta)), p.take()};
}

RuleResult remove_input_channel(const System& s, const std::string& component,
                                const std::string& channel, const CheckMode& mode,
                                std::size_t step) {
  Premises p("remove-input-channel", component, step);
  const auto& c = component_of(s, component, p);
  p.require(c.inputs.count(channel) != 0, channel + " ∈ in." + component);
  const std::string premise =
      "behav." + component + " does not depend on " + channel;
  auto beta = with_hidden_inputs(c.behavior, {channel});
  if (mode.kind == CheckMode::Kind::kAssumed) {
    p.assumed(premise);
  } else if (!c.behavior->reads().count(channel)) {
    p.discharged(premise, "syntactic", "no guard or update reads " + channel);
  } else if (mode.kind == CheckMode::Kind::kSyntactic) {
    p.assumed(premise, "the machine reads " + channel);
  } else {
    // Feeding the channel versus ignoring it must give the same traces.
    auto blind = with_extra_inputs(beta, {{channel, c.inputs.at(channel)}});
    auto forward = check_machine_inclusion(*c.behavior, *blind, mode.budget);
    if (forward.holds()) {
      auto backward = check_machine_inclusion(*blind, *c.behavior, mode.budget);
      backward.coverage = forward.coverage + "; " + backward.coverage;
      p.bounded(premise, mode, backward);
    } else {
      p.bounded(premise, mode, forward);
    }
  }
  return {with_behavior(s, component, std::move(beta)), p.take()};
}

RuleResult add_component(const System& s, const std::string& name,
                         std::size_t step) {
  Premises p("add-component", name, step);
  p.require(!name.empty(), "name is nonempty");
  p.require(s.find(name) == nullptr, name + " is fresh");
  System out = s;
  out.components.push_back(make_component(name, trivial_behavior()));
  return {std::move(out), p.take()};
}

RuleResult remove_component(const System& s, const std::string& name,
                            std::size_t step) {
  Premises p("remove-component", name, step);
  const auto& c = component_of(s, name, p);
  p.require(c.outputs.empty(), "out." + name + " = ∅",
            c.outputs.empty() ? "" : "controls " + join(names_of(c.outputs)));
  System out = s;
  out.components.erase(std::find_if(out.components.begin(), out.components.end(),
                                    [&](const Component& k) { return k.name == name; }));
  return {std::move(out), p.take()};
}

RuleResult expand(const System& s, const std::string& component, std::size_t step) {
  Premises p("expand", component, step);
  const auto& c = component_of(s, component, p);
  p.require(c.sub != nullptr, component + " = (n, I_T, O_T, [[T]])",
            c.sub ? "recorded subarchitecture" : "no subarchitecture recorded");
  const System& t = *c.sub;
  p.require(detail::same_channels(t.inputs, c.inputs) &&
                detail::same_channels(t.outputs, c.outputs),
            "(in, out)." + component + " = (I_T, O_T)");

  const auto inner = controlled_names(t);
  ChannelSet outer;
  for (const auto& k : s.components) {
    if (k.name == component) continue;
    for (const auto& [ch, _] : k.outputs) outer.insert(ch);
  }
  outer = unite(outer, names_of(c.outputs));
  const auto collide = meet(inner, outer);
  p.require(collide == names_of(c.outputs), "out.C_T ∩ out.C_S = out." + component,
            note("collisions", diff(collide, names_of(c.outputs))));
  const auto with_inputs = meet(inner, input_names(s));
  p.require(with_inputs.empty(), "out.C_T ∩ I_S = ∅", note("collisions", with_inputs));

  ChannelSet clash;
  for (const auto& k : t.components) {
    const auto* other = s.find(k.name);
    if (other && other->name != component) clash.insert(k.name);
  }
  p.require(clash.empty(), "names(C_T) fresh in S", note("clashes", clash));

  System out = s;
  out.components.erase(std::find_if(out.components.begin(), out.components.end(),
                                    [&](const Component& k) { return k.name == component; }));
  out.components.insert(out.components.end(), t.components.begin(), t.components.end());
  return {std::move(out), p.take()};
}

RuleResult fold(const System& s, const std::vector<std::string>& components,
                const std::string& name, const std::optional<ChannelSet>& inputs,
                const std::optional<ChannelSet>& outputs, std::size_t step) {
  std::string subject = name + " <- ";
  for (std::size_t k = 0; k < components.size(); ++k) {
    subject += (k ? "," : "") + components[k];
  }
  Premises p("fold", subject, step);
  p.require(!components.empty(), "C_T ≠ ∅");
  std::set<std::string> chosen(components.begin(), components.end());
  p.require(chosen.size() == components.size(), "C_T lists each component once");
  System t;
  for (const auto& n : components) {
    const auto& c = component_of(s, n, p);
    t.components.push_back(c);
  }
  bool fresh = true;
  for (const auto& c : s.components) {
    if (!chosen.count(c.name) && c.name == name) fresh = false;
  }
  p.require(!name.empty() && fresh, name + " is fresh");

  const auto in_t = names_of(t.consumed());
  const auto out_t = names_of(t.controlled());
  const auto flow = unite(input_names(s), controlled_names(s));
  const ChannelSet in_low = diff(in_t, out_t);
  const ChannelSet in_high = diff(flow, out_t);
  const ChannelSet out_low =
      meet(out_t, unite(output_names(s), consumed_except(s, chosen)));
  const ChannelSet& out_high = out_t;
  const ChannelSet in_sel = inputs.value_or(in_low);
  const ChannelSet out_sel = outputs.value_or(out_low);

  p.require(subset(in_low, in_sel), "in.C_T \\ out.C_T ⊆ I_T",
            note("missing", diff(in_low, in_sel)));
  p.require(subset(in_sel, in_high), "I_T ⊆ (I ∪ out.C) \\ out.C_T",
            note("excess", diff(in_sel, in_high)));
  p.require(subset(out_low, out_sel), "out.C_T ∩ (O ∪ in.(C \\ C_T)) ⊆ O_T",
            note("missing", diff(out_low, out_sel)));
  p.require(subset(out_sel, out_high), "O_T ⊆ out.C_T",
            note("excess", diff(out_sel, out_high)));

  const auto all = s.all_channels();
  for (const auto& ch : in_sel) t.inputs.emplace(ch, all.at(ch));
  for (const auto& ch : out_sel) t.outputs.emplace(ch, all.at(ch));

  System out;
  out.inputs = s.inputs;
  out.outputs = s.outputs;
  bool placed = false;
  for (const auto& c : s.components) {
    if (!chosen.count(c.name)) {
      out.components.push_back(c);
    } else if (!placed) {
      out.components.push_back(as_component(t, name));
      placed = true;
    }
  }
  return {std::move(out), p.take()};
}

namespace {

ChannelMap rekey(const ChannelMap& m, const std::string& from, const std::string& to) {
  ChannelMap out = m;
  auto node = out.extract(from);
  if (!node.empty()) {
    node.key() = to;
    out.insert(std::move(node));
  }
  return out;
}

/// Renames `from` everywhere in `s`, system interface included.
System rename_everywhere(const System& s, const std::string& from,
                         const std::string& to) {
  System out;
  out.inputs = rekey(s.inputs, from, to);
  out.outputs = rekey(s.outputs, from, to);
  for (const auto& c : s.components) {
    Component k = c;
    k.inputs = rekey(c.inputs, from, to);
    k.outputs = rekey(c.outputs, from, to);
    if (c.sub) {
      auto sub = std::make_shared<const System>(rename_everywhere(*c.sub, from, to));
      k.behavior = blackbox(*sub);
      k.sub = std::move(sub);
    } else {
      k.behavior = with_renamed_channel(c.behavior, from, to);
    }
    out.components.push_back(std::move(k));
  }
  return out;
}

/// Channel names used anywhere in `s` or the subarchitectures touching
/// `from`.
ChannelSet names_in_scope(const System& s, const std::string& from) {
  auto out = names_of(s.all_channels());
  for (const auto& c : s.components) {
    if (c.sub && (c.inputs.count(from) || c.outputs.count(from))) {
      auto inner = names_in_scope(*c.sub, from);
      out.insert(inner.begin(), inner.end());
    }
  }
  return out;
}

}  // namespace

RuleResult rename_channel(const System& s, const std::string& from,
                          const std::string& to, std::size_t step) {
  Premises p("rename-channel", from + " -> " + to, step);
  const auto used = names_of(s.all_channels());
  p.require(used.count(from) != 0, from + " is a channel of S");
  p.require(!input_names(s).count(from) && !output_names(s).count(from),
            from + " ∉ I ∪ O");
  p.require(!to.empty() && !names_in_scope(s, from).count(to), to + " is unused in S");
  return {rename_everywhere(s, from, to), p.take()};
}

// ---------------------------------------------------------------------------
// Scripts

namespace {

struct RuleSpelling {
  RefinementStep::Kind kind;
  const char* name;
};

constexpr RuleSpelling kSpellings[] = {
    {RefinementStep::Kind::kRefineBehavior, "refine-behavior"},
    {RefinementStep::Kind::kRefineBehaviorWithInvariant,
     "refine-behavior-with-invariant"},
    {RefinementStep::Kind::kAddOutputChannel, "add-output-channel"},
    {RefinementStep::Kind::kRemoveOutputChannel, "remove-output-channel"},
    {RefinementStep::Kind::kAddInputChannel, "add-input-channel"},
    {RefinementStep::Kind::kRemoveInputChannel, "remove-input-channel"},
    {RefinementStep::Kind::kAddComponent, "add-component"},
    {RefinementStep::Kind::kRemoveComponent, "remove-component"},
    {RefinementStep::Kind::kExpand, "expand"},
    {RefinementStep::Kind::kFold, "fold"},
    {RefinementStep::Kind::kRenameChannel, "rename-channel"},
};

template <class T>
const T& payload_as(const RefinementStep& step) {
  const auto* p = std::get_if<T>(&step.payload);
  if (!p) {
    throw DefinitionError("step " + rule_name(step.kind) +
                          " carries the wrong kind of payload");
  }
  return *p;
}

}  // namespace

std::string rule_name(RefinementStep::Kind kind) {
  for (const auto& s : kSpellings) {
    if (s.kind == kind) return s.name;
  }
  return "?";
}

std::optional<RefinementStep::Kind> rule_kind(const std::string& name) {
  for (const auto& s : kSpellings) {
    if (name == s.name) return s.kind;
  }
  return std::nullopt;
}

void validate_step(const RefinementStep& step) {
  using K = RefinementStep::Kind;
  switch (step.kind) {
    case K::kRefineBehavior:
      payload_as<BehaviorPayload>(step);
      break;
    case K::kRefineBehaviorWithInvariant:
      payload_as<InvariantPayload>(step);
      break;
    case K::kAddOutputChannel:
    case K::kRemoveOutputChannel:
    case K::kAddInputChannel:
    case K::kRemoveInputChannel:
      payload_as<ChannelPayload>(step);
      break;
    case K::kAddComponent:
    case K::kRemoveComponent:
    case K::kExpand:
      payload_as<ComponentPayload>(step);
      break;
    case K::kFold:
      payload_as<FoldPayload>(step);
      break;
    case K::kRenameChannel:
      payload_as<RenamePayload>(step);
      break;
  }
}

namespace {

BehaviorPtr lookup_machine(const RuleContext& ctx, const std::string& name) {
  auto it = ctx.machines.find(name);
  if (it == ctx.machines.end()) throw DefinitionError("unknown machine " + name);
  return it->second;
}

}  // namespace

RuleResult apply_step(const System& s, const RefinementStep& step,
                      const RuleContext& context, std::size_t index) {
  using K = RefinementStep::Kind;
  validate_step(step);
  const CheckMode mode = step.mode.value_or(context.default_mode);
  switch (step.kind) {
    case K::kRefineBehavior: {
      const auto& p = payload_as<BehaviorPayload>(step);
      return refine_behavior(s, p.component, lookup_machine(context, p.machine), mode,
                             index);
    }
    case K::kRefineBehaviorWithInvariant: {
      const auto& p = payload_as<InvariantPayload>(step);
      auto it = context.invariants.find(p.invariant);
      if (it == context.invariants.end()) {
        throw DefinitionError("unknown invariant " + p.invariant);
      }
      return refine_behavior_with_invariant(
          s, p.component, lookup_machine(context, p.machine), it->second, mode, index);
    }
    case K::kAddOutputChannel: {
      const auto& p = payload_as<ChannelPayload>(step);
      auto it = context.channels.find(p.channel);
      if (it == context.channels.end()) {
        throw DefinitionError("channel " + p.channel + " is not declared");
      }
      return add_output_channel(s, p.component, p.channel, it->second, index);
    }
    case K::kRemoveOutputChannel: {
      const auto& p = payload_as<ChannelPayload>(step);
      return remove_output_channel(s, p.component, p.channel, index);
    }
    case K::kAddInputChannel: {
      const auto& p = payload_as<ChannelPayload>(step);
      return add_input_channel(s, p.component, p.channel, index);
    }
    case K::kRemoveInputChannel: {
      const auto& p = payload_as<ChannelPayload>(step);
      return remove_input_channel(s, p.component, p.channel, mode, index);
    }
    case K::kAddComponent:
      return add_component(s, payload_as<ComponentPayload>(step).component, index);
    case K::kRemoveComponent:
      return remove_component(s, payload_as<ComponentPayload>(step).component, index);
    case K::kExpand:
      return expand(s, payload_as<ComponentPayload>(step).component, index);
    case K::kFold: {
      const auto& p = payload_as<FoldPayload>(step);
      return fold(s, p.components, p.name, p.inputs, p.outputs, index);
    }
    case K::kRenameChannel: {
      const auto& p = payload_as<RenamePayload>(step);
      return rename_channel(s, p.from, p.to, index);
    }
  }
  throw DefinitionError("unknown rule");
}

ScriptError::ScriptError(std::size_t step, std::string rule,
                         const std::string& message, ObligationLedger ledger,
                         System last)
    : Error("step " + std::to_string(step) + " (" + rule + "): " + message),
      step_(step),
      rule_(std::move(rule)),
      ledger_(std::move(ledger)),
      last_(std::move(last)) {}

ScriptResult apply_script(const System& s, const std::vector<RefinementStep>& steps,
                          const RuleContext& context) {
  ScriptResult result;
  result.system = s;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto index = k + 1;
    try {
      auto r = apply_step(result.system, steps[k], context, index);
      result.ledger.append(r.ledger);
      result.system = std::move(r.system);
      result.trail.push_back(result.system);
    } catch (const RuleRejection& e) {
      auto ledger = result.ledger;
      ledger.append(e.ledger());
      throw ScriptError(index, e.rule(), e.what(), std::move(ledger), result.system);
    } catch (const ConsistencyError& e) {
      throw ScriptError(index, rule_name(steps[k].kind), e.what(), result.ledger,
                        result.system);
    } catch (const Error& e) {
      throw ScriptError(index, rule_name(steps[k].kind), e.what(), result.ledger,
                        result.system);
    }
  }
  return result;
}

}  // namespace archref
