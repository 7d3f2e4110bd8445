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

#include "archref/oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "detail.hpp"

namespace archref {

namespace {

constexpr std::size_t kDefaultCeiling = 200'000'000;
constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

struct CeilingReached {};

/// Every interval assignment of `names` (bounded by L), in `names` order.
std::vector<Valuation> tick_valuations(const std::vector<std::string>& names,
                                       const ChannelMap& alphabets,
                                       std::size_t interval_bound,
                                       std::size_t cap) {
  std::vector<std::vector<Interval>> options;
  for (const auto& name : names) {
    options.push_back(enumerate_intervals(*alphabets.at(name), interval_bound));
  }
  return detail::product(options, cap);
}

NamedStreamTuple tuple_of(const std::vector<Valuation>& history,
                          const std::vector<std::string>& order,
                          const ChannelSet& pad = {}) {
  auto t = detail::from_per_tick(history, order);
  if (pad.empty()) return t;
  auto entries = t.entries();
  for (const auto& name : pad) {
    entries.emplace(name, TimedStreamPrefix::silent(history.size()));
  }
  return NamedStreamTuple(std::move(entries), history.size());
}

std::string coverage_of(const EnumerationBudget& budget, std::size_t nodes) {
  return budget.describe() + ", " + std::to_string(nodes) + " nodes";
}

/// Wraps `fine` so that its chaotic outputs emitted by `coarse` become
/// concrete, bounded nondeterministic choices.
BehaviorPtr materialize_against(const BehaviorPtr& fine,
                                const MachineBehavior& coarse,
                                std::size_t interval_bound) {
  ChannelSet needed;
  for (const auto& name : coarse.emitted()) {
    if (fine->chaotic().count(name)) needed.insert(name);
  }
  if (needed.empty()) return fine;
  ComposeOptions options;
  options.chaos_bound = interval_bound;
  options.materialize = needed;
  return compose({fine}, options);
}

BehaviorPtr borrow(const MachineBehavior& m) {
  return BehaviorPtr(BehaviorPtr{}, &m);
}

// ---------------------------------------------------------------------------
// Inclusion search shared by the machine, system and invariant checks.

struct Child {
  Valuation input;  // in the machines' input order
  Valuation flow;   // extra channels recorded for witnesses
  std::size_t next = 0;
};

class InputSource {
 public:
  virtual ~InputSource() = default;
  virtual void children(std::size_t context, std::vector<Child>& out) = 0;
};

class ProductSource final : public InputSource {
 public:
  explicit ProductSource(std::vector<Valuation> inputs) {
    for (auto& v : inputs) children_.push_back({std::move(v), {}, 0});
  }
  void children(std::size_t, std::vector<Child>& out) override { out = children_; }

 private:
  std::vector<Child> children_;
};

class InclusionSearch {
 public:
  InclusionSearch(const MachineBehavior& fine, const MachineBehavior& coarse,
                  InputSource& source, const EnumerationBudget& budget,
                  std::vector<std::string> flow_order = {})
      : fine_(fine),
        coarse_(coarse),
        source_(source),
        budget_(budget),
        projection_(detail::index_map(fine.emitted(), coarse.emitted())),
        flow_order_(std::move(flow_order)),
        rng_(budget.seed) {
    for (std::size_t k = 0; k < projection_.size(); ++k) {
      if (projection_[k] == detail::kAbsent) {
        throw InterfaceError("channel " + coarse.emitted()[k] +
                             " is not produced by the refined machine");
      }
    }
  }

  Verdict run() {
    Verdict verdict;
    if (budget_.depth == 0) {
      verdict.coverage = "depth 0";
      return verdict;
    }
    auto f0 = fine_.initial_states();
    auto c0 = coarse_.initial_states();
    detail::sort_unique(f0);
    detail::sort_unique(c0);
    try {
      if (budget_.mode == EnumerationBudget::Mode::kSampled) {
        for (std::size_t n = 0; n < budget_.samples && !failure_; ++n) {
          visit(0, f0, c0, 0);
        }
      } else {
        visit(0, f0, c0, 0);
      }
    } catch (const CeilingReached&) {
      verdict.status = Verdict::Status::kInconclusive;
      verdict.explored = nodes_;
      verdict.coverage = coverage_of(budget_, nodes_) + ", ceiling reached";
      return verdict;
    } catch (const BudgetError& e) {
      verdict.status = Verdict::Status::kInconclusive;
      verdict.explored = nodes_;
      verdict.coverage = coverage_of(budget_, nodes_) + ", " + e.what();
      return verdict;
    }
    verdict.explored = nodes_;
    verdict.coverage = coverage_of(budget_, nodes_);
    if (failure_) {
      verdict.status = Verdict::Status::kFails;
      verdict.witness = std::move(failure_);
    }
    return verdict;
  }

 private:
  void visit(std::size_t t, const std::vector<State>& fine_states,
             const std::vector<State>& coarse_states, std::size_t context) {
    if (++nodes_ > budget_.ceiling) throw CeilingReached{};

    // Group fine states by the output they can show on the compared channels.
    std::map<Valuation, std::vector<State>> groups;
    for (const auto& f : fine_states) {
      emissions_.clear();
      fine_.emit(f, emissions_);
      for (const auto& e : emissions_) {
        Valuation p;
        p.reserve(projection_.size());
        for (auto k : projection_) p.push_back(e[k]);
        auto& bucket = groups[std::move(p)];
        if (bucket.empty() || bucket.back() != f) bucket.push_back(f);
      }
    }

    std::vector<Child> children;
    bool children_ready = false;
    for (auto& [shown, group] : groups) {
      std::vector<State> matching;
      for (const auto& c : coarse_states) {
        emissions_.clear();
        coarse_.emit(c, emissions_);
        if (std::find(emissions_.begin(), emissions_.end(), shown) != emissions_.end()) {
          matching.push_back(c);
        }
      }
      if (matching.empty()) {
        record_failure(t, shown);
        return;
      }
      if (t + 1 == budget_.depth) continue;

      if (!children_ready) {
        source_.children(context, children);
        children_ready = true;
        if (budget_.mode == EnumerationBudget::Mode::kSampled && !children.empty()) {
          std::uniform_int_distribution<std::size_t> pick(0, children.size() - 1);
          Child chosen = children[pick(rng_)];
          children.assign(1, std::move(chosen));
        }
      }
      output_history_.push_back(shown);
      for (const auto& child : children) {
        std::vector<State> fine_next;
        for (const auto& f : group) fine_.step(f, child.input, fine_next);
        detail::sort_unique(fine_next);
        std::vector<State> coarse_next;
        for (const auto& c : matching) coarse_.step(c, child.input, coarse_next);
        detail::sort_unique(coarse_next);
        input_history_.push_back(child.input);
        flow_history_.push_back(child.flow);
        visit(t + 1, fine_next, coarse_next, child.next);
        input_history_.pop_back();
        flow_history_.pop_back();
        if (failure_) break;
      }
      output_history_.pop_back();
      if (failure_) return;
    }
  }

  void record_failure(std::size_t t, const Valuation& shown) {
    Witness w;
    w.ticks = t + 1;
    auto inputs = input_history_;
    inputs.emplace_back(fine_.input_order().size());
    w.input = tuple_of(inputs, fine_.input_order());
    auto outputs = output_history_;
    outputs.push_back(shown);
    w.output = tuple_of(outputs, coarse_.emitted());
    if (!flow_order_.empty()) {
      auto flows = flow_history_;
      w.flow = tuple_of(flows, flow_order_);
    }
    std::ostringstream note;
    note << "refined side can emit " << to_string(w.output, fine_.outputs())
         << " at tick " << t << ", reference side cannot";
    w.note = note.str();
    failure_ = std::move(w);
  }

  const MachineBehavior& fine_;
  const MachineBehavior& coarse_;
  InputSource& source_;
  const EnumerationBudget& budget_;
  std::vector<std::size_t> projection_;
  std::vector<std::string> flow_order_;
  std::mt19937_64 rng_;
  std::size_t nodes_ = 0;
  std::vector<Valuation> emissions_;
  std::vector<Valuation> input_history_;
  std::vector<Valuation> output_history_;
  std::vector<Valuation> flow_history_;
  std::optional<Witness> failure_;
};

std::vector<Valuation> machine_inputs(const MachineBehavior& fine,
                                      const MachineBehavior& coarse,
                                      const EnumerationBudget& budget) {
  auto read = fine.reads();
  const auto coarse_read = coarse.reads();
  read.insert(coarse_read.begin(), coarse_read.end());
  std::vector<std::vector<Interval>> options;
  for (const auto& name : fine.input_order()) {
    if (read.count(name)) {
      options.push_back(enumerate_intervals(*fine.inputs().at(name), budget.interval_bound));
    } else {
      options.push_back({Interval{}});
    }
  }
  return detail::product(options, budget.ceiling);
}

void require_same_interface(const System& a, const System& b) {
  if (!detail::same_channels(a.inputs, b.inputs) ||
      !detail::same_channels(a.outputs, b.outputs)) {
    throw InterfaceError("systems have different interfaces");
  }
}

ChannelMap flow_channels(const System& s) {
  ChannelMap out = s.inputs;
  for (const auto& [name, alphabet] : s.controlled()) out.emplace(name, alphabet);
  return out;
}

void require_flow_domain(const System& s, const Invariant& psi) {
  const auto flow = flow_channels(s);
  for (const auto& name : psi.domain) {
    if (!flow.count(name)) {
      throw InterfaceError("invariant " + psi.name + " mentions channel " + name +
                           ", which is neither a system input nor controlled");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::size_t default_budget_ceiling() {
  if (const char* env = std::getenv("ARCHREF_BUDGET_CEILING")) {
    char* end = nullptr;
    auto value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<std::size_t>(value);
  }
  return kDefaultCeiling;
}

EnumerationBudget EnumerationBudget::exhaustive(std::size_t depth,
                                                std::size_t interval_bound) {
  EnumerationBudget b;
  b.depth = depth;
  b.interval_bound = interval_bound;
  return b;
}

EnumerationBudget EnumerationBudget::sampled(std::size_t depth,
                                             std::size_t samples,
                                             std::uint64_t seed,
                                             std::size_t interval_bound) {
  EnumerationBudget b;
  b.depth = depth;
  b.interval_bound = interval_bound;
  b.mode = Mode::kSampled;
  b.samples = samples;
  b.seed = seed;
  return b;
}

std::string EnumerationBudget::describe() const {
  std::ostringstream os;
  if (mode == Mode::kExhaustive) {
    os << "exhaustive";
  } else {
    os << "sampled n=" << samples << " seed=" << seed;
  }
  os << " T=" << depth << " L=" << interval_bound;
  return os.str();
}

std::string to_string(Verdict::Status status) {
  switch (status) {
    case Verdict::Status::kHolds:
      return "holds";
    case Verdict::Status::kFails:
      return "fails";
    case Verdict::Status::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

std::size_t input_space_size(const ChannelMap& channels,
                             const EnumerationBudget& budget) {
  std::size_t per_tick = 1;
  for (const auto& [_, alphabet] : channels) {
    per_tick = saturating_mul(per_tick, interval_count(alphabet->size(),
                                                       budget.interval_bound));
  }
  std::size_t total = 1;
  for (std::size_t t = 0; t < budget.depth; ++t) total = saturating_mul(total, per_tick);
  return total;
}

void enumerate_inputs(const ChannelMap& channels, const EnumerationBudget& budget,
                      const std::function<bool(const NamedStreamTuple&)>& visit) {
  const auto order = detail::ordered(names_of(channels));
  if (budget.mode == EnumerationBudget::Mode::kExhaustive &&
      input_space_size(channels, budget) > budget.ceiling) {
    throw BudgetError("input space exceeds the ceiling of " +
                      std::to_string(budget.ceiling));
  }
  const auto per_tick = tick_valuations(order, channels, budget.interval_bound,
                                        kSaturated);
  if (budget.mode == EnumerationBudget::Mode::kSampled) {
    std::mt19937_64 rng(budget.seed);
    std::uniform_int_distribution<std::size_t> pick(0, per_tick.size() - 1);
    for (std::size_t n = 0; n < budget.samples; ++n) {
      std::vector<Valuation> history;
      for (std::size_t t = 0; t < budget.depth; ++t) history.push_back(per_tick[pick(rng)]);
      if (!visit(tuple_of(history, order))) return;
    }
    return;
  }
  std::vector<std::size_t> digits(budget.depth, 0);
  while (true) {
    std::vector<Valuation> history;
    history.reserve(budget.depth);
    for (auto d : digits) history.push_back(per_tick[d]);
    if (!visit(tuple_of(history, order))) return;
    std::size_t k = budget.depth;
    while (k > 0) {
      --k;
      if (++digits[k] < per_tick.size()) break;
      digits[k] = 0;
      if (k == 0) return;
    }
    if (budget.depth == 0) return;
  }
}

std::vector<NamedStreamTuple> enumerate_inputs(const ChannelMap& channels,
                                               const EnumerationBudget& budget) {
  std::vector<NamedStreamTuple> out;
  enumerate_inputs(channels, budget, [&out](const NamedStreamTuple& x) {
    out.push_back(x);
    return true;
  });
  return out;
}

Verdict check_machine_inclusion(const MachineBehavior& fine,
                                const MachineBehavior& coarse,
                                const EnumerationBudget& budget) {
  if (!detail::same_channels(fine.inputs(), coarse.inputs())) {
    throw InterfaceError("inclusion check needs identical inputs");
  }
  auto refined = materialize_against(borrow(fine), coarse, budget.interval_bound);
  std::vector<Valuation> inputs;
  try {
    inputs = machine_inputs(*refined, coarse, budget);
  } catch (const BudgetError& e) {
    Verdict v;
    v.status = Verdict::Status::kInconclusive;
    v.coverage = budget.describe() + ", " + e.what();
    return v;
  }
  ProductSource source(std::move(inputs));
  return InclusionSearch(*refined, coarse, source, budget).run();
}

Verdict check_trace_inclusion(const System& old_system, const System& new_system,
                              const EnumerationBudget& budget) {
  require_same_interface(old_system, new_system);
  ComposeOptions options;
  options.chaos_bound = budget.interval_bound;
  auto coarse = blackbox(old_system, options);
  auto fine = blackbox(new_system, options);
  return check_machine_inclusion(*fine, *coarse, budget);
}

Verdict check_trace_equality(const System& a, const System& b,
                             const EnumerationBudget& budget) {
  auto forward = check_trace_inclusion(a, b, budget);
  if (!forward.holds()) {
    if (forward.witness) forward.witness->note = "second system: " + forward.witness->note;
    return forward;
  }
  auto backward = check_trace_inclusion(b, a, budget);
  if (backward.witness) backward.witness->note = "first system: " + backward.witness->note;
  if (backward.holds()) {
    backward.coverage = forward.coverage + "; " + backward.coverage;
    backward.explored += forward.explored;
  }
  return backward;
}

// ---------------------------------------------------------------------------
// Invariant validity

Verdict check_invariant_validity(const System& s, const Invariant& psi,
                                 const EnumerationBudget& budget) {
  require_flow_domain(s, psi);
  Verdict verdict;
  if (psi.trivially_true) {
    verdict.coverage = "maximal invariant";
    return verdict;
  }
  auto violations = check_consistency(s);
  if (!violations.empty()) throw ConsistencyError(std::move(violations));

  // Components that influence the invariant's channels.
  std::set<std::string> cone;
  std::vector<std::string> work;
  for (const auto& name : psi.domain) {
    if (const auto* w = s.writer(name)) work.push_back(w->name);
  }
  while (!work.empty()) {
    auto name = work.back();
    work.pop_back();
    if (!cone.insert(name).second) continue;
    for (const auto& [ch, _] : s.find(name)->inputs) {
      if (const auto* w = s.writer(ch)) work.push_back(w->name);
    }
  }
  std::vector<BehaviorPtr> parts;
  for (const auto& name : cone) parts.push_back(s.find(name)->behavior);
  ComposeOptions options;
  options.chaos_bound = budget.interval_bound;
  for (const auto& name : psi.domain) {
    if (!s.inputs.count(name)) options.materialize.insert(name);
  }
  auto machine = compose(parts, options);

  const auto dom = detail::ordered(psi.domain);
  std::vector<std::string> dom_inputs;
  for (const auto& name : dom) {
    if (s.inputs.count(name)) dom_inputs.push_back(name);
  }
  // Enumerated channels: machine inputs it reads, plus invariant inputs.
  ChannelSet enumerated(dom_inputs.begin(), dom_inputs.end());
  for (const auto& name : machine->reads()) enumerated.insert(name);
  const auto enum_order = detail::ordered(enumerated);
  std::vector<Valuation> per_tick;
  try {
    per_tick = tick_valuations(enum_order, s.inputs, budget.interval_bound, budget.ceiling);
  } catch (const BudgetError& e) {
    verdict.status = Verdict::Status::kInconclusive;
    verdict.coverage = budget.describe() + ", " + e.what();
    return verdict;
  }
  const auto to_machine = detail::index_map(enum_order, machine->input_order());
  const auto emitted_idx = detail::index_map(machine->emitted(), dom);
  const auto input_idx = detail::index_map(enum_order, dom);
  std::vector<Valuation> machine_in;
  for (const auto& v : per_tick) {
    Valuation m(machine->input_order().size());
    for (std::size_t k = 0; k < to_machine.size(); ++k) {
      if (to_machine[k] != detail::kAbsent) m[k] = v[to_machine[k]];
    }
    machine_in.push_back(std::move(m));
  }

  const std::size_t depth = budget.depth;
  std::size_t nodes = 0;
  std::mt19937_64 rng(budget.seed);
  std::vector<Valuation> flow;       // in dom order
  std::vector<Valuation> inputs;     // in enum order
  std::optional<Witness> failure;

  auto fail = [&](const Valuation& last_input) {
    Witness w;
    w.ticks = flow.size();
    auto hist = inputs;
    hist.push_back(last_input);
    ChannelSet pad;
    for (const auto& [name, _] : s.inputs) {
      if (!enumerated.count(name)) pad.insert(name);
    }
    w.input = tuple_of(hist, enum_order, pad);
    w.flow = tuple_of(flow, dom);
    w.note = "invariant " + psi.name + " is violated at tick " +
             std::to_string(flow.size() - 1);
    failure = std::move(w);
  };

  std::function<void(std::size_t, const std::vector<State>&)> visit =
      [&](std::size_t t, const std::vector<State>& states) {
        if (++nodes > budget.ceiling) throw CeilingReached{};
        std::map<Valuation, std::vector<State>> groups;
        std::vector<Valuation> em;
        for (const auto& st : states) {
          em.clear();
          machine->emit(st, em);
          for (const auto& e : em) {
            Valuation p(dom.size());
            for (std::size_t k = 0; k < dom.size(); ++k) {
              if (emitted_idx[k] != detail::kAbsent) p[k] = e[emitted_idx[k]];
            }
            auto& bucket = groups[std::move(p)];
            if (bucket.empty() || bucket.back() != st) bucket.push_back(st);
          }
        }
        std::vector<std::size_t> choice(per_tick.size());
        for (std::size_t k = 0; k < choice.size(); ++k) choice[k] = k;
        if (budget.mode == EnumerationBudget::Mode::kSampled && !choice.empty()) {
          std::uniform_int_distribution<std::size_t> pick(0, choice.size() - 1);
          choice.assign(1, pick(rng));
        }
        for (const auto& [shown, group] : groups) {
          const bool last = t + 1 == depth;
          if (dom_inputs.empty()) {
            flow.push_back(shown);
            if (!psi(tuple_of(flow, dom))) {
              fail(Valuation(enum_order.size()));
              flow.pop_back();
              return;
            }
          }
          if (!last || !dom_inputs.empty()) {
            for (auto k : choice) {
              const auto& v = per_tick[k];
              if (!dom_inputs.empty()) {
                Valuation f = shown;
                for (std::size_t d = 0; d < dom.size(); ++d) {
                  if (input_idx[d] != detail::kAbsent) f[d] = v[input_idx[d]];
                }
                flow.push_back(std::move(f));
                if (!psi(tuple_of(flow, dom))) {
                  fail(v);
                  flow.pop_back();
                  return;
                }
              }
              if (!last) {
                std::vector<State> next;
                for (const auto& st : group) machine->step(st, machine_in[k], next);
                detail::sort_unique(next);
                inputs.push_back(v);
                visit(t + 1, next);
                inputs.pop_back();
              }
              if (!dom_inputs.empty()) flow.pop_back();
              if (failure) break;
            }
          }
          if (dom_inputs.empty()) flow.pop_back();
          if (failure) return;
        }
      };

  auto init = machine->initial_states();
  detail::sort_unique(init);
  try {
    if (depth > 0) {
      const std::size_t rounds =
          budget.mode == EnumerationBudget::Mode::kSampled ? budget.samples : 1;
      for (std::size_t n = 0; n < rounds && !failure; ++n) visit(0, init);
    }
  } catch (const CeilingReached&) {
    verdict.status = Verdict::Status::kInconclusive;
    verdict.explored = nodes;
    verdict.coverage = coverage_of(budget, nodes) + ", ceiling reached";
    return verdict;
  }
  verdict.explored = nodes;
  verdict.coverage = coverage_of(budget, nodes);
  if (failure) {
    verdict.status = Verdict::Status::kFails;
    verdict.witness = std::move(failure);
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// Refinement under an invariant

namespace {

/// Lazily built tree of invariant-respecting flow prefixes over the
/// invariant domain, expanded with the free channels at each step.
class InvariantSource final : public InputSource {
 public:
  InvariantSource(const Invariant& psi, std::vector<std::string> dom,
                  std::vector<Valuation> dom_values,
                  std::vector<Valuation> free_values,
                  std::vector<std::size_t> from_dom,
                  std::vector<std::size_t> from_free, std::size_t width)
      : psi_(psi),
        dom_(std::move(dom)),
        dom_values_(std::move(dom_values)),
        free_values_(std::move(free_values)),
        from_dom_(std::move(from_dom)),
        from_free_(std::move(from_free)),
        width_(width) {
    nodes_.push_back({0, 0, {}});
  }

  void children(std::size_t context, std::vector<Child>& out) override {
    out.clear();
    if (!nodes_[context].expanded) expand(context);
    for (auto child : nodes_[context].children) {
      const auto& d = dom_values_[nodes_[child].value];
      for (const auto& f : free_values_) {
        Valuation in(width_);
        for (std::size_t k = 0; k < width_; ++k) {
          if (from_dom_[k] != detail::kAbsent) {
            in[k] = d[from_dom_[k]];
          } else if (from_free_[k] != detail::kAbsent) {
            in[k] = f[from_free_[k]];
          }
        }
        out.push_back({std::move(in), d, child});
      }
    }
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  struct Node {
    std::size_t parent;
    std::size_t value;
    std::vector<std::size_t> children;
    bool expanded = false;
  };

  void expand(std::size_t context) {
    std::vector<Valuation> prefix;
    for (std::size_t n = context; n != 0; n = nodes_[n].parent) {
      prefix.push_back(dom_values_[nodes_[n].value]);
    }
    std::reverse(prefix.begin(), prefix.end());
    std::vector<std::size_t> kids;
    prefix.emplace_back();
    for (std::size_t k = 0; k < dom_values_.size(); ++k) {
      prefix.back() = dom_values_[k];
      ++evaluations_;
      if (psi_(detail::from_per_tick(prefix, dom_))) {
        kids.push_back(nodes_.size());
        nodes_.push_back({context, k, {}});
      }
    }
    nodes_[context].children = std::move(kids);
    nodes_[context].expanded = true;
  }

  const Invariant& psi_;
  std::vector<std::string> dom_;
  std::vector<Valuation> dom_values_;
  std::vector<Valuation> free_values_;
  std::vector<std::size_t> from_dom_;
  std::vector<std::size_t> from_free_;
  std::size_t width_;
  std::vector<Node> nodes_;
  std::size_t evaluations_ = 0;
};

}  // namespace

Verdict check_refinement_under_invariant(const System& s,
                                         const std::string& component,
                                         const MachineBehavior& replacement,
                                         const Invariant& psi,
                                         const EnumerationBudget& budget) {
  const auto* c = s.find(component);
  if (!c) throw InterfaceError("no component named " + component);
  if (!detail::same_channels(c->inputs, replacement.inputs()) ||
      !detail::same_channels(c->outputs, replacement.outputs())) {
    throw InterfaceError("replacement behavior does not match the interface of " +
                         component);
  }
  require_flow_domain(s, psi);
  if (psi.trivially_true) {
    auto v = check_machine_inclusion(replacement, *c->behavior, budget);
    v.coverage = "maximal invariant, " + v.coverage;
    if (v.witness) v.witness->flow = v.witness->input;
    return v;
  }

  const auto& coarse = *c->behavior;
  auto fine = materialize_against(borrow(replacement), coarse, budget.interval_bound);
  const auto all = flow_channels(s);
  const auto dom = detail::ordered(psi.domain);

  auto read = fine->reads();
  for (const auto& name : coarse.reads()) read.insert(name);
  std::vector<std::string> free;
  for (const auto& name : fine->input_order()) {
    if (!psi.domain.count(name) && read.count(name)) free.push_back(name);
  }

  Verdict verdict;
  std::vector<Valuation> dom_values;
  std::vector<Valuation> free_values;
  try {
    dom_values = tick_valuations(dom, all, budget.interval_bound, budget.ceiling);
    free_values = tick_valuations(free, all, budget.interval_bound, budget.ceiling);
  } catch (const BudgetError& e) {
    verdict.status = Verdict::Status::kInconclusive;
    verdict.coverage = budget.describe() + ", " + e.what();
    return verdict;
  }
  const auto& order = fine->input_order();
  auto from_dom = detail::index_map(dom, order);
  auto from_free = detail::index_map(free, order);
  InvariantSource source(psi, dom, std::move(dom_values), std::move(free_values),
                         std::move(from_dom), std::move(from_free), order.size());
  verdict = InclusionSearch(*fine, coarse, source, budget, dom).run();
  verdict.coverage += ", " + std::to_string(source.evaluations()) +
                      " invariant evaluations";
  return verdict;
}

// ---------------------------------------------------------------------------
// Input restriction

Verdict validate_invariant(const System& s, const Invariant& psi,
                           const EnumerationBudget& budget) {
  require_flow_domain(s, psi);
  Verdict verdict;
  if (psi.trivially_true) {
    verdict.coverage = "maximal invariant";
    return verdict;
  }
  std::vector<std::string> ins;
  std::vector<std::string> others;
  for (const auto& name : psi.domain) {
    (s.inputs.count(name) ? ins : others).push_back(name);
  }
  if (ins.empty()) {
    verdict.coverage = "domain avoids system inputs";
    return verdict;
  }
  const auto all = flow_channels(s);
  const auto dom = detail::ordered(psi.domain);
  std::vector<Valuation> in_values;
  std::vector<Valuation> other_values;
  try {
    in_values = tick_valuations(ins, all, budget.interval_bound, budget.ceiling);
    other_values = tick_valuations(others, all, budget.interval_bound, budget.ceiling);
  } catch (const BudgetError& e) {
    verdict.status = Verdict::Status::kInconclusive;
    verdict.coverage = budget.describe() + ", " + e.what();
    return verdict;
  }
  const auto from_in = detail::index_map(ins, dom);
  const auto from_other = detail::index_map(others, dom);
  auto merge = [&](const Valuation& a, const Valuation& b) {
    Valuation v(dom.size());
    for (std::size_t k = 0; k < dom.size(); ++k) {
      v[k] = from_in[k] != detail::kAbsent ? a[from_in[k]] : b[from_other[k]];
    }
    return v;
  };

  std::size_t nodes = 0;
  std::vector<Valuation> input_history;
  std::optional<Witness> failure;
  // `alive`: flow prefixes consistent with the inputs so far.
  std::function<void(std::size_t, const std::vector<std::vector<Valuation>>&)> visit =
      [&](std::size_t t, const std::vector<std::vector<Valuation>>& alive) {
        if (t == budget.depth) return;
        for (const auto& a : in_values) {
          if (++nodes > budget.ceiling) throw CeilingReached{};
          std::vector<std::vector<Valuation>> next;
          for (const auto& prefix : alive) {
            for (const auto& b : other_values) {
              auto extended = prefix;
              extended.push_back(merge(a, b));
              if (psi(detail::from_per_tick(extended, dom))) next.push_back(std::move(extended));
            }
          }
          input_history.push_back(a);
          if (next.empty()) {
            Witness w;
            w.ticks = t + 1;
            w.input = tuple_of(input_history, ins);
            w.note = "invariant " + psi.name + " rules out these system inputs";
            failure = std::move(w);
            return;
          }
          visit(t + 1, next);
          input_history.pop_back();
          if (failure) return;
        }
      };
  try {
    visit(0, {std::vector<Valuation>{}});
  } catch (const CeilingReached&) {
    verdict.status = Verdict::Status::kInconclusive;
    verdict.explored = nodes;
    verdict.coverage = coverage_of(budget, nodes) + ", ceiling reached";
    return verdict;
  }
  verdict.explored = nodes;
  verdict.coverage = coverage_of(budget, nodes);
  if (failure) {
    verdict.status = Verdict::Status::kFails;
    verdict.witness = std::move(failure);
  }
  return verdict;
}

}  // namespace archref
