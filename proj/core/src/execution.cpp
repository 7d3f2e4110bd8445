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
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "archref/errors.hpp"
#include "archref/machine.hpp"
#include "detail.hpp"

namespace archref {

namespace {

void require_inputs(const MachineBehavior& m, const NamedStreamTuple& input,
                    std::size_t ticks) {
  if (input.domain() != m.input_names()) {
    throw InterfaceError("input tuple does not cover exactly the machine inputs");
  }
  if (input.tick_len() < ticks) {
    throw OutOfRangeError("input prefix has " + std::to_string(input.tick_len()) +
                          " ticks, " + std::to_string(ticks) + " requested");
  }
}

}  // namespace

std::set<NamedStreamTuple> run(const MachineBehavior& m,
                               const NamedStreamTuple& input, std::size_t ticks) {
  require_inputs(m, input, ticks);
  std::set<NamedStreamTuple> results;
  if (ticks == 0) {
    results.insert(silent_tuple(ChannelSet(m.emitted().begin(), m.emitted().end()), 0));
    return results;
  }
  const auto inputs = detail::per_tick(input, m.input_order(), ticks);

  using Node = std::pair<State, std::vector<Valuation>>;
  std::set<Node> frontier;
  for (auto& s : m.initial_states()) frontier.emplace(std::move(s), std::vector<Valuation>{});

  std::vector<Valuation> emissions;
  std::vector<State> successors;
  for (std::size_t t = 0; t < ticks; ++t) {
    const bool last = t + 1 == ticks;
    std::set<Node> next;
    for (const auto& [state, history] : frontier) {
      emissions.clear();
      m.emit(state, emissions);
      successors.clear();
      if (!last) m.step(state, inputs[t], successors);
      for (const auto& e : emissions) {
        auto h = history;
        h.push_back(e);
        if (last) {
          results.insert(detail::from_per_tick(h, m.emitted()));
          continue;
        }
        for (const auto& s : successors) next.emplace(s, h);
      }
    }
    frontier = std::move(next);
  }
  return results;
}

bool membership(const MachineBehavior& m, const NamedStreamTuple& input,
                const NamedStreamTuple& output, std::size_t ticks) {
  require_inputs(m, input, ticks);
  for (const auto& name : output.domain()) {
    if (!m.outputs().count(name)) {
      throw InterfaceError("channel " + name + " is not an output of the machine");
    }
  }
  for (const auto& name : m.emitted()) {
    if (!output.contains(name)) {
      throw InterfaceError("output tuple lacks channel " + name);
    }
  }
  if (output.tick_len() < ticks) {
    throw OutOfRangeError("output prefix shorter than requested ticks");
  }
  if (ticks == 0) return true;
  const auto inputs = detail::per_tick(input, m.input_order(), ticks);
  const auto expected = detail::per_tick(output, m.emitted(), ticks);

  std::vector<State> frontier = m.initial_states();
  detail::sort_unique(frontier);
  std::vector<Valuation> emissions;
  for (std::size_t t = 0; t < ticks; ++t) {
    std::vector<State> next;
    for (const auto& s : frontier) {
      emissions.clear();
      m.emit(s, emissions);
      if (std::find(emissions.begin(), emissions.end(), expected[t]) ==
          emissions.end()) {
        continue;
      }
      if (t + 1 == ticks) return true;
      m.step(s, inputs[t], next);
    }
    detail::sort_unique(next);
    if (next.empty()) return false;
    frontier = std::move(next);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Time guardedness

namespace {

Interval random_interval(const Alphabet& alphabet, std::size_t bound,
                         std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len(0, bound);
  Interval out(alphabet.size() == 0 ? 0 : len(rng));
  if (alphabet.size() == 0) return out;
  std::uniform_int_distribution<std::size_t> sym(0, alphabet.size() - 1);
  for (auto& s : out) s = static_cast<Symbol>(sym(rng));
  return out;
}

}  // namespace

GuardednessReport check_time_guardedness(const BehaviorFunction& f,
                                         const ChannelMap& inputs,
                                         std::size_t samples, std::size_t ticks,
                                         std::size_t interval_bound,
                                         std::uint64_t seed) {
  GuardednessReport report;
  if (ticks == 0) return report;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> split(0, ticks - 1);

  for (std::size_t n = 0; n < samples; ++n) {
    const std::size_t shared = split(rng);
    std::map<std::string, TimedStreamPrefix> xs;
    std::map<std::string, TimedStreamPrefix> ys;
    for (const auto& [name, alphabet] : inputs) {
      std::vector<Interval> x;
      std::vector<Interval> y;
      for (std::size_t t = 0; t < ticks; ++t) {
        x.push_back(random_interval(*alphabet, interval_bound, rng));
        if (t < shared) {
          y.push_back(x.back());
          continue;
        }
        auto other = random_interval(*alphabet, interval_bound, rng);
        if (t == shared && interval_count(alphabet->size(), interval_bound) > 1) {
          while (other == x.back()) other = random_interval(*alphabet, interval_bound, rng);
        }
        y.push_back(std::move(other));
      }
      xs.emplace(name, TimedStreamPrefix(std::move(x)));
      ys.emplace(name, TimedStreamPrefix(std::move(y)));
    }
    NamedStreamTuple x(std::move(xs), ticks);
    NamedStreamTuple y(std::move(ys), ticks);

    auto cut = [&](const std::set<NamedStreamTuple>& outs) {
      std::set<NamedStreamTuple> out;
      for (const auto& o : outs) out.insert(truncate(o, std::min(shared + 1, o.tick_len())));
      return out;
    };
    ++report.pairs_checked;
    if (cut(f(x, ticks)) != cut(f(y, ticks))) {
      report.violations.push_back({shared, std::move(x), std::move(y)});
    }
  }
  return report;
}

GuardednessReport check_time_guardedness(const MachineBehavior& m,
                                         std::size_t samples, std::size_t ticks,
                                         std::size_t interval_bound,
                                         std::uint64_t seed) {
  BehaviorFunction f = [&m](const NamedStreamTuple& input, std::size_t t) {
    return run(m, input, t);
  };
  return check_time_guardedness(f, m.inputs(), samples, ticks, interval_bound,
                                seed);
}

// ---------------------------------------------------------------------------
// Simulation-based refinement

namespace {

constexpr std::size_t kValuationCap = 1u << 16;
constexpr std::size_t kStateCap = 1u << 14;
constexpr std::size_t kPairCap = 1u << 22;

struct Explored {
  std::vector<State> states;
  std::unordered_map<State, std::size_t, StateHash> index;
  std::vector<std::vector<Valuation>> emits;
  // successors[state][valuation] = sorted successor indices
  std::vector<std::vector<std::vector<std::size_t>>> successors;
  std::vector<std::size_t> initial;
};

std::optional<Explored> explore(const MachineBehavior& m,
                                const std::vector<Valuation>& valuations) {
  Explored ex;
  auto intern = [&ex](const State& s) {
    auto [it, fresh] = ex.index.emplace(s, ex.states.size());
    if (fresh) ex.states.push_back(s);
    return it->second;
  };
  for (const auto& s : m.initial_states()) ex.initial.push_back(intern(s));
  detail::sort_unique(ex.initial);
  std::vector<State> succ;
  for (std::size_t k = 0; k < ex.states.size(); ++k) {
    if (ex.states.size() > kStateCap) return std::nullopt;
    const State current = ex.states[k];
    std::vector<Valuation> e;
    m.emit(current, e);
    detail::sort_unique(e);
    ex.emits.push_back(std::move(e));
    std::vector<std::vector<std::size_t>> row;
    row.reserve(valuations.size());
    for (const auto& v : valuations) {
      succ.clear();
      m.step(current, v, succ);
      std::vector<std::size_t> ids;
      for (const auto& s : succ) ids.push_back(intern(s));
      detail::sort_unique(ids);
      row.push_back(std::move(ids));
    }
    ex.successors.push_back(std::move(row));
  }
  return ex;
}

}  // namespace

bool submachine_refines(const MachineBehavior& fine,
                        const MachineBehavior& coarse) {
  if (!detail::same_channels(fine.inputs(), coarse.inputs()) ||
      !detail::same_channels(fine.outputs(), coarse.outputs())) {
    throw InterfaceError("submachine check needs identical interfaces");
  }
  if (structurally_equal(fine, coarse)) return true;
  if (!std::includes(coarse.chaotic().begin(), coarse.chaotic().end(),
                     fine.chaotic().begin(), fine.chaotic().end())) {
    return false;
  }
  if (coarse.emitted().empty()) return true;

  auto fine_literals = fine.guard_literals();
  auto coarse_literals = coarse.guard_literals();
  if (!fine_literals || !coarse_literals) return false;

  const auto fine_reads = fine.reads();
  const auto coarse_reads = coarse.reads();
  std::vector<std::vector<Interval>> options;
  for (const auto& name : fine.input_order()) {
    std::vector<Interval> reps{Interval{}};
    if (fine_reads.count(name) || coarse_reads.count(name)) {
      std::set<Interval> literals;
      for (const auto* table : {&*fine_literals, &*coarse_literals}) {
        auto it = table->find(name);
        if (it != table->end()) literals.insert(it->second.begin(), it->second.end());
      }
      std::size_t longest = 0;
      for (const auto& l : literals) longest = std::max(longest, l.size());
      reps.insert(reps.end(), literals.begin(), literals.end());
      for (const auto& candidate : enumerate_intervals(*fine.inputs().at(name), longest + 1)) {
        if (!candidate.empty() && !literals.count(candidate)) {
          reps.push_back(candidate);
          break;
        }
      }
      detail::sort_unique(reps);
    }
    options.push_back(std::move(reps));
  }
  std::vector<Valuation> valuations;
  try {
    valuations = detail::product(options, kValuationCap);
  } catch (const BudgetError&) {
    return false;
  }

  auto f = explore(fine, valuations);
  auto c = explore(coarse, valuations);
  if (!f || !c) return false;
  const std::size_t nf = f->states.size();
  const std::size_t nc = c->states.size();
  if (nf * nc > kPairCap) return false;

  const auto projection = detail::index_map(fine.emitted(), coarse.emitted());
  // rel[i * nc + j]: fine state i is simulated by coarse state j.
  std::vector<char> rel(nf * nc, 0);
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      bool ok = true;
      for (const auto& e : f->emits[i]) {
        bool matched = false;
        for (const auto& ce : c->emits[j]) {
          if (detail::agrees(e, projection, ce)) {
            matched = true;
            break;
          }
        }
        if (!matched) {
          ok = false;
          break;
        }
      }
      rel[i * nc + j] = ok;
    }
  }

  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < nf; ++i) {
      for (std::size_t j = 0; j < nc; ++j) {
        if (!rel[i * nc + j]) continue;
        bool ok = true;
        for (std::size_t v = 0; ok && v < valuations.size(); ++v) {
          for (auto fi : f->successors[i][v]) {
            bool matched = false;
            for (auto cj : c->successors[j][v]) {
              if (rel[fi * nc + cj]) {
                matched = true;
                break;
              }
            }
            if (!matched) {
              ok = false;
              break;
            }
          }
        }
        if (!ok) {
          rel[i * nc + j] = 0;
          changed = true;
        }
      }
    }
  }

  for (auto fi : f->initial) {
    bool matched = false;
    for (auto cj : c->initial) {
      if (rel[fi * nc + cj]) {
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace archref
