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
#include <functional>
#include <sstream>

#include "archref/frontend.hpp"
#include "lexer.hpp"

namespace archref {

namespace {

bool plain_word(const std::string& s) {
  if (s.empty()) return false;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!word_char(s[k])) return false;
    if (s[k] == '-' && k + 1 < s.size() && s[k + 1] == '>') return false;
  }
  return true;
}

std::string value(const std::string& s) {
  if (plain_word(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

const std::string& name(const std::string& s) {
  if (!is_name(s)) throw DefinitionError("'" + s + "' cannot be written as a name");
  return s;
}

template <class Range, class F>
std::string listed(const Range& items, F&& spell, const char* sep = ", ") {
  std::string out;
  bool first = true;
  for (const auto& item : items) {
    if (!first) out += sep;
    first = false;
    out += spell(item);
  }
  return out;
}

std::string names(const ChannelSet& s) {
  return listed(s, [](const std::string& n) { return name(n); });
}

std::string names(const ChannelMap& m) { return names(names_of(m)); }

std::string interval(const Interval& v, const Alphabet& a) {
  return "[" + listed(v, [&](Symbol x) { return value(a.spell(x)); }) + "]";
}

std::string params(const BuiltinParams& p) {
  return "(" +
         listed(p, [](const auto& kv) { return name(kv.first) + ": " + value(kv.second); }) +
         ")";
}

std::size_t alphabet_depth(const Alphabet& a) {
  if (!a.is_product()) return 0;
  return 1 + std::max(alphabet_depth(*a.left()), alphabet_depth(*a.right()));
}

void emit_table(const TableMachine& m, std::ostream& os) {
  os << "machine " << name(m.name()) << " {\n";
  os << "  inputs: " << names(m.inputs()) << ";\n";
  os << "  outputs: " << names(m.outputs()) << ";\n";
  if (!m.chaotic().empty()) os << "  chaotic: " << names(m.chaotic()) << ";\n";
  os << "  init: " << name(m.initial_name()) << ";\n";
  for (const auto& st : m.states()) {
    os << "  state " << name(st.name) << " {\n";
    for (const auto& option : st.emits) {
      os << "    emit {"
         << listed(option,
                   [&](const auto& kv) {
                     return name(kv.first) + " = " +
                            interval(kv.second, *m.outputs().at(kv.first));
                   })
         << "};\n";
    }
    for (const auto& tr : st.transitions) {
      os << "    on ";
      os << listed(tr.guards, [&](const Guard& g) {
        std::string s = name(g.channel);
        switch (g.test) {
          case Guard::Test::kEquals:
            return s + " = " + interval(g.literal, *m.inputs().at(g.channel));
          case Guard::Test::kEmpty:
            return s + " empty";
          case Guard::Test::kNonEmpty:
            return s + " nonempty";
          case Guard::Test::kAny:
            return s + " any";
        }
        return s;
      });
      if (!tr.guards.empty()) os << ' ';
      os << "-> " << listed(tr.targets, [](const std::string& t) { return name(t); }, " | ")
         << ";\n";
    }
    os << "  }\n";
  }
  os << "}\n";
}

std::string behavior_expr(const MachineBehavior& m) {
  if (m.kind() == MachineKind::kTrivial) return "trivial";
  if (const auto* n = dynamic_cast<const NamedMachine*>(&m)) return name(n->name());
  if (const auto* v = dynamic_cast<const ViewMachine*>(&m)) {
    const auto& c = v->change();
    std::string out = "view(" + behavior_expr(*v->base());
    if (!c.rename.empty()) {
      out += "; rename " + listed(c.rename, [](const auto& kv) {
               return name(kv.first) + " -> " + name(kv.second);
             });
    }
    if (!c.hidden_inputs.empty()) out += "; hide " + names(c.hidden_inputs);
    if (!c.dropped_outputs.empty()) out += "; drop " + names(c.dropped_outputs);
    if (!c.extra_inputs.empty()) out += "; extra " + names(c.extra_inputs);
    if (!c.chaotic_outputs.empty()) out += "; chaos " + names(c.chaotic_outputs);
    return out + ")";
  }
  if (auto parts = composite_parts(m)) {
    std::string out = "compose(" + listed(parts->parts, [](const BehaviorPtr& p) {
                        return behavior_expr(*p);
                      });
    out += "; chaos-bound " + std::to_string(parts->options.chaos_bound);
    if (!parts->options.materialize.empty()) {
      out += "; materialize " + names(parts->options.materialize);
    }
    return out + ")";
  }
  throw DefinitionError("behavior has no written form");
}

void emit_system_body(const System& s, const std::string& indent, std::ostream& os) {
  os << indent << "inputs: " << names(s.inputs) << ";\n";
  os << indent << "outputs: " << names(s.outputs) << ";\n";
  std::vector<const Component*> sorted;
  for (const auto& c : s.components) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(),
            [](const Component* a, const Component* b) { return a->name < b->name; });
  for (const auto* c : sorted) {
    if (c->sub) {
      os << indent << "component " << name(c->name) << " {\n";
      emit_system_body(*c->sub, indent + "  ", os);
      os << indent << "}\n";
    } else {
      os << indent << "component " << name(c->name) << " = " << behavior_expr(*c->behavior)
         << ";\n";
    }
  }
}

// Collects the declarations a system depends on.
class Collector {
 public:
  void channels(const ChannelMap& m) {
    for (const auto& [n, a] : m) channel(n, a);
  }

  void channel(const std::string& n, const AlphabetPtr& a) {
    auto [it, fresh] = doc.channels.emplace(n, a);
    if (!fresh && !it->second->same_as(*a)) {
      throw DefinitionError("channel " + n + " carries two alphabets");
    }
    alphabet(a);
  }

  void alphabet(const AlphabetPtr& a) {
    for (const auto& b : doc.alphabets) {
      if (b->name() == a->name()) {
        if (!b->same_as(*a)) {
          throw DefinitionError("two alphabets are named " + a->name());
        }
        return;
      }
    }
    if (a->is_product()) {
      alphabet(a->left());
      alphabet(a->right());
    }
    doc.alphabets.push_back(a);
  }

  void behavior(const BehaviorPtr& m) {
    channels(m->inputs());
    channels(m->outputs());
    if (const auto* n = dynamic_cast<const NamedMachine*>(m.get())) {
      auto [it, fresh] = doc.machines.emplace(n->name(), m);
      if (!fresh && !structurally_equal(*it->second, *m)) {
        throw DefinitionError("two machines are named " + n->name());
      }
    } else if (const auto* v = dynamic_cast<const ViewMachine*>(m.get())) {
      behavior(v->base());
    } else if (auto parts = composite_parts(*m)) {
      for (const auto& p : parts->parts) behavior(p);
    }
  }

  void system(const System& s) {
    channels(s.inputs);
    channels(s.outputs);
    for (const auto& c : s.components) {
      channels(c.inputs);
      channels(c.outputs);
      if (c.sub) {
        system(*c.sub);
      } else {
        behavior(c.behavior);
      }
    }
  }

  Document doc;
};

}  // namespace

Document document_of(const System& s) {
  Collector c;
  c.system(s);
  c.doc.system = s;
  return std::move(c.doc);
}

std::string emit_canonical(const Document& doc) {
  std::ostringstream os;
  auto alphabets = doc.alphabets;
  std::sort(alphabets.begin(), alphabets.end(), [](const AlphabetPtr& a, const AlphabetPtr& b) {
    auto da = alphabet_depth(*a), db = alphabet_depth(*b);
    return da != db ? da < db : a->name() < b->name();
  });
  for (const auto& a : alphabets) {
    os << "alphabet " << name(a->name()) << " = ";
    if (a->is_product()) {
      os << name(a->left()->name()) << " * " << name(a->right()->name());
    } else {
      os << "{" << listed(a->symbols(), [](const std::string& s) { return value(s); }) << "}";
    }
    os << ";\n";
  }
  if (!alphabets.empty()) os << '\n';
  for (const auto& [n, a] : doc.channels) {
    os << "channel " << name(n) << ": " << name(a->name()) << ";\n";
  }
  if (!doc.channels.empty()) os << '\n';
  for (const auto& [n, m] : doc.machines) {
    if (const auto* t = dynamic_cast<const TableMachine*>(m.get())) {
      emit_table(*t, os);
    } else if (const auto* b = dynamic_cast<const BuiltinMachine*>(m.get())) {
      os << "machine " << name(n) << " = " << name(b->builtin_kind()) << params(b->params())
         << ";\n";
    } else {
      throw DefinitionError("machine " + n + " has no written form");
    }
  }
  if (!doc.machines.empty()) os << '\n';
  for (const auto& [n, psi] : doc.invariants) {
    os << "invariant " << name(n) << " = " << name(psi.kind) << params(psi.params) << ";\n";
  }
  if (!doc.invariants.empty()) os << '\n';
  if (doc.system) {
    os << "system {\n";
    emit_system_body(*doc.system, "  ", os);
    os << "}\n";
  }
  return os.str();
}

std::string emit_canonical(const System& s) { return emit_canonical(document_of(s)); }

std::string emit_script(const std::vector<RefinementStep>& steps) {
  std::ostringstream os;
  for (const auto& step : steps) {
    validate_step(step);
    os << rule_name(step.kind);
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, ComponentPayload>) {
            os << ' ' << p.component;
          } else if constexpr (std::is_same_v<P, ChannelPayload>) {
            os << ' ' << p.component << ' ' << p.channel;
          } else if constexpr (std::is_same_v<P, BehaviorPayload>) {
            os << ' ' << p.component << " machine=" << p.machine;
          } else if constexpr (std::is_same_v<P, InvariantPayload>) {
            os << ' ' << p.component << " machine=" << p.machine
               << " invariant=" << p.invariant;
          } else if constexpr (std::is_same_v<P, FoldPayload>) {
            os << ' ' << p.name << " components="
               << listed(p.components, [](const std::string& s) { return s; }, ",");
            if (p.inputs) os << " inputs=" << listed(*p.inputs, [](const std::string& s) { return s; }, ",");
            if (p.outputs) os << " outputs=" << listed(*p.outputs, [](const std::string& s) { return s; }, ",");
          } else {
            os << ' ' << p.from << ' ' << p.to;
          }
        },
        step.payload);
    if (step.mode) {
      const auto& m = *step.mode;
      os << " mode=";
      if (m.kind != CheckMode::Kind::kBounded) {
        os << to_string(m.kind);
      } else if (m.budget.mode == EnumerationBudget::Mode::kSampled) {
        os << "sampled depth=" << m.budget.depth << " bound=" << m.budget.interval_bound
           << " samples=" << m.budget.samples << " seed=" << m.budget.seed;
      } else {
        os << "bounded depth=" << m.budget.depth << " bound=" << m.budget.interval_bound;
      }
    }
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// DOT

namespace {

std::string dot_id(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string emit_dot(const System& s, const std::string& graph_name) {
  static const std::string kEnv = "__environment__";
  std::ostringstream os;
  os << "digraph " << dot_id(graph_name) << " {\n";
  os << "  rankdir=LR;\n";
  os << "  " << dot_id(kEnv) << " [label=\"environment\", shape=plaintext];\n";
  std::vector<std::string> names;
  for (const auto& c : s.components) names.push_back(c.name);
  std::sort(names.begin(), names.end());
  for (const auto& n : names) {
    const auto* c = s.find(n);
    os << "  " << dot_id("c:" + n) << " [label=" << dot_id(n)
       << (c->sub ? ", shape=box3d" : ", shape=box") << "];\n";
  }
  for (const auto& [channel, _] : s.all_channels()) {
    std::string from;
    if (const auto* w = s.writer(channel)) {
      from = "c:" + w->name;
    } else if (s.inputs.count(channel)) {
      from = kEnv;
    } else {
      continue;
    }
    auto readers = s.readers(channel);
    std::sort(readers.begin(), readers.end());
    std::vector<std::string> targets;
    for (const auto& r : readers) targets.push_back("c:" + r);
    if (s.outputs.count(channel)) targets.push_back(kEnv);
    for (const auto& to : targets) {
      os << "  " << dot_id(from) << " -> " << dot_id(to) << " [label=" << dot_id(channel)
         << "];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace archref
