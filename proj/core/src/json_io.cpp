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

#include <nlohmann/json.hpp>

#include "archref/frontend.hpp"

namespace archref {

using nlohmann::json;

namespace {

const char* kJsonFile = "<json>";

[[noreturn]] void json_fail(const std::string& message, std::size_t line = 1,
                            std::size_t column = 1) {
  Diagnostic d;
  d.message = message;
  d.span = {kJsonFile, line, column, line, column};
  throw ParseError({std::move(d)});
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    json_fail(e.what(), line, column);
  }
}

json spell(const Interval& v, const Alphabet& a) {
  json out = json::array();
  for (auto s : v) out.push_back(a.spell(s));
  return out;
}

Interval unspell(const json& j, const Alphabet& a, const std::string& where) {
  if (!j.is_array()) json_fail(where + ": expected a list of symbols");
  Interval out;
  for (const auto& s : j) {
    if (!s.is_string()) json_fail(where + ": symbols are strings");
    auto sym = a.find(s.get<std::string>());
    if (!sym) {
      json_fail(where + ": " + s.get<std::string>() + " is not in alphabet " + a.name());
    }
    out.push_back(*sym);
  }
  return out;
}

json name_list(const ChannelSet& s) { return json(std::vector<std::string>(s.begin(), s.end())); }
json name_list(const ChannelMap& m) { return name_list(names_of(m)); }

const char* test_name(Guard::Test t) {
  switch (t) {
    case Guard::Test::kEquals:
      return "equals";
    case Guard::Test::kEmpty:
      return "empty";
    case Guard::Test::kNonEmpty:
      return "nonempty";
    case Guard::Test::kAny:
      return "any";
  }
  return "any";
}

json behavior_json(const MachineBehavior& m) {
  if (m.kind() == MachineKind::kTrivial) return json{{"trivial", true}};
  if (const auto* n = dynamic_cast<const NamedMachine*>(&m)) return n->name();
  if (const auto* v = dynamic_cast<const ViewMachine*>(&m)) {
    const auto& c = v->change();
    json out{{"base", behavior_json(*v->base())}};
    if (!c.rename.empty()) out["rename"] = c.rename;
    if (!c.hidden_inputs.empty()) out["hide"] = name_list(c.hidden_inputs);
    if (!c.dropped_outputs.empty()) out["drop"] = name_list(c.dropped_outputs);
    if (!c.extra_inputs.empty()) out["extra"] = name_list(c.extra_inputs);
    if (!c.chaotic_outputs.empty()) out["chaos"] = name_list(c.chaotic_outputs);
    return json{{"view", out}};
  }
  if (auto parts = composite_parts(m)) {
    json list = json::array();
    for (const auto& p : parts->parts) list.push_back(behavior_json(*p));
    json out{{"parts", list}, {"chaos_bound", parts->options.chaos_bound}};
    if (!parts->options.materialize.empty()) {
      out["materialize"] = name_list(parts->options.materialize);
    }
    return json{{"compose", out}};
  }
  throw DefinitionError("behavior has no written form");
}

json system_json(const System& s) {
  json components = json::array();
  std::vector<const Component*> sorted;
  for (const auto& c : s.components) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(),
            [](const Component* a, const Component* b) { return a->name < b->name; });
  for (const auto* c : sorted) {
    json j{{"name", c->name}};
    if (c->sub) {
      j["sub"] = system_json(*c->sub);
    } else {
      j["behavior"] = behavior_json(*c->behavior);
    }
    components.push_back(std::move(j));
  }
  return json{{"inputs", name_list(s.inputs)},
              {"outputs", name_list(s.outputs)},
              {"components", components}};
}

json table_json(const TableMachine& m) {
  json states = json::array();
  for (const auto& st : m.states()) {
    json emits = json::array();
    for (const auto& option : st.emits) {
      json o = json::object();
      for (const auto& [ch, v] : option) o[ch] = spell(v, *m.outputs().at(ch));
      emits.push_back(std::move(o));
    }
    json transitions = json::array();
    for (const auto& tr : st.transitions) {
      json guards = json::array();
      for (const auto& g : tr.guards) {
        json gj{{"channel", g.channel}, {"test", test_name(g.test)}};
        if (g.test == Guard::Test::kEquals) {
          gj["literal"] = spell(g.literal, *m.inputs().at(g.channel));
        }
        guards.push_back(std::move(gj));
      }
      transitions.push_back(json{{"guards", guards}, {"targets", tr.targets}});
    }
    states.push_back(json{{"name", st.name}, {"emits", emits}, {"transitions", transitions}});
  }
  json out{{"inputs", name_list(m.inputs())},
           {"outputs", name_list(m.outputs())},
           {"init", m.initial_name()},
           {"states", states}};
  if (!m.chaotic().empty()) out["chaotic"] = name_list(m.chaotic());
  return out;
}

// Typed accessors with JSON-path-ish messages.
const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) json_fail(where + ": missing \"" + key + "\"");
  return j.at(key);
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) json_fail(where + ": expected a string");
  return j.get<std::string>();
}

std::vector<std::string> texts(const json& j, const std::string& where) {
  if (!j.is_array()) json_fail(where + ": expected a list");
  std::vector<std::string> out;
  for (const auto& x : j) out.push_back(text(x, where));
  return out;
}

std::size_t count(const json& j, const std::string& where) {
  if (!j.is_number_unsigned()) json_fail(where + ": expected a non-negative number");
  return j.get<std::size_t>();
}

class DocumentReader {
 public:
  explicit DocumentReader(const Registries& registries) : registries_(registries) {}

  Document read(const json& root) {
    doc_.file = kJsonFile;
    if (!root.is_object()) json_fail("document: expected an object");
    if (root.contains("alphabets")) {
      for (const auto& a : root.at("alphabets")) alphabet(a);
    }
    if (root.contains("channels")) {
      const auto& chans = root.at("channels");
      if (!chans.is_object()) json_fail("channels: expected an object");
      for (const auto& [n, a] : chans.items()) {
        doc_.channels.emplace(n, find_alphabet(text(a, "channels." + n)));
      }
    }
    if (root.contains("machines")) {
      for (const auto& m : root.at("machines")) machine(m);
    }
    if (root.contains("invariants")) {
      for (const auto& i : root.at("invariants")) invariant(i);
    }
    if (root.contains("system") && !root.at("system").is_null()) {
      doc_.system = system(root.at("system"), "system");
    }
    return std::move(doc_);
  }

 private:
  AlphabetPtr find_alphabet(const std::string& n) {
    for (const auto& a : doc_.alphabets) {
      if (a->name() == n) return a;
    }
    json_fail("unknown alphabet " + n);
  }

  AlphabetPtr find_channel(const std::string& n) {
    auto it = doc_.channels.find(n);
    if (it == doc_.channels.end()) json_fail("unknown channel " + n);
    return it->second;
  }

  ChannelMap channel_map(const json& j, const std::string& where) {
    ChannelMap out;
    for (const auto& n : texts(j, where)) out.emplace(n, find_channel(n));
    return out;
  }

  ChannelSet channel_set(const json& j, const std::string& where) {
    auto v = texts(j, where);
    return ChannelSet(v.begin(), v.end());
  }

  void alphabet(const json& j) {
    const auto n = text(field(j, "name", "alphabet"), "alphabet.name");
    for (const auto& a : doc_.alphabets) {
      if (a->name() == n) json_fail("duplicate alphabet " + n);
    }
    if (j.contains("product")) {
      auto parts = texts(j.at("product"), "alphabet " + n);
      if (parts.size() != 2) json_fail("alphabet " + n + ": product takes two alphabets");
      doc_.alphabets.push_back(
          Alphabet::product(n, find_alphabet(parts[0]), find_alphabet(parts[1])));
    } else {
      auto symbols = texts(field(j, "symbols", "alphabet " + n), "alphabet " + n);
      if (symbols.empty()) json_fail("alphabet " + n + " is empty");
      doc_.alphabets.push_back(std::make_shared<Alphabet>(n, std::move(symbols)));
    }
  }

  BuiltinParams params(const json& j, const std::string& where) {
    BuiltinParams out;
    if (j.is_null()) return out;
    if (!j.is_object()) json_fail(where + ": params must be an object");
    for (const auto& [k, v] : j.items()) out.emplace(k, text(v, where + "." + k));
    return out;
  }

  void machine(const json& j) {
    const auto n = text(field(j, "name", "machine"), "machine.name");
    if (doc_.machines.count(n)) json_fail("duplicate machine " + n);
    const std::string where = "machine " + n;
    try {
      if (j.contains("builtin")) {
        const auto kind = text(j.at("builtin"), where);
        doc_.machines.emplace(
            n, registries_.machines.make(kind, n, params(j.value("params", json()), where),
                                         doc_.channels));
        return;
      }
      const auto& t = field(j, "table", where);
      auto inputs = channel_map(field(t, "inputs", where), where);
      auto outputs = channel_map(field(t, "outputs", where), where);
      ChannelSet chaotic;
      if (t.contains("chaotic")) chaotic = channel_set(t.at("chaotic"), where);
      std::vector<TableState> states;
      for (const auto& sj : field(t, "states", where)) {
        TableState st;
        st.name = text(field(sj, "name", where), where);
        for (const auto& ej : field(sj, "emits", where)) {
          std::map<std::string, Interval> option;
          for (const auto& [ch, v] : ej.items()) {
            auto it = outputs.find(ch);
            if (it == outputs.end()) json_fail(where + ": " + ch + " is not an output");
            option.emplace(ch, unspell(v, *it->second, where));
          }
          st.emits.push_back(std::move(option));
        }
        for (const auto& tj : field(sj, "transitions", where)) {
          Transition tr;
          for (const auto& gj : field(tj, "guards", where)) {
            Guard g;
            g.channel = text(field(gj, "channel", where), where);
            auto it = inputs.find(g.channel);
            if (it == inputs.end()) json_fail(where + ": " + g.channel + " is not an input");
            const auto test = text(field(gj, "test", where), where);
            if (test == "equals") {
              g.test = Guard::Test::kEquals;
              g.literal = unspell(field(gj, "literal", where), *it->second, where);
            } else if (test == "empty") {
              g.test = Guard::Test::kEmpty;
            } else if (test == "nonempty") {
              g.test = Guard::Test::kNonEmpty;
            } else if (test == "any") {
              g.test = Guard::Test::kAny;
            } else {
              json_fail(where + ": unknown guard test " + test);
            }
            tr.guards.push_back(std::move(g));
          }
          tr.targets = texts(field(tj, "targets", where), where);
          st.transitions.push_back(std::move(tr));
        }
        states.push_back(std::move(st));
      }
      doc_.machines.emplace(n, std::make_shared<TableMachine>(
                                   n, inputs, outputs, chaotic, std::move(states),
                                   text(field(t, "init", where), where)));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      json_fail(where + ": " + e.what());
    }
  }

  void invariant(const json& j) {
    const auto n = text(field(j, "name", "invariant"), "invariant.name");
    const std::string where = "invariant " + n;
    if (doc_.invariants.count(n)) json_fail("duplicate invariant " + n);
    try {
      doc_.invariants.emplace(
          n, registries_.invariants.make(text(field(j, "kind", where), where), n,
                                         params(j.value("params", json()), where),
                                         doc_.channels));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      json_fail(where + ": " + e.what());
    }
  }

  BehaviorPtr behavior(const json& j, const std::string& where) {
    if (j.is_string()) {
      auto it = doc_.machines.find(j.get<std::string>());
      if (it == doc_.machines.end()) json_fail(where + ": unknown machine " + j.get<std::string>());
      return it->second;
    }
    if (!j.is_object()) json_fail(where + ": expected a behavior");
    try {
      if (j.contains("trivial")) return trivial_behavior();
      if (j.contains("view")) {
        const auto& v = j.at("view");
        InterfaceChange c;
        if (v.contains("rename")) {
          for (const auto& [from, to] : v.at("rename").items()) {
            c.rename.emplace(from, text(to, where));
          }
        }
        if (v.contains("hide")) c.hidden_inputs = channel_set(v.at("hide"), where);
        if (v.contains("drop")) c.dropped_outputs = channel_set(v.at("drop"), where);
        if (v.contains("extra")) c.extra_inputs = channel_map(v.at("extra"), where);
        if (v.contains("chaos")) c.chaotic_outputs = channel_map(v.at("chaos"), where);
        return std::make_shared<ViewMachine>(behavior(field(v, "base", where), where),
                                             std::move(c));
      }
      if (j.contains("compose")) {
        const auto& cj = j.at("compose");
        std::vector<BehaviorPtr> parts;
        for (const auto& p : field(cj, "parts", where)) parts.push_back(behavior(p, where));
        ComposeOptions o;
        if (cj.contains("chaos_bound")) o.chaos_bound = count(cj.at("chaos_bound"), where);
        if (cj.contains("materialize")) o.materialize = channel_set(cj.at("materialize"), where);
        return compose(parts, o);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      json_fail(where + ": " + e.what());
    }
    json_fail(where + ": expected trivial, view, compose or a machine name");
  }

  System system(const json& j, const std::string& where) {
    System s;
    s.inputs = channel_map(field(j, "inputs", where), where + ".inputs");
    s.outputs = channel_map(field(j, "outputs", where), where + ".outputs");
    for (const auto& cj : field(j, "components", where)) {
      const auto n = text(field(cj, "name", where), where);
      const std::string at = where + "." + n;
      if (cj.contains("sub")) {
        try {
          s.components.push_back(as_component(system(cj.at("sub"), at), n));
        } catch (const ParseError&) {
          throw;
        } catch (const Error& e) {
          json_fail(at + ": " + e.what());
        }
      } else {
        s.components.push_back(make_component(n, behavior(field(cj, "behavior", at), at)));
      }
    }
    return s;
  }

  const Registries& registries_;
  Document doc_;
};

json mode_json(const CheckMode& m) {
  json out{{"kind", to_string(m.kind)}};
  if (m.kind == CheckMode::Kind::kBounded) {
    out["depth"] = m.budget.depth;
    out["bound"] = m.budget.interval_bound;
    if (m.budget.mode == EnumerationBudget::Mode::kSampled) {
      out["kind"] = "sampled";
      out["samples"] = m.budget.samples;
      out["seed"] = m.budget.seed;
    }
  }
  return out;
}

CheckMode mode_from(const json& j) {
  const auto kind = text(field(j, "kind", "mode"), "mode.kind");
  auto number = [&](const char* key, std::size_t fallback) {
    return j.contains(key) ? count(j.at(key), std::string("mode.") + key) : fallback;
  };
  if (kind == "syntactic") return CheckMode::syntactic();
  if (kind == "assumed") return CheckMode::assumed();
  if (kind == "bounded") return CheckMode::bounded(number("depth", 5), number("bound", 1));
  if (kind == "sampled") {
    return CheckMode::sampled(number("depth", 5), number("samples", 1000), number("seed", 0),
                              number("bound", 1));
  }
  json_fail("mode: unknown kind " + kind);
}

}  // namespace

std::string to_json(const Document& doc) {
  json alphabets = json::array();
  for (const auto& a : doc.alphabets) {
    if (a->is_product()) {
      alphabets.push_back(
          json{{"name", a->name()}, {"product", {a->left()->name(), a->right()->name()}}});
    } else {
      alphabets.push_back(json{{"name", a->name()}, {"symbols", a->symbols()}});
    }
  }
  json channels = json::object();
  for (const auto& [n, a] : doc.channels) channels[n] = a->name();
  json machines = json::array();
  for (const auto& [n, m] : doc.machines) {
    if (const auto* t = dynamic_cast<const TableMachine*>(m.get())) {
      machines.push_back(json{{"name", n}, {"table", table_json(*t)}});
    } else if (const auto* b = dynamic_cast<const BuiltinMachine*>(m.get())) {
      machines.push_back(
          json{{"name", n}, {"builtin", b->builtin_kind()}, {"params", b->params()}});
    } else {
      throw DefinitionError("machine " + n + " has no written form");
    }
  }
  json invariants = json::array();
  for (const auto& [n, psi] : doc.invariants) {
    invariants.push_back(json{{"name", n}, {"kind", psi.kind}, {"params", psi.params}});
  }
  json root{{"alphabets", alphabets},
            {"channels", channels},
            {"machines", machines},
            {"invariants", invariants}};
  root["system"] = doc.system ? system_json(*doc.system) : json();
  return root.dump(2) + "\n";
}

Document document_from_json(std::string_view text, const Registries& registries) {
  return DocumentReader(registries).read(parse_text(text));
}

std::string script_to_json(const std::vector<RefinementStep>& steps) {
  json out = json::array();
  for (const auto& step : steps) {
    validate_step(step);
    json j{{"rule", rule_name(step.kind)}};
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, ComponentPayload>) {
            j["component"] = p.component;
          } else if constexpr (std::is_same_v<P, ChannelPayload>) {
            j["component"] = p.component;
            j["channel"] = p.channel;
          } else if constexpr (std::is_same_v<P, BehaviorPayload>) {
            j["component"] = p.component;
            j["machine"] = p.machine;
          } else if constexpr (std::is_same_v<P, InvariantPayload>) {
            j["component"] = p.component;
            j["machine"] = p.machine;
            j["invariant"] = p.invariant;
          } else if constexpr (std::is_same_v<P, FoldPayload>) {
            j["name"] = p.name;
            j["components"] = p.components;
            if (p.inputs) j["inputs"] = name_list(*p.inputs);
            if (p.outputs) j["outputs"] = name_list(*p.outputs);
          } else {
            j["from"] = p.from;
            j["to"] = p.to;
          }
        },
        step.payload);
    if (step.mode) j["mode"] = mode_json(*step.mode);
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

std::vector<RefinementStep> script_from_json(std::string_view text_in) {
  using K = RefinementStep::Kind;
  const json root = parse_text(text_in);
  if (!root.is_array()) json_fail("script: expected a list of steps");
  std::vector<RefinementStep> steps;
  for (const auto& j : root) {
    const auto rule = text(field(j, "rule", "step"), "step.rule");
    auto kind = rule_kind(rule);
    if (!kind) json_fail("unknown rule " + rule);
    auto str = [&](const char* key) { return text(field(j, key, rule), rule + "." + key); };
    RefinementStep step;
    step.kind = *kind;
    switch (*kind) {
      case K::kAddComponent:
      case K::kRemoveComponent:
      case K::kExpand:
        step.payload = ComponentPayload{str("component")};
        break;
      case K::kAddOutputChannel:
      case K::kRemoveOutputChannel:
      case K::kAddInputChannel:
      case K::kRemoveInputChannel:
        step.payload = ChannelPayload{str("component"), str("channel")};
        break;
      case K::kRefineBehavior:
        step.payload = BehaviorPayload{str("component"), str("machine")};
        break;
      case K::kRefineBehaviorWithInvariant:
        step.payload = InvariantPayload{str("component"), str("machine"), str("invariant")};
        break;
      case K::kFold: {
        FoldPayload p;
        p.name = str("name");
        p.components = texts(field(j, "components", rule), rule);
        if (j.contains("inputs")) {
          auto v = texts(j.at("inputs"), rule);
          p.inputs = ChannelSet(v.begin(), v.end());
        }
        if (j.contains("outputs")) {
          auto v = texts(j.at("outputs"), rule);
          p.outputs = ChannelSet(v.begin(), v.end());
        }
        step.payload = std::move(p);
        break;
      }
      case K::kRenameChannel:
        step.payload = RenamePayload{str("from"), str("to")};
        break;
    }
    if (j.contains("mode")) step.mode = mode_from(j.at("mode"));
    steps.push_back(std::move(step));
  }
  return steps;
}

std::string trace_to_json(const NamedStreamTuple& trace, const ChannelMap& alphabets) {
  json channels = json::object();
  for (const auto& [n, x] : trace.entries()) {
    auto it = alphabets.find(n);
    json ticks = json::array();
    for (const auto& v : x.intervals()) {
      if (it != alphabets.end()) {
        ticks.push_back(spell(v, *it->second));
      } else {
        ticks.push_back(v);
      }
    }
    channels[n] = std::move(ticks);
  }
  return json{{"ticks", trace.tick_len()}, {"channels", channels}}.dump(2) + "\n";
}

NamedStreamTuple trace_from_json(std::string_view text_in, const ChannelMap& alphabets) {
  const json root = parse_text(text_in);
  const auto ticks = count(field(root, "ticks", "trace"), "trace.ticks");
  const auto& chans = field(root, "channels", "trace");
  if (!chans.is_object()) json_fail("trace.channels: expected an object");
  std::map<std::string, TimedStreamPrefix> entries;
  for (const auto& [n, list] : chans.items()) {
    auto it = alphabets.find(n);
    if (it == alphabets.end()) json_fail("trace: unknown channel " + n);
    if (!list.is_array()) json_fail("trace." + n + ": expected a list of intervals");
    if (list.size() > ticks) json_fail("trace." + n + ": more intervals than ticks");
    std::vector<Interval> intervals;
    for (const auto& v : list) intervals.push_back(unspell(v, *it->second, "trace." + n));
    intervals.resize(ticks);
    entries.emplace(n, TimedStreamPrefix(std::move(intervals)));
  }
  return NamedStreamTuple(std::move(entries), ticks);
}

std::string traces_to_json(const std::set<NamedStreamTuple>& traces,
                           const ChannelMap& alphabets) {
  json out = json::array();
  for (const auto& t : traces) out.push_back(json::parse(trace_to_json(t, alphabets)));
  return out.dump(2) + "\n";
}

}  // namespace archref
