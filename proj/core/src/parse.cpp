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
#include <cctype>
#include <charconv>
#include <sstream>

#include "archref/corpus.hpp"
#include "archref/frontend.hpp"
#include "lexer.hpp"

namespace archref {

bool SourceSpan::contains(const SourceSpan& inner) const {
  if (file != inner.file) return false;
  auto before = [](std::size_t l1, std::size_t c1, std::size_t l2, std::size_t c2) {
    return l1 < l2 || (l1 == l2 && c1 <= c2);
  };
  return before(line, column, inner.line, inner.column) &&
         before(inner.end_line, inner.end_column, end_line, end_column);
}

std::string to_string(const SourceSpan& span) {
  if (!span.valid()) return span.file.empty() ? "<unknown>" : span.file;
  return span.file + ":" + std::to_string(span.line) + ":" + std::to_string(span.column);
}

std::string to_string(const Diagnostic& d) {
  static const char* kSeverity[] = {"error", "warning", "note"};
  std::string out = to_string(d.span) + ": " +
                    kSeverity[static_cast<int>(d.severity)] + ": " + d.message;
  if (d.condition) out += " [condition " + std::to_string(*d.condition) + "]";
  if (!d.rule.empty()) out += " [rule " + d.rule + "]";
  return out;
}

namespace {

std::string describe(const std::vector<Diagnostic>& diagnostics) {
  std::string out;
  for (const auto& d : diagnostics) {
    if (!out.empty()) out += "\n";
    out += to_string(d);
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : Error(describe(diagnostics)), diagnostics_(std::move(diagnostics)) {}

Registries default_registries() {
  Registries r;
  corpus::register_builtins(r.machines);
  corpus::register_invariants(r.invariants);
  return r;
}

const System& Document::require_system() const {
  if (!system) throw DefinitionError(file + ": no system declared");
  return *system;
}

SourceSpan Document::span_of(const std::string& key) const {
  auto it = spans.find(key);
  if (it != spans.end()) return it->second;
  SourceSpan s;
  s.file = file;
  return s;
}

RuleContext Document::rule_context(const CheckMode& mode) const {
  RuleContext ctx;
  ctx.machines = machines;
  ctx.invariants = invariants;
  ctx.channels = channels;
  ctx.default_mode = mode;
  return ctx;
}

std::vector<Diagnostic> consistency_diagnostics(const Document& doc,
                                                const std::vector<Violation>& violations) {
  std::vector<Diagnostic> out;
  for (const auto& v : violations) {
    Diagnostic d;
    d.message = v.message;
    d.condition = v.condition;
    d.span = doc.span_of("system");
    for (const auto& subject : v.subjects) {
      for (const char* kind : {"component:", "channel:"}) {
        auto it = doc.spans.find(kind + subject);
        if (it != doc.spans.end()) {
          d.span = it->second;
          break;
        }
      }
      if (d.span.valid() && d.span.line != doc.span_of("system").line) break;
    }
    out.push_back(std::move(d));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Architecture files

namespace {

class ArchParser {
 public:
  ArchParser(std::string_view text, std::string file, const Registries& registries)
      : lex_(text, file), registries_(registries) {
    doc_.file = std::move(file);
  }

  Document run() {
    while (!lex_.at_end()) {
      const Token& t = lex_.peek();
      if (t.is_word("alphabet")) {
        alphabet();
      } else if (t.is_word("channel")) {
        channel();
      } else if (t.is_word("machine")) {
        machine();
      } else if (t.is_word("invariant")) {
        invariant();
      } else if (t.is_word("system")) {
        system();
      } else {
        lex_.fail(t, "expected a declaration, found '" + t.text + "'");
      }
    }
    return std::move(doc_);
  }

 private:
  void declare(const std::string& kind, const std::string& name, const Token& at,
               SourceSpan span) {
    auto key = kind + ":" + name;
    if (doc_.spans.count(key)) lex_.fail(at, "duplicate " + kind + " " + name);
    doc_.spans[key] = std::move(span);
  }

  AlphabetPtr find_alphabet(const Token& t) {
    for (const auto& a : doc_.alphabets) {
      if (a->name() == t.text) return a;
    }
    lex_.fail(t, "unknown alphabet " + t.text);
  }

  AlphabetPtr find_channel(const Token& t) {
    auto it = doc_.channels.find(t.text);
    if (it == doc_.channels.end()) lex_.fail(t, "unknown channel " + t.text);
    return it->second;
  }

  void alphabet() {
    const Token start = lex_.next();
    const Token name = lex_.expect_name();
    lex_.expect("=");
    AlphabetPtr a;
    if (lex_.accept("{")) {
      std::vector<std::string> symbols;
      std::set<std::string> seen;
      if (!lex_.peek().is("}")) {
        do {
          const Token s = lex_.expect_value();
          if (!seen.insert(s.text).second) lex_.fail(s, "duplicate symbol " + s.text);
          symbols.push_back(s.text);
        } while (lex_.accept(","));
      }
      lex_.expect("}");
      if (symbols.empty()) lex_.fail(name, "alphabet " + name.text + " is empty");
      a = std::make_shared<Alphabet>(name.text, std::move(symbols));
    } else {
      const Token left = lex_.expect_name();
      lex_.expect("*");
      const Token right = lex_.expect_name();
      a = Alphabet::product(name.text, find_alphabet(left), find_alphabet(right));
    }
    const Token end = lex_.expect(";");
    declare("alphabet", name.text, name, lex_.span(start, end));
    doc_.alphabets.push_back(std::move(a));
  }

  void channel() {
    const Token start = lex_.next();
    const Token name = lex_.expect_name();
    lex_.expect(":");
    const Token alpha = lex_.expect_name();
    auto a = find_alphabet(alpha);
    const Token end = lex_.expect(";");
    declare("channel", name.text, name, lex_.span(start, end));
    doc_.channels.emplace(name.text, std::move(a));
  }

  BuiltinParams params() {
    BuiltinParams out;
    lex_.expect("(");
    if (!lex_.peek().is(")")) {
      do {
        const Token key = lex_.expect_name();
        lex_.expect(":");
        const Token value = lex_.expect_value();
        if (!out.emplace(key.text, value.text).second) {
          lex_.fail(key, "duplicate parameter " + key.text);
        }
      } while (lex_.accept(","));
    }
    lex_.expect(")");
    return out;
  }

  ChannelMap channel_list() {
    ChannelMap out;
    if (lex_.peek().is(";") || lex_.peek().is(")")) return out;
    do {
      const Token t = lex_.expect_name();
      if (!out.emplace(t.text, find_channel(t)).second) {
        lex_.fail(t, "channel " + t.text + " listed twice");
      }
    } while (lex_.accept(","));
    return out;
  }

  ChannelSet name_list() {
    ChannelSet out;
    if (lex_.peek().is(";") || lex_.peek().is(")")) return out;
    do {
      const Token t = lex_.expect_name();
      if (!out.insert(t.text).second) lex_.fail(t, t.text + " listed twice");
    } while (lex_.accept(","));
    return out;
  }

  Interval interval_literal(const AlphabetPtr& alphabet) {
    Interval out;
    lex_.expect("[");
    if (!lex_.peek().is("]")) {
      do {
        const Token s = lex_.expect_value();
        auto sym = alphabet->find(s.text);
        if (!sym) {
          lex_.fail(s, "symbol " + s.text + " is not in alphabet " + alphabet->name());
        }
        out.push_back(*sym);
      } while (lex_.accept(","));
    }
    lex_.expect("]");
    return out;
  }

  void machine() {
    const Token start = lex_.next();
    const Token name = lex_.expect_name();
    if (doc_.spans.count("machine:" + name.text)) {
      lex_.fail(name, "duplicate machine " + name.text);
    }
    BehaviorPtr m;
    if (lex_.accept("=")) {
      const Token kind = lex_.expect_name();
      auto p = params();
      if (!registries_.machines.has(kind.text)) {
        lex_.fail(kind, "unknown machine kind " + kind.text);
      }
      try {
        m = registries_.machines.make(kind.text, name.text, p, doc_.channels);
      } catch (const Error& e) {
        lex_.fail(kind, e.what());
      }
      lex_.expect(";");
    } else {
      m = table(name);
    }
    declare("machine", name.text, name, lex_.span(start, lex_.last()));
    doc_.machines.emplace(name.text, std::move(m));
  }

  BehaviorPtr table(const Token& name) {
    lex_.expect("{");
    ChannelMap inputs, outputs;
    ChannelSet chaotic;
    std::optional<std::string> init;
    std::vector<TableState> states;
    // Guards and emissions need the interface; parse them after it.
    while (!lex_.accept("}")) {
      const Token t = lex_.expect_name();
      if (t.text == "inputs") {
        lex_.expect(":");
        inputs = channel_list();
      } else if (t.text == "outputs") {
        lex_.expect(":");
        outputs = channel_list();
      } else if (t.text == "chaotic") {
        lex_.expect(":");
        chaotic = name_list();
      } else if (t.text == "init") {
        lex_.expect(":");
        init = lex_.expect_name().text;
      } else if (t.text == "state") {
        states.push_back(table_state(inputs, outputs));
        continue;
      } else {
        lex_.fail(t, "unexpected '" + t.text + "' in machine " + name.text);
      }
      lex_.expect(";");
    }
    if (!init) lex_.fail(name, "machine " + name.text + " has no init state");
    try {
      return std::make_shared<TableMachine>(name.text, inputs, outputs, chaotic,
                                            std::move(states), *init);
    } catch (const Error& e) {
      lex_.fail(name, e.what());
    }
  }

  TableState table_state(const ChannelMap& inputs, const ChannelMap& outputs) {
    TableState st;
    st.name = lex_.expect_name().text;
    lex_.expect("{");
    while (!lex_.accept("}")) {
      const Token t = lex_.expect_name();
      if (t.text == "emit") {
        std::map<std::string, Interval> option;
        lex_.expect("{");
        if (!lex_.peek().is("}")) {
          do {
            const Token ch = lex_.expect_name();
            auto it = outputs.find(ch.text);
            if (it == outputs.end()) lex_.fail(ch, ch.text + " is not an output");
            lex_.expect("=");
            if (!option.emplace(ch.text, interval_literal(it->second)).second) {
              lex_.fail(ch, ch.text + " emitted twice");
            }
          } while (lex_.accept(","));
        }
        lex_.expect("}");
        st.emits.push_back(std::move(option));
      } else if (t.text == "on") {
        Transition tr;
        if (!lex_.peek().is("->")) {
          do {
            const Token ch = lex_.expect_name();
            auto it = inputs.find(ch.text);
            if (it == inputs.end()) lex_.fail(ch, ch.text + " is not an input");
            Guard g;
            g.channel = ch.text;
            if (lex_.accept("=")) {
              g.test = Guard::Test::kEquals;
              g.literal = interval_literal(it->second);
            } else {
              const Token test = lex_.expect_name();
              if (test.text == "empty") {
                g.test = Guard::Test::kEmpty;
              } else if (test.text == "nonempty") {
                g.test = Guard::Test::kNonEmpty;
              } else if (test.text == "any") {
                g.test = Guard::Test::kAny;
              } else {
                lex_.fail(test, "expected '=', empty, nonempty or any");
              }
            }
            tr.guards.push_back(std::move(g));
          } while (lex_.accept(","));
        }
        lex_.expect("->");
        do {
          tr.targets.push_back(lex_.expect_name().text);
        } while (lex_.accept("|"));
        st.transitions.push_back(std::move(tr));
      } else {
        lex_.fail(t, "expected emit or on");
      }
      lex_.expect(";");
    }
    return st;
  }

  void invariant() {
    const Token start = lex_.next();
    const Token name = lex_.expect_name();
    lex_.expect("=");
    const Token kind = lex_.expect_name();
    auto p = params();
    const Token end = lex_.expect(";");
    if (!registries_.invariants.has(kind.text)) {
      lex_.fail(kind, "unknown invariant kind " + kind.text);
    }
    declare("invariant", name.text, name, lex_.span(start, end));
    try {
      doc_.invariants.emplace(name.text, registries_.invariants.make(kind.text, name.text, p,
                                                                     doc_.channels));
    } catch (const Error& e) {
      lex_.fail(kind, e.what());
    }
  }

  void system() {
    const Token start = lex_.next();
    if (doc_.system) lex_.fail(start, "multiple systems");
    lex_.expect("{");
    System s = system_body("");
    doc_.spans["system"] = lex_.span(start, lex_.last());
    doc_.system = std::move(s);
  }

  /// Parses up to and including the closing brace.
  System system_body(const std::string& prefix) {
    System s;
    bool have_inputs = false, have_outputs = false;
    while (!lex_.accept("}")) {
      const Token t = lex_.expect_name();
      if (t.text == "inputs" || t.text == "outputs") {
        bool& seen = t.text == "inputs" ? have_inputs : have_outputs;
        if (seen) lex_.fail(t, "duplicate " + t.text + " clause");
        seen = true;
        lex_.expect(":");
        (t.text == "inputs" ? s.inputs : s.outputs) = channel_list();
        lex_.expect(";");
      } else if (t.text == "component") {
        const Token name = lex_.expect_name();
        const auto path = prefix + name.text;
        Component c;
        if (lex_.accept("=")) {
          auto behavior = behavior_expr();
          lex_.expect(";");
          c = make_component(name.text, std::move(behavior));
        } else {
          lex_.expect("{");
          System sub = system_body(path + "/");
          try {
            c = as_component(sub, name.text);
          } catch (const Error& e) {
            lex_.fail(name, "component " + name.text + ": " + e.what());
          }
        }
        // Repeated names are a consistency violation, reported by check.
        doc_.spans.emplace("component:" + path, lex_.span(t, lex_.last()));
        s.components.push_back(std::move(c));
      } else {
        lex_.fail(t, "expected inputs, outputs or component");
      }
    }
    return s;
  }

  BehaviorPtr behavior_expr() {
    const Token t = lex_.expect_name();
    if (t.text == "trivial") return trivial_behavior();
    if (t.text == "view" && lex_.peek().is("(")) {
      lex_.next();
      auto base = behavior_expr();
      InterfaceChange change;
      while (lex_.accept(";")) {
        const Token clause = lex_.expect_name();
        if (clause.text == "rename") {
          do {
            const Token from = lex_.expect_name();
            lex_.expect("->");
            const Token to = lex_.expect_name();
            if (!change.rename.emplace(from.text, to.text).second) {
              lex_.fail(from, from.text + " renamed twice");
            }
          } while (lex_.accept(","));
        } else if (clause.text == "hide") {
          change.hidden_inputs = name_list();
        } else if (clause.text == "drop") {
          change.dropped_outputs = name_list();
        } else if (clause.text == "extra") {
          change.extra_inputs = channel_list();
        } else if (clause.text == "chaos") {
          change.chaotic_outputs = channel_list();
        } else {
          lex_.fail(clause, "expected rename, hide, drop, extra or chaos");
        }
      }
      lex_.expect(")");
      try {
        return std::make_shared<ViewMachine>(std::move(base), std::move(change));
      } catch (const Error& e) {
        lex_.fail(t, e.what());
      }
    }
    if (t.text == "compose" && lex_.peek().is("(")) {
      lex_.next();
      std::vector<BehaviorPtr> parts;
      ComposeOptions options;
      if (!lex_.peek().is(")") && !lex_.peek().is(";")) {
        do {
          parts.push_back(behavior_expr());
        } while (lex_.accept(","));
      }
      while (lex_.accept(";")) {
        const Token opt = lex_.expect_name();
        if (opt.text == "chaos-bound") {
          const Token n = lex_.expect_value();
          std::size_t v = 0;
          auto [ptr, ec] = std::from_chars(n.text.data(), n.text.data() + n.text.size(), v);
          if (ec != std::errc() || ptr != n.text.data() + n.text.size()) {
            lex_.fail(n, "chaos-bound must be a number");
          }
          options.chaos_bound = v;
        } else if (opt.text == "materialize") {
          options.materialize = name_list();
        } else {
          lex_.fail(opt, "expected chaos-bound or materialize");
        }
      }
      lex_.expect(")");
      try {
        return compose(parts, options);
      } catch (const Error& e) {
        lex_.fail(t, e.what());
      }
    }
    auto it = doc_.machines.find(t.text);
    if (it == doc_.machines.end()) lex_.fail(t, "unknown machine " + t.text);
    return it->second;
  }

  Lexer lex_;
  const Registries& registries_;
  Document doc_;
};

}  // namespace

Document parse_architecture(std::string_view text, const std::string& file,
                            const Registries& registries) {
  return ArchParser(text, file, registries).run();
}

// ---------------------------------------------------------------------------
// Scripts

namespace {

[[noreturn]] void script_fail(const std::string& file, std::size_t line,
                              std::size_t column, const std::string& message) {
  Diagnostic d;
  d.message = message;
  d.span = {file, line, column, line, column};
  throw ParseError({std::move(d)});
}

struct Word {
  std::string text;
  std::size_t column;
};

std::vector<Word> split_words(const std::string& line) {
  std::vector<Word> out;
  std::size_t k = 0;
  while (k < line.size()) {
    if (line[k] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[k]))) {
      ++k;
      continue;
    }
    std::size_t start = k;
    while (k < line.size() && !std::isspace(static_cast<unsigned char>(line[k])) &&
           line[k] != '#') {
      ++k;
    }
    out.push_back({line.substr(start, k - start), start + 1});
  }
  return out;
}

ChannelSet comma_set(const std::string& text) {
  ChannelSet out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(item);
  }
  return out;
}

std::vector<std::string> comma_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::vector<RefinementStep> parse_script(std::string_view text, const std::string& file) {
  using K = RefinementStep::Kind;
  std::vector<RefinementStep> steps;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto words = split_words(line);
    if (words.empty()) continue;
    auto kind = rule_kind(words[0].text);
    if (!kind) {
      script_fail(file, line_no, words[0].column, "unknown rule " + words[0].text);
    }
    std::vector<Word> positional;
    std::map<std::string, Word> options;
    for (std::size_t k = 1; k < words.size(); ++k) {
      auto eq = words[k].text.find('=');
      if (eq == std::string::npos) {
        positional.push_back(words[k]);
      } else {
        auto key = words[k].text.substr(0, eq);
        Word value{words[k].text.substr(eq + 1), words[k].column + eq + 1};
        if (!options.emplace(key, value).second) {
          script_fail(file, line_no, words[k].column, "duplicate option " + key);
        }
      }
    }
    const std::string rule = words[0].text;
    auto want_positional = [&](std::size_t n) {
      if (positional.size() != n) {
        script_fail(file, line_no, words[0].column,
                    rule + " takes " + std::to_string(n) + " argument" +
                        (n == 1 ? "" : "s") + ", got " +
                        std::to_string(positional.size()));
      }
    };
    std::set<std::string> used;
    auto option = [&](const std::string& key, bool required) -> std::optional<std::string> {
      auto it = options.find(key);
      if (it == options.end()) {
        if (required) script_fail(file, line_no, words[0].column, rule + " needs " + key + "=");
        return std::nullopt;
      }
      used.insert(key);
      return it->second.text;
    };

    RefinementStep step;
    step.kind = *kind;
    step.line = line_no;
    switch (*kind) {
      case K::kAddComponent:
      case K::kRemoveComponent:
      case K::kExpand:
        want_positional(1);
        step.payload = ComponentPayload{positional[0].text};
        break;
      case K::kAddOutputChannel:
      case K::kRemoveOutputChannel:
      case K::kAddInputChannel:
      case K::kRemoveInputChannel:
        want_positional(2);
        step.payload = ChannelPayload{positional[0].text, positional[1].text};
        break;
      case K::kRefineBehavior:
        want_positional(1);
        step.payload = BehaviorPayload{positional[0].text, *option("machine", true)};
        break;
      case K::kRefineBehaviorWithInvariant:
        want_positional(1);
        step.payload = InvariantPayload{positional[0].text, *option("machine", true),
                                        *option("invariant", true)};
        break;
      case K::kFold: {
        want_positional(1);
        FoldPayload p;
        p.name = positional[0].text;
        p.components = comma_list(*option("components", true));
        if (auto v = option("inputs", false)) p.inputs = comma_set(*v);
        if (auto v = option("outputs", false)) p.outputs = comma_set(*v);
        step.payload = std::move(p);
        break;
      }
      case K::kRenameChannel:
        want_positional(2);
        step.payload = RenamePayload{positional[0].text, positional[1].text};
        break;
    }

    auto number = [&](const std::string& key) -> std::optional<std::size_t> {
      auto v = option(key, false);
      if (!v) return std::nullopt;
      std::size_t out = 0;
      auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
      if (ec != std::errc() || ptr != v->data() + v->size()) {
        script_fail(file, line_no, options.at(key).column, key + " must be a number");
      }
      return out;
    };
    auto mode = option("mode", false);
    auto depth = number("depth");
    auto bound = number("bound");
    auto samples = number("samples");
    auto seed = number("seed");
    if (mode) {
      if (*mode == "syntactic") {
        step.mode = CheckMode::syntactic();
      } else if (*mode == "assumed") {
        step.mode = CheckMode::assumed();
      } else if (*mode == "bounded") {
        step.mode = CheckMode::bounded(depth.value_or(5), bound.value_or(1));
      } else if (*mode == "sampled") {
        step.mode = CheckMode::sampled(depth.value_or(5), samples.value_or(1000),
                                       seed.value_or(0), bound.value_or(1));
      } else {
        script_fail(file, line_no, options.at("mode").column,
                    "mode must be syntactic, bounded, sampled or assumed");
      }
    } else if (depth || bound || samples || seed) {
      script_fail(file, line_no, words[0].column, "budget options need mode=");
    }
    for (const auto& [key, w] : options) {
      if (!used.count(key)) script_fail(file, line_no, w.column, "unknown option " + key);
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

}  // namespace archref
