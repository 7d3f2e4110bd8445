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

#include "support.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace archref::testing {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p = 0.5) {
  return std::bernoulli_distribution(p)(rng);
}

Interval random_interval(std::mt19937_64& rng, const Alphabet& a) {
  if (coin(rng)) return {};
  return {static_cast<Symbol>(pick(rng, 0, a.size() - 1))};
}

}  // namespace

AlphabetPtr small_alphabet(std::size_t size, const std::string& name) {
  std::vector<std::string> symbols{"a", "b", "c", "d"};
  symbols.resize(size);
  return std::make_shared<Alphabet>(name, symbols);
}

BehaviorPtr unit_delay(const std::string& name, const std::string& in,
                       const std::string& out, const AlphabetPtr& alphabet) {
  std::vector<TableState> states;
  TableState silent{"none", {{}}, {}};
  states.push_back(silent);
  for (Symbol s = 0; s < alphabet->size(); ++s) {
    states.push_back({"got_" + alphabet->spell(s), {{{out, {s}}}}, {}});
  }
  for (auto& st : states) {
    st.transitions.push_back({{{in, Guard::Test::kEmpty, {}}}, {"none"}});
    for (Symbol s = 0; s < alphabet->size(); ++s) {
      st.transitions.push_back(
          {{{in, Guard::Test::kEquals, {s}}}, {"got_" + alphabet->spell(s)}});
    }
  }
  return std::make_shared<TableMachine>(name, ChannelMap{{in, alphabet}},
                                        ChannelMap{{out, alphabet}}, ChannelSet{},
                                        std::move(states), "none");
}

BehaviorPtr chooser(const std::string& name, const std::string& out,
                    const AlphabetPtr& alphabet, const std::vector<Interval>& options) {
  TableState st{"s", {}, {}};
  for (const auto& o : options) st.emits.push_back({{out, o}});
  return std::make_shared<TableMachine>(name, ChannelMap{}, ChannelMap{{out, alphabet}},
                                        ChannelSet{}, std::vector<TableState>{st}, "s");
}

NamedStreamTuple tuple(const std::map<std::string, std::vector<Interval>>& entries,
                       std::size_t ticks) {
  std::map<std::string, TimedStreamPrefix> out;
  for (const auto& [c, intervals] : entries) out[c] = TimedStreamPrefix(intervals);
  return NamedStreamTuple(std::move(out), ticks);
}

BehaviorPtr random_machine(std::mt19937_64& rng, const std::string& name,
                           const ChannelMap& inputs, const ChannelMap& outputs,
                           std::size_t max_states, const ChannelSet& chaotic) {
  const std::size_t n = pick(rng, 1, std::max<std::size_t>(1, max_states));
  std::vector<TableState> states(n);
  for (std::size_t k = 0; k < n; ++k) states[k].name = "s" + std::to_string(k);
  for (auto& st : states) {
    const std::size_t options = pick(rng, 1, 2);
    for (std::size_t o = 0; o < options; ++o) {
      std::map<std::string, Interval> emission;
      for (const auto& [c, a] : outputs) {
        if (!chaotic.count(c)) emission[c] = random_interval(rng, *a);
      }
      st.emits.push_back(std::move(emission));
    }
    const std::size_t transitions = pick(rng, 0, 3);
    for (std::size_t t = 0; t < transitions; ++t) {
      Transition tr;
      for (const auto& [c, a] : inputs) {
        switch (pick(rng, 0, 3)) {
          case 0:
            tr.guards.push_back({c, Guard::Test::kEquals, random_interval(rng, *a)});
            break;
          case 1:
            tr.guards.push_back({c, Guard::Test::kEmpty, {}});
            break;
          case 2:
            tr.guards.push_back({c, Guard::Test::kNonEmpty, {}});
            break;
          default:
            break;
        }
      }
      const std::size_t targets = pick(rng, 1, std::min<std::size_t>(2, n));
      for (std::size_t k = 0; k < targets; ++k) {
        tr.targets.push_back(states[pick(rng, 0, n - 1)].name);
      }
      std::sort(tr.targets.begin(), tr.targets.end());
      tr.targets.erase(std::unique(tr.targets.begin(), tr.targets.end()),
                       tr.targets.end());
      st.transitions.push_back(std::move(tr));
    }
  }
  return std::make_shared<TableMachine>(name, inputs, outputs, chaotic, std::move(states),
                                        "s0");
}

System random_system(std::mt19937_64& rng, const RandomLimits& limits) {
  auto alphabet = small_alphabet(pick(rng, 1, limits.max_alphabet));
  System s;
  const std::size_t system_inputs = pick(rng, 0, limits.max_system_inputs);
  for (std::size_t k = 0; k < system_inputs; ++k) {
    s.inputs["x" + std::to_string(k)] = alphabet;
  }
  const std::size_t count = pick(rng, 1, limits.max_components);
  std::vector<ChannelMap> outs(count);
  ChannelMap controlled;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t n = pick(rng, 1, limits.max_outputs_per_component);
    for (std::size_t j = 0; j < n; ++j) {
      std::string c = "c" + std::to_string(k) + static_cast<char>('a' + j);
      outs[k][c] = alphabet;
      controlled[c] = alphabet;
    }
  }
  ChannelMap readable = s.inputs;
  readable.insert(controlled.begin(), controlled.end());
  for (std::size_t k = 0; k < count; ++k) {
    ChannelMap ins;
    for (const auto& [c, a] : readable) {
      if (coin(rng, 0.4)) ins[c] = a;
    }
    ChannelSet chaotic;
    for (const auto& [c, _] : outs[k]) {
      if (coin(rng, limits.chaos_probability)) chaotic.insert(c);
    }
    const std::string name = "C" + std::to_string(k);
    s.components.push_back(make_component(
        name, random_machine(rng, name, ins, outs[k], limits.max_states, chaotic)));
  }
  for (const auto& [c, a] : controlled) {
    if (coin(rng)) s.outputs[c] = a;
  }
  if (s.outputs.empty()) s.outputs.insert(*controlled.begin());
  return s;
}

// ---------------------------------------------------------------------------

namespace {

void intervals_upto(std::size_t alphabet, std::size_t bound, Interval& prefix,
                    std::vector<Interval>& out) {
  out.push_back(prefix);
  if (prefix.size() == bound) return;
  for (std::size_t s = 0; s < alphabet; ++s) {
    prefix.push_back(static_cast<Symbol>(s));
    intervals_upto(alphabet, bound, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<NamedStreamTuple> all_inputs(const ChannelMap& channels, std::size_t ticks,
                                         std::size_t bound) {
  std::vector<std::string> names;
  std::vector<std::vector<Interval>> choices;
  for (const auto& [c, a] : channels) {
    names.push_back(c);
    std::vector<Interval> intervals;
    Interval prefix;
    intervals_upto(a->size(), bound, prefix, intervals);
    choices.push_back(std::move(intervals));
  }
  // One digit per (tick, channel).
  const std::size_t digits = names.size() * ticks;
  std::vector<std::size_t> odometer(digits, 0);
  std::vector<NamedStreamTuple> out;
  while (true) {
    std::map<std::string, TimedStreamPrefix> entries;
    for (std::size_t c = 0; c < names.size(); ++c) {
      std::vector<Interval> intervals;
      for (std::size_t t = 0; t < ticks; ++t) {
        intervals.push_back(choices[c][odometer[t * names.size() + c]]);
      }
      entries[names[c]] = TimedStreamPrefix(std::move(intervals));
    }
    out.emplace_back(std::move(entries), ticks);
    std::size_t d = 0;
    while (d < digits) {
      const std::size_t base = choices[d % names.size()].size();
      if (++odometer[d] < base) break;
      odometer[d] = 0;
      ++d;
    }
    if (d == digits) break;
  }
  return out;
}

std::size_t closed_form_count(const ChannelMap& channels, std::size_t ticks,
                              std::size_t bound) {
  std::size_t per_tick = 1;
  for (const auto& [_, a] : channels) {
    std::size_t sum = 0, power = 1;
    for (std::size_t l = 0; l <= bound; ++l) {
      sum += power;
      power *= a->size();
    }
    per_tick *= sum;
  }
  std::size_t total = 1;
  for (std::size_t t = 0; t < ticks; ++t) total *= per_tick;
  return total;
}

bool brute_inclusion(const MachineBehavior& fine, const MachineBehavior& coarse,
                     std::size_t ticks, std::size_t bound) {
  if (fine.input_names() != coarse.input_names() ||
      fine.output_names() != coarse.output_names()) {
    return false;
  }
  for (const auto& c : fine.chaotic()) {
    if (!coarse.chaotic().count(c)) return false;
  }
  ChannelSet compared;
  for (const auto& c : coarse.emitted()) compared.insert(c);
  for (const auto& input : all_inputs(fine.inputs(), ticks, bound)) {
    std::set<NamedStreamTuple> allowed;
    for (const auto& o : run(coarse, input, ticks)) allowed.insert(restrict(o, compared));
    for (const auto& o : run(fine, input, ticks)) {
      if (!allowed.count(restrict(o, compared))) return false;
    }
  }
  return true;
}

bool brute_system_inclusion(const System& old_system, const System& new_system,
                            std::size_t ticks, std::size_t bound) {
  return brute_inclusion(*blackbox(new_system), *blackbox(old_system), ticks, bound);
}

namespace {

std::uint16_t ref_delta(const corpus::Datum& old_datum, std::uint16_t d, std::size_t n) {
  if (!old_datum.has_value()) return d;
  int diff = static_cast<int>(d) - static_cast<int>(*old_datum);
  while (diff < 0) diff += static_cast<int>(n);
  return static_cast<std::uint16_t>(diff);
}

std::uint16_t ref_rho(const corpus::Datum& old_datum, std::uint16_t diff, std::size_t n) {
  if (!old_datum.has_value()) return diff;
  return static_cast<std::uint16_t>((*old_datum + diff) % n);
}

corpus::Database with(const corpus::Database& m, std::uint16_t key, std::uint16_t d) {
  std::vector<corpus::Datum> cells = m.cells();
  cells.at(key) = d;
  return corpus::Database(cells);
}

}  // namespace

corpus::Entries reference_delta_star(const corpus::Database& m, const corpus::Entries& x,
                                     std::size_t n) {
  if (x.empty()) return {};
  const auto [k, d] = x.front();
  corpus::Entries tail(x.begin() + 1, x.end());
  corpus::Entries out{{k, ref_delta(m.cells().at(k), d, n)}};
  auto rest = reference_delta_star(with(m, k, d), tail, n);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

corpus::Entries reference_rho_star(const corpus::Database& m, const corpus::Entries& x,
                                   std::size_t n) {
  if (x.empty()) return {};
  const auto [k, diff] = x.front();
  const std::uint16_t d = ref_rho(m.cells().at(k), diff, n);
  corpus::Entries tail(x.begin() + 1, x.end());
  corpus::Entries out{{k, d}};
  auto rest = reference_rho_star(with(m, k, d), tail, n);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

BehaviorFunction instantaneous_echo(const std::string& in, const std::string& out) {
  return [in, out](const NamedStreamTuple& input, std::size_t ticks) {
    std::map<std::string, TimedStreamPrefix> entries{{out, truncate(input.at(in), ticks)}};
    return std::set<NamedStreamTuple>{NamedStreamTuple(std::move(entries), ticks)};
  };
}

// ---------------------------------------------------------------------------
// DOT

namespace {

struct DotToken {
  enum class Kind { kId, kPunct, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  bool keywordable = false;  // bare identifier, may be a keyword
  std::size_t line = 1;
  std::size_t column = 1;
};

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

class DotParser {
 public:
  explicit DotParser(const std::string& text) { tokenize(text); }

  DotGraph parse() {
    if (is_keyword("strict")) next();
    if (is_keyword("digraph")) {
      graph_.directed = true;
    } else if (!is_keyword("graph")) {
      fail("expected 'graph' or 'digraph'");
    }
    next();
    if (peek().kind == DotToken::Kind::kId && !is_any_keyword()) graph_.name = next().text;
    expect("{");
    stmt_list();
    expect("}");
    if (peek().kind != DotToken::Kind::kEnd) fail("trailing input");
    return graph_;
  }

 private:
  void tokenize(const std::string& s) {
    std::size_t k = 0, line = 1, col = 1;
    auto adv = [&](std::size_t count = 1) {
      for (std::size_t j = 0; j < count && k < s.size(); ++j, ++k) {
        if (s[k] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
    };
    auto id_start = [](char c) {
      return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
             static_cast<unsigned char>(c) >= 0x80;
    };
    while (k < s.size()) {
      const char c = s[k];
      if (std::isspace(static_cast<unsigned char>(c))) {
        adv();
        continue;
      }
      if (c == '#' && col == 1) {
        while (k < s.size() && s[k] != '\n') adv();
        continue;
      }
      if (s.compare(k, 2, "//") == 0) {
        while (k < s.size() && s[k] != '\n') adv();
        continue;
      }
      if (s.compare(k, 2, "/*") == 0) {
        auto end = s.find("*/", k + 2);
        if (end == std::string::npos) fail_at(line, col, "unterminated comment");
        adv(end + 2 - k);
        continue;
      }
      DotToken t;
      t.line = line;
      t.column = col;
      if (s.compare(k, 2, "->") == 0 || s.compare(k, 2, "--") == 0) {
        t.kind = DotToken::Kind::kPunct;
        t.text = s.substr(k, 2);
        adv(2);
      } else if (std::string("{}[]=;,:").find(c) != std::string::npos) {
        t.kind = DotToken::Kind::kPunct;
        t.text = std::string(1, c);
        adv();
      } else if (c == '"') {
        t.kind = DotToken::Kind::kId;
        adv();
        while (true) {
          if (k >= s.size()) fail_at(t.line, t.column, "unterminated string");
          if (s[k] == '\\' && k + 1 < s.size() && s[k + 1] == '"') {
            t.text += '"';
            adv(2);
            continue;
          }
          if (s[k] == '"') {
            adv();
            break;
          }
          t.text += s[k];
          adv();
        }
      } else if (c == '<') {
        t.kind = DotToken::Kind::kId;
        int depth = 0;
        do {
          if (k >= s.size()) fail_at(t.line, t.column, "unterminated HTML string");
          if (s[k] == '<') ++depth;
          if (s[k] == '>') --depth;
          t.text += s[k];
          adv();
        } while (depth > 0);
      } else if (id_start(c)) {
        t.kind = DotToken::Kind::kId;
        t.keywordable = true;
        while (k < s.size() &&
               (id_start(s[k]) || std::isdigit(static_cast<unsigned char>(s[k])))) {
          t.text += s[k];
          adv();
        }
      } else if (c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = DotToken::Kind::kId;
        if (c == '-') {
          t.text += c;
          adv();
        }
        bool digits = false, dot = false;
        while (k < s.size()) {
          if (std::isdigit(static_cast<unsigned char>(s[k]))) {
            digits = true;
          } else if (s[k] == '.' && !dot) {
            dot = true;
          } else {
            break;
          }
          t.text += s[k];
          adv();
        }
        if (!digits) fail_at(t.line, t.column, "malformed numeral");
      } else {
        fail_at(line, col, std::string("unexpected character '") + c + "'");
      }
      tokens_.push_back(std::move(t));
    }
    DotToken end;
    end.line = line;
    end.column = col;
    tokens_.push_back(end);
  }

  const DotToken& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  DotToken next() {
    DotToken t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool is(const std::string& punct, std::size_t ahead = 0) const {
    return peek(ahead).kind == DotToken::Kind::kPunct && peek(ahead).text == punct;
  }
  bool is_keyword(const std::string& kw) const {
    return peek().kind == DotToken::Kind::kId && peek().keywordable &&
           lower(peek().text) == kw;
  }
  bool is_any_keyword() const {
    for (const char* kw : {"node", "edge", "graph", "digraph", "subgraph", "strict"}) {
      if (is_keyword(kw)) return true;
    }
    return false;
  }
  void expect(const std::string& punct) {
    if (!is(punct)) fail("expected '" + punct + "'");
    next();
  }
  std::string id() {
    if (peek().kind != DotToken::Kind::kId || is_any_keyword()) fail("expected an ID");
    return next().text;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    fail_at(peek().line, peek().column, msg + ", found '" + peek().text + "'");
  }
  [[noreturn]] static void fail_at(std::size_t line, std::size_t col,
                                   const std::string& msg) {
    throw std::runtime_error("dot:" + std::to_string(line) + ":" + std::to_string(col) +
                             ": " + msg);
  }

  void stmt_list() {
    while (!is("}") && peek().kind != DotToken::Kind::kEnd) {
      stmt();
      if (is(";")) next();
    }
  }

  std::map<std::string, std::string> attr_lists() {
    std::map<std::string, std::string> attrs;
    if (!is("[")) fail("expected '['");
    while (is("[")) {
      next();
      while (!is("]")) {
        std::string key = id();
        expect("=");
        attrs[key] = id();
        if (is(";") || is(",")) next();
      }
      expect("]");
    }
    return attrs;
  }

  // Returns the nodes a node_id or subgraph stands for.
  std::vector<std::string> operand() {
    if (is_keyword("subgraph") || is("{")) return subgraph();
    std::string n = id();
    if (is(":")) {
      next();
      id();
      if (is(":")) {
        next();
        id();
      }
    }
    graph_.nodes.insert(n);
    return {n};
  }

  std::vector<std::string> subgraph() {
    if (is_keyword("subgraph")) {
      next();
      if (peek().kind == DotToken::Kind::kId && !is_any_keyword()) next();
    }
    auto* saved = collected_;
    std::set<std::string> mine;
    collected_ = &mine;
    expect("{");
    stmt_list();
    expect("}");
    collected_ = saved;
    if (collected_) collected_->insert(mine.begin(), mine.end());
    return {mine.begin(), mine.end()};
  }

  void stmt() {
    if (is_keyword("graph") || is_keyword("node") || is_keyword("edge")) {
      next();
      attr_lists();
      return;
    }
    if (peek().kind == DotToken::Kind::kId && !is_any_keyword() && is("=", 1)) {
      id();
      next();
      id();
      return;
    }
    auto lhs = operand();
    if (collected_) collected_->insert(lhs.begin(), lhs.end());
    if (is("->") || is("--")) {
      std::vector<std::vector<std::string>> chain{lhs};
      while (is("->") || is("--")) {
        if (is("->") != graph_.directed) fail("edge operator does not match graph kind");
        next();
        chain.push_back(operand());
        if (collected_) collected_->insert(chain.back().begin(), chain.back().end());
      }
      std::map<std::string, std::string> attrs;
      if (is("[")) attrs = attr_lists();
      const std::string label = attrs.count("label") ? attrs["label"] : "";
      for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        for (const auto& a : chain[k]) {
          for (const auto& b : chain[k + 1]) graph_.edges.push_back({a, b, label});
        }
      }
      return;
    }
    if (lhs.size() == 1 && is("[")) {
      for (auto& [key, value] : attr_lists()) graph_.node_attributes[lhs[0]][key] = value;
    }
  }

  std::vector<DotToken> tokens_;
  std::size_t pos_ = 0;
  DotGraph graph_;
  std::set<std::string>* collected_ = nullptr;
};

}  // namespace

DotGraph parse_dot(const std::string& text) { return DotParser(text).parse(); }

}  // namespace archref::testing
