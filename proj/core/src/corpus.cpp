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

#include "archref/corpus.hpp"

#include <algorithm>
#include <charconv>

#include "archref/errors.hpp"
#include "detail.hpp"

namespace archref::corpus {

Datum Database::at(std::uint16_t key) const {
  if (key >= cells_.size()) throw OutOfRangeError("key out of range");
  return cells_[key];
}

void Database::store(std::uint16_t key, std::uint16_t datum) {
  if (key >= cells_.size()) throw OutOfRangeError("key out of range");
  cells_[key] = datum;
}

Database Database::updated(std::uint16_t key, std::uint16_t datum) const {
  Database m = *this;
  m.store(key, datum);
  return m;
}

std::uint16_t delta(Datum old_datum, std::uint16_t new_datum, std::size_t n) {
  if (!old_datum) return new_datum;
  return static_cast<std::uint16_t>((new_datum + n - *old_datum) % n);
}

std::uint16_t rho(Datum old_datum, std::uint16_t difference, std::size_t n) {
  if (!old_datum) return difference;
  return static_cast<std::uint16_t>((*old_datum + difference) % n);
}

std::uint16_t preprocess(std::uint16_t datum, std::size_t n) {
  return static_cast<std::uint16_t>((datum + 1) % n);
}

Entries delta_star(const Database& m, const Entries& x, std::size_t n) {
  Entries out;
  out.reserve(x.size());
  Database current = m;
  for (const auto& e : x) {
    out.push_back({e.key, delta(current.at(e.key), e.datum, n)});
    current.store(e.key, e.datum);
  }
  return out;
}

Entries rho_star(const Database& m, const Entries& x, std::size_t n) {
  Entries out;
  out.reserve(x.size());
  Database current = m;
  for (const auto& e : x) {
    auto d = rho(current.at(e.key), e.datum, n);
    out.push_back({e.key, d});
    current.store(e.key, d);
  }
  return out;
}

Alphabets make_alphabets(const Config& config) {
  if (config.keys == 0 || config.data == 0) {
    throw DefinitionError("corpus needs at least one key and one datum");
  }
  std::vector<std::string> keys;
  for (std::size_t k = 0; k < config.keys; ++k) keys.push_back("k" + std::to_string(k));
  std::vector<std::string> data;
  for (std::size_t d = 0; d < config.data; ++d) data.push_back(std::to_string(d));
  Alphabets a;
  a.key = std::make_shared<Alphabet>("Key", std::move(keys));
  a.data = std::make_shared<Alphabet>("Data", std::move(data));
  a.entry = Alphabet::product("Entry", a.key, a.data);
  return a;
}

ChannelMap channels(const Config& config) {
  auto a = make_alphabets(config);
  return {{"In", a.entry}, {"I", a.entry},  {"D", a.entry},
          {"R", a.entry},  {"Key", a.key},  {"Data", a.data}};
}

Entries decode(const Interval& interval, const Alphabet& entry) {
  Entries out;
  out.reserve(interval.size());
  for (auto s : interval) {
    auto [k, d] = entry.unpair(s);
    out.push_back({k, d});
  }
  return out;
}

Interval encode(const Entries& entries, const Alphabet& entry) {
  Interval out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(entry.pair(e.key, e.datum));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// State fragments: database cells (-1 empty), then length-prefixed intervals.
void put_cells(const Database& m, State& s) {
  for (const auto& c : m.cells()) s.push_back(c ? *c : -1);
}

Database get_cells(const State& s, std::size_t& pos, std::size_t keys) {
  std::vector<Datum> cells(keys);
  for (std::size_t k = 0; k < keys; ++k, ++pos) {
    if (s[pos] >= 0) cells[k] = static_cast<std::uint16_t>(s[pos]);
  }
  return Database(std::move(cells));
}

void put_interval(const Interval& v, State& s) {
  s.push_back(static_cast<std::int32_t>(v.size()));
  for (auto x : v) s.push_back(x);
}

Interval get_interval(const State& s, std::size_t& pos) {
  auto len = static_cast<std::size_t>(s[pos++]);
  Interval v(s.begin() + static_cast<std::ptrdiff_t>(pos),
             s.begin() + static_cast<std::ptrdiff_t>(pos + len));
  pos += len;
  return v;
}

std::size_t index_of(const std::vector<std::string>& order, const std::string& name) {
  auto it = std::find(order.begin(), order.end(), name);
  return static_cast<std::size_t>(it - order.begin());
}

const std::string& param(const BuiltinParams& p, const std::string& key,
                         const std::string& kind) {
  auto it = p.find(key);
  if (it == p.end()) throw DefinitionError(kind + " needs parameter " + key);
  return it->second;
}

std::string param_or(const BuiltinParams& p, const std::string& key,
                     std::string fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void only_params(const BuiltinParams& p, const ChannelSet& allowed,
                 const std::string& kind) {
  for (const auto& [k, _] : p) {
    if (!allowed.count(k)) throw DefinitionError(kind + ": unknown parameter " + k);
  }
}

std::size_t number_param(const BuiltinParams& p, const std::string& key,
                         std::size_t fallback, const std::string& kind) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  std::size_t v = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DefinitionError(kind + ": " + key + " must be a number");
  }
  return v;
}

AlphabetPtr channel_alphabet(const ChannelMap& declared, const std::string& name,
                             const std::string& kind) {
  auto it = declared.find(name);
  if (it == declared.end()) {
    throw DefinitionError(kind + ": unknown channel " + name);
  }
  return it->second;
}

AlphabetPtr entry_alphabet(const ChannelMap& declared, const std::string& name,
                           const std::string& kind) {
  auto a = channel_alphabet(declared, name, kind);
  if (!a->is_product()) {
    throw DefinitionError(kind + ": channel " + name + " must carry key.datum pairs");
  }
  return a;
}

class PreprocessMachine : public BuiltinMachine {
 public:
  PreprocessMachine(std::string name, BuiltinParams params, ChannelMap inputs,
                    ChannelMap outputs, AlphabetPtr entry)
      : BuiltinMachine(std::move(name), "preprocess", std::move(params),
                       std::move(inputs), std::move(outputs)),
        entry_(std::move(entry)),
        n_(entry_->right()->size()) {}

  std::vector<State> initial_states() const override { return {State{0}}; }

  void emit(const State& state, std::vector<Valuation>& out) const override {
    std::size_t pos = 0;
    out.push_back({get_interval(state, pos)});
  }

  void step(const State&, const Valuation& input,
            std::vector<State>& out) const override {
    Entries xs = decode(input[0], *entry_);
    for (auto& e : xs) e.datum = preprocess(e.datum, n_);
    State next;
    put_interval(encode(xs, *entry_), next);
    out.push_back(std::move(next));
  }

  ChannelSet reads() const override { return input_names(); }

 private:
  AlphabetPtr entry_;
  std::size_t n_;
};

/// Running difference encoding (decode = false) or reconstruction.
class CodecMachine : public BuiltinMachine {
 public:
  CodecMachine(std::string name, std::string kind, BuiltinParams params,
               ChannelMap inputs, ChannelMap outputs, AlphabetPtr entry,
               bool decode, bool offset_fault)
      : BuiltinMachine(std::move(name), std::move(kind), std::move(params),
                       std::move(inputs), std::move(outputs)),
        entry_(std::move(entry)),
        keys_(entry_->left()->size()),
        n_(entry_->right()->size()),
        decode_(decode),
        offset_fault_(offset_fault) {}

  std::vector<State> initial_states() const override {
    State s;
    put_cells(Database(keys_), s);
    put_interval({}, s);
    return {s};
  }

  void emit(const State& state, std::vector<Valuation>& out) const override {
    std::size_t pos = keys_;
    out.push_back({get_interval(state, pos)});
  }

  void step(const State& state, const Valuation& input,
            std::vector<State>& out) const override {
    std::size_t pos = 0;
    Database m = get_cells(state, pos, keys_);
    Entries emitted;
    for (const auto& e : decode(input[0], *entry_)) {
      if (decode_) {
        auto d = rho(m.at(e.key), e.datum, n_);
        m.store(e.key, d);
        if (offset_fault_) d = static_cast<std::uint16_t>((d + 1) % n_);
        emitted.push_back({e.key, d});
      } else {
        emitted.push_back({e.key, delta(m.at(e.key), e.datum, n_)});
        m.store(e.key, e.datum);
      }
    }
    State next;
    put_cells(m, next);
    put_interval(encode(emitted, *entry_), next);
    out.push_back(std::move(next));
  }

  ChannelSet reads() const override { return input_names(); }

 private:
  AlphabetPtr entry_;
  std::size_t keys_;
  std::size_t n_;
  bool decode_;
  bool offset_fault_;
};

/**
 * Keyed store. Entries arriving on the store channel are applied `delay`
 * ticks later; every query on the key channel is answered next tick with
 * the stored datum, or not at all for an empty cell.
 */
class DatabaseMachine : public BuiltinMachine {
 public:
  DatabaseMachine(std::string name, BuiltinParams params, ChannelMap inputs,
                  ChannelMap outputs, AlphabetPtr entry, const std::string& store,
                  const std::string& key, std::size_t delay, bool any_order)
      : BuiltinMachine(std::move(name), "database", std::move(params),
                       std::move(inputs), std::move(outputs)),
        entry_(std::move(entry)),
        keys_(entry_->left()->size()),
        store_(index_of(input_order(), store)),
        key_(index_of(input_order(), key)),
        delay_(delay),
        any_order_(any_order),
        reads_{store, key} {}

  std::vector<State> initial_states() const override {
    State s;
    put_cells(Database(keys_), s);
    put_interval({}, s);
    for (std::size_t k = 0; k < delay_; ++k) put_interval({}, s);
    return {s};
  }

  void emit(const State& state, std::vector<Valuation>& out) const override {
    std::size_t pos = keys_;
    out.push_back({get_interval(state, pos)});
  }

  void step(const State& state, const Valuation& input,
            std::vector<State>& out) const override {
    std::size_t pos = 0;
    const Database m = get_cells(state, pos, keys_);
    get_interval(state, pos);
    std::vector<Interval> pipeline;
    for (std::size_t k = 0; k < delay_; ++k) pipeline.push_back(get_interval(state, pos));
    pipeline.push_back(input[store_]);
    const Interval due = pipeline.front();
    pipeline.erase(pipeline.begin());

    auto next = [&](bool stores_first) {
      Database cur = m;
      auto apply = [&] {
        for (const auto& e : decode(due, *entry_)) cur.store(e.key, e.datum);
      };
      if (stores_first) apply();
      Interval answer;
      for (auto k : input[key_]) {
        if (auto d = cur.at(k)) answer.push_back(*d);
      }
      if (!stores_first) apply();
      State s;
      put_cells(cur, s);
      put_interval(answer, s);
      for (const auto& v : pipeline) put_interval(v, s);
      return s;
    };
    out.push_back(next(true));
    if (any_order_) {
      auto other = next(false);
      if (other != out.back()) out.push_back(std::move(other));
    }
  }

  ChannelSet reads() const override { return reads_; }

 private:
  AlphabetPtr entry_;
  std::size_t keys_;
  std::size_t store_;
  std::size_t key_;
  std::size_t delay_;
  bool any_order_;
  ChannelSet reads_;
};

BehaviorPtr make_preprocess(const std::string& name, const BuiltinParams& p,
                            const ChannelMap& declared) {
  const std::string kind = "preprocess";
  only_params(p, {"in", "out"}, kind);
  const auto& in = param(p, "in", kind);
  const auto& out = param(p, "out", kind);
  auto a = entry_alphabet(declared, in, kind);
  auto b = entry_alphabet(declared, out, kind);
  if (!a->same_as(*b)) throw DefinitionError(kind + ": in and out alphabets differ");
  if (in == out) throw DefinitionError(kind + ": in and out must differ");
  return std::make_shared<PreprocessMachine>(name, p, ChannelMap{{in, a}},
                                             ChannelMap{{out, b}}, a);
}

BehaviorPtr make_codec(const std::string& name, const BuiltinParams& p,
                       const ChannelMap& declared, bool decoder) {
  const std::string kind = decoder ? "decoder" : "encoder";
  only_params(p, decoder ? ChannelSet{"in", "out", "fault"} : ChannelSet{"in", "out"},
              kind);
  const auto& in = param(p, "in", kind);
  const auto& out = param(p, "out", kind);
  auto a = entry_alphabet(declared, in, kind);
  auto b = entry_alphabet(declared, out, kind);
  if (!a->same_as(*b)) throw DefinitionError(kind + ": in and out alphabets differ");
  if (in == out) throw DefinitionError(kind + ": in and out must differ");
  const auto fault = param_or(p, "fault", "none");
  if (fault != "none" && fault != "offset") {
    throw DefinitionError(kind + ": fault must be none or offset");
  }
  return std::make_shared<CodecMachine>(name, kind, p, ChannelMap{{in, a}},
                                        ChannelMap{{out, b}}, a, decoder,
                                        fault == "offset");
}

BehaviorPtr make_database(const std::string& name, const BuiltinParams& p,
                          const ChannelMap& declared) {
  const std::string kind = "database";
  only_params(p, {"store", "key", "out", "delay", "ignore", "policy"}, kind);
  const auto& store = param(p, "store", kind);
  const auto& key = param(p, "key", kind);
  const auto& out = param(p, "out", kind);
  auto entry = entry_alphabet(declared, store, kind);
  auto key_alpha = channel_alphabet(declared, key, kind);
  auto data_alpha = channel_alphabet(declared, out, kind);
  if (!key_alpha->same_as(*entry->left()) || !data_alpha->same_as(*entry->right())) {
    throw DefinitionError(kind + ": key and out alphabets must match the entries");
  }
  ChannelMap inputs{{store, entry}, {key, key_alpha}};
  const auto ignore = param_or(p, "ignore", "");
  if (!ignore.empty()) inputs.emplace(ignore, channel_alphabet(declared, ignore, kind));
  if (inputs.size() != (ignore.empty() ? 2u : 3u) || inputs.count(out)) {
    throw DefinitionError(kind + ": channels must be distinct");
  }
  const auto policy = param_or(p, "policy", "stores-first");
  if (policy != "stores-first" && policy != "any") {
    throw DefinitionError(kind + ": policy must be stores-first or any");
  }
  const auto delay = number_param(p, "delay", 0, kind);
  if (delay > 8) throw DefinitionError(kind + ": delay must be at most 8");
  return std::make_shared<DatabaseMachine>(name, p, std::move(inputs),
                                           ChannelMap{{out, data_alpha}}, entry,
                                           store, key, delay, policy == "any");
}

/// Expected content of `out`: in's entries re-encoded and decoded, interval
/// by interval, shifted by `delay` ticks.
bool roundtrip_holds(const NamedStreamTuple& l, const std::string& in,
                     const std::string& out, std::size_t delay,
                     const Alphabet& entry) {
  const std::size_t n = entry.right()->size();
  const std::size_t keys = entry.left()->size();
  const auto& source = l.at(in);
  const auto& sink = l.at(out);
  Entries x;
  for (const auto& v : source.intervals()) {
    auto e = decode(v, entry);
    x.insert(x.end(), e.begin(), e.end());
  }
  const Database empty(keys);
  const Entries y = rho_star(empty, delta_star(empty, x, n), n);
  std::size_t pos = 0;
  for (std::size_t t = 0; t < sink.length(); ++t) {
    Interval expected;
    if (t >= delay && t - delay < source.length()) {
      const auto len = source.at(t - delay).size();
      expected = encode(Entries(y.begin() + static_cast<std::ptrdiff_t>(pos),
                                y.begin() + static_cast<std::ptrdiff_t>(pos + len)),
                        entry);
      pos += len;
    }
    if (sink.at(t) != expected) return false;
  }
  return true;
}

Invariant make_roundtrip(const std::string& name, const BuiltinParams& p,
                         const ChannelMap& declared) {
  const std::string kind = "codec_roundtrip";
  only_params(p, {"in", "out", "delay"}, kind);
  const auto in = param(p, "in", kind);
  const auto out = param(p, "out", kind);
  auto a = entry_alphabet(declared, in, kind);
  auto b = entry_alphabet(declared, out, kind);
  if (!a->same_as(*b) || in == out) {
    throw DefinitionError(kind + ": in and out must be distinct entry channels");
  }
  const auto delay = number_param(p, "delay", 0, kind);
  Invariant psi;
  psi.name = name;
  psi.domain = {in, out};
  psi.predicate = [in, out, delay, a](const NamedStreamTuple& l) {
    return roundtrip_holds(l, in, out, delay, *a);
  };
  psi.kind = kind;
  psi.params = p;
  return psi;
}

}  // namespace

void register_builtins(BuiltinRegistry& registry) {
  registry.add("preprocess", make_preprocess);
  registry.add("database", make_database);
  registry.add("encoder", [](const std::string& name, const BuiltinParams& p,
                             const ChannelMap& declared) {
    return make_codec(name, p, declared, false);
  });
  registry.add("decoder", [](const std::string& name, const BuiltinParams& p,
                             const ChannelMap& declared) {
    return make_codec(name, p, declared, true);
  });
}

void register_invariants(InvariantRegistry& registry) {
  registry.add("codec_roundtrip", make_roundtrip);
}

BuiltinRegistry builtin_registry() {
  BuiltinRegistry r;
  register_builtins(r);
  return r;
}

InvariantRegistry invariant_registry() {
  InvariantRegistry r;
  register_invariants(r);
  return r;
}

Machines build_machines(const Config& config) {
  const auto ch = channels(config);
  const auto r = builtin_registry();
  Machines m;
  m.pre = r.make("preprocess", "PRE", {{"in", "In"}, {"out", "I"}}, ch);
  m.rdb = r.make("database", "RDB",
                 {{"store", "I"}, {"key", "Key"}, {"out", "Data"}, {"delay", "2"}}, ch);
  m.enc = r.make("encoder", "ENC", {{"in", "I"}, {"out", "D"}}, ch);
  m.dec = r.make("decoder", "DEC", {{"in", "D"}, {"out", "R"}}, ch);
  m.rdb_r = r.make("database", "RDB_R",
                   {{"store", "R"}, {"key", "Key"}, {"out", "Data"}, {"ignore", "I"}},
                   ch);
  return m;
}

BehaviorPtr corrupted_decoder(const Config& config) {
  return builtin_registry().make("decoder", "DEC",
                                 {{"in", "D"}, {"out", "R"}, {"fault", "offset"}},
                                 channels(config));
}

BehaviorPtr interleaving_database(const Config& config) {
  return builtin_registry().make(
      "database", "RDB_ANY",
      {{"store", "I"}, {"key", "Key"}, {"out", "Data"}, {"delay", "2"}, {"policy", "any"}},
      channels(config));
}

Invariant psi_invariant(const Config& config) {
  return invariant_registry().make("codec_roundtrip", "roundtrip",
                                   {{"in", "I"}, {"out", "R"}, {"delay", "2"}},
                                   channels(config));
}

System initial_system(const Config& config) {
  const auto ch = channels(config);
  const auto m = build_machines(config);
  System s;
  s.inputs = {{"In", ch.at("In")}, {"Key", ch.at("Key")}};
  s.outputs = {{"Data", ch.at("Data")}};
  s.components.push_back(make_component("PRE", m.pre));
  s.components.push_back(make_component("RDB", m.rdb));
  return s;
}

std::vector<RefinementStep> eight_step_script() {
  using K = RefinementStep::Kind;
  auto step = [](K kind, StepPayload payload) {
    RefinementStep s;
    s.kind = kind;
    s.payload = std::move(payload);
    return s;
  };
  return {
      step(K::kAddComponent, ComponentPayload{"ENC"}),
      step(K::kAddComponent, ComponentPayload{"DEC"}),
      step(K::kAddOutputChannel, ChannelPayload{"ENC", "D"}),
      step(K::kAddOutputChannel, ChannelPayload{"DEC", "R"}),
      step(K::kAddInputChannel, ChannelPayload{"ENC", "I"}),
      step(K::kAddInputChannel, ChannelPayload{"DEC", "D"}),
      step(K::kRefineBehavior, BehaviorPayload{"ENC", "ENC"}),
      step(K::kRefineBehavior, BehaviorPayload{"DEC", "DEC"}),
      step(K::kAddInputChannel, ChannelPayload{"RDB", "R"}),
      step(K::kRefineBehaviorWithInvariant, InvariantPayload{"RDB", "RDB_R", "roundtrip"}),
      step(K::kRemoveInputChannel, ChannelPayload{"RDB", "I"}),
      step(K::kFold, FoldPayload{{"PRE", "ENC"}, "PRE'", std::nullopt, std::nullopt}),
      step(K::kFold, FoldPayload{{"DEC", "RDB"}, "RDB'", std::nullopt, std::nullopt}),
  };
}

std::vector<int> script_phases() { return {1, 1, 2, 2, 3, 3, 4, 4, 5, 6, 7, 8, 8}; }

RuleContext rule_context(const Config& config, CheckMode mode) {
  const auto m = build_machines(config);
  RuleContext ctx;
  ctx.machines = {{"PRE", m.pre}, {"RDB", m.rdb}, {"ENC", m.enc},
                  {"DEC", m.dec}, {"RDB_R", m.rdb_r}};
  auto psi = psi_invariant(config);
  ctx.invariants.emplace(psi.name, psi);
  ctx.channels = channels(config);
  ctx.default_mode = std::move(mode);
  return ctx;
}

std::vector<Shape> expected_shapes() {
  std::vector<Shape> out;
  Shape s{{"PRE", {{"In"}, {"I"}}}, {"RDB", {{"I", "Key"}, {"Data"}}}};
  s["ENC"] = {};
  out.push_back(s);
  s["DEC"] = {};
  out.push_back(s);
  s["ENC"] = {{}, {"D"}};
  out.push_back(s);
  s["DEC"] = {{}, {"R"}};
  out.push_back(s);
  s["ENC"] = {{"I"}, {"D"}};
  out.push_back(s);
  s["DEC"] = {{"D"}, {"R"}};
  out.push_back(s);
  out.push_back(s);
  out.push_back(s);
  s["RDB"] = {{"I", "Key", "R"}, {"Data"}};
  out.push_back(s);
  out.push_back(s);
  s["RDB"] = {{"Key", "R"}, {"Data"}};
  out.push_back(s);
  s.erase("PRE");
  s.erase("ENC");
  s["PRE'"] = {{"In"}, {"D"}};
  out.push_back(s);
  s.erase("DEC");
  s.erase("RDB");
  s["RDB'"] = {{"D", "Key"}, {"Data"}};
  out.push_back(s);
  return out;
}

Shape shape_of(const System& s) {
  Shape out;
  for (const auto& c : s.components) {
    out[c.name] = {names_of(c.inputs), names_of(c.outputs)};
  }
  return out;
}

}  // namespace archref::corpus
