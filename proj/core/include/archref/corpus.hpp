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

#ifndef ARCHREF_CORPUS_HPP_
#define ARCHREF_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "archref/invariant.hpp"
#include "archref/machine.hpp"
#include "archref/rules.hpp"
#include "archref/system.hpp"

// The data-acquisition example: a preprocessor feeding a keyed database,
// later split by a difference encoder/decoder pair.
namespace archref::corpus {

struct Config {
  std::size_t keys = 2;  // |Key|
  std::size_t data = 4;  // n; Data = residues modulo n
};

/// A datum, or nullopt for the unused item stored in empty cells.
using Datum = std::optional<std::uint16_t>;

struct Entry {
  std::uint16_t key = 0;
  std::uint16_t datum = 0;
  auto operator<=>(const Entry&) const = default;
};

using Entries = std::vector<Entry>;

/// Total map Key -> Data, every cell empty initially.
class Database {
 public:
  explicit Database(std::size_t keys) : cells_(keys) {}
  explicit Database(std::vector<Datum> cells) : cells_(std::move(cells)) {}

  std::size_t keys() const { return cells_.size(); }
  Datum at(std::uint16_t key) const;
  void store(std::uint16_t key, std::uint16_t datum);
  Database updated(std::uint16_t key, std::uint16_t datum) const;
  const std::vector<Datum>& cells() const { return cells_; }

  bool operator==(const Database&) const = default;

 private:
  std::vector<Datum> cells_;
};

std::uint16_t delta(Datum old_datum, std::uint16_t new_datum, std::size_t n);
std::uint16_t rho(Datum old_datum, std::uint16_t difference, std::size_t n);
/// The preprocessing applied to a single datum.
std::uint16_t preprocess(std::uint16_t datum, std::size_t n);

Entries delta_star(const Database& m, const Entries& x, std::size_t n);
Entries rho_star(const Database& m, const Entries& x, std::size_t n);

struct Alphabets {
  AlphabetPtr key;
  AlphabetPtr data;
  AlphabetPtr entry;  // key x data, spelled "k0.3"
};

Alphabets make_alphabets(const Config& config = {});

/// Channels In, I, D, R (entries), Key and Data.
ChannelMap channels(const Config& config = {});

Entries decode(const Interval& interval, const Alphabet& entry);
Interval encode(const Entries& entries, const Alphabet& entry);

// ---------------------------------------------------------------------------
// Machines, registered as builtins:
//   preprocess(in, out)
//   database(store, key, out, delay = 0, ignore = "", policy = stores-first|any)
//   encoder(in, out)
//   decoder(in, out, fault = none|offset)

void register_builtins(BuiltinRegistry& registry);
/// codec_roundtrip(in, out, delay): out carries, delay ticks later, the
/// decoding of the encoding of in, interval by interval.
void register_invariants(InvariantRegistry& registry);

BuiltinRegistry builtin_registry();
InvariantRegistry invariant_registry();

struct Machines {
  BehaviorPtr pre;    // In -> I
  BehaviorPtr rdb;    // I, Key -> Data, stores applied two ticks late
  BehaviorPtr enc;    // I -> D
  BehaviorPtr dec;    // D -> R
  BehaviorPtr rdb_r;  // I, Key, R -> Data, stores read from R
};

Machines build_machines(const Config& config = {});

/// A decoder that adds one to every reconstructed datum it emits.
BehaviorPtr corrupted_decoder(const Config& config = {});
/// A database that may answer queries before or after the tick's stores.
BehaviorPtr interleaving_database(const Config& config = {});

Invariant psi_invariant(const Config& config = {});

/// PRE and RDB; inputs In, Key; output Data.
System initial_system(const Config& config = {});

/// The refactoring as thirteen rule applications.
std::vector<RefinementStep> eight_step_script();
/// Which of the eight refactoring steps each rule application belongs to.
std::vector<int> script_phases();

RuleContext rule_context(const Config& config = {},
                         CheckMode mode = CheckMode::bounded(6));

using Shape = std::map<std::string, std::pair<ChannelSet, ChannelSet>>;

/// Component interfaces expected after each rule application.
std::vector<Shape> expected_shapes();

Shape shape_of(const System& s);

}  // namespace archref::corpus

#endif  // ARCHREF_CORPUS_HPP_
