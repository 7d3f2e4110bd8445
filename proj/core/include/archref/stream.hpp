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

#ifndef ARCHREF_STREAM_HPP_
#define ARCHREF_STREAM_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace archref {

/// Index of a message within the alphabet of the channel carrying it.
using Symbol = std::uint16_t;

/// The messages transmitted on one channel during one tick, in order.
using Interval = std::vector<Symbol>;

/**
 * A finite, declared message alphabet.
 *
 * Product alphabets (A * B) number their symbols row-major: the pair (a, b)
 * has index a * |B| + b and is spelled "<a>.<b>".
 */
class Alphabet {
 public:
  Alphabet(std::string name, std::vector<std::string> symbols);

  static std::shared_ptr<const Alphabet> product(
      std::string name, std::shared_ptr<const Alphabet> left,
      std::shared_ptr<const Alphabet> right);

  const std::string& name() const { return name_; }
  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& spell(Symbol s) const;
  std::optional<Symbol> find(std::string_view spelling) const;

  bool is_product() const { return left_ != nullptr; }
  const std::shared_ptr<const Alphabet>& left() const { return left_; }
  const std::shared_ptr<const Alphabet>& right() const { return right_; }
  Symbol pair(Symbol a, Symbol b) const;
  std::pair<Symbol, Symbol> unpair(Symbol s) const;

  /// Same name and the same symbol list.
  bool same_as(const Alphabet& other) const;

 private:
  std::string name_;
  std::vector<std::string> symbols_;
  std::shared_ptr<const Alphabet> left_;
  std::shared_ptr<const Alphabet> right_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

using ChannelSet = std::set<std::string>;

/// Channel name to alphabet. Ordered by name; machines align valuations with
/// this order.
using ChannelMap = std::map<std::string, AlphabetPtr>;

ChannelSet names_of(const ChannelMap& channels);

/// Every interval over `alphabet` with at most `max_len` messages, shortest
/// first, lexicographic within a length.
std::vector<Interval> enumerate_intervals(const Alphabet& alphabet,
                                          std::size_t max_len);

/// Number of intervals enumerate_intervals would return.
std::size_t interval_count(std::size_t alphabet_size, std::size_t max_len);

/// Finite prefix of a timed stream: one interval per tick, ticks from 0.
class TimedStreamPrefix {
 public:
  TimedStreamPrefix() = default;
  explicit TimedStreamPrefix(std::vector<Interval> intervals)
      : intervals_(std::move(intervals)) {}

  /// A prefix of `ticks` empty intervals.
  static TimedStreamPrefix silent(std::size_t ticks);

  std::size_t length() const { return intervals_.size(); }
  const Interval& at(std::size_t tick) const;
  const std::vector<Interval>& intervals() const { return intervals_; }

  void append(Interval interval) { intervals_.push_back(std::move(interval)); }

  auto operator<=>(const TimedStreamPrefix&) const = default;
  bool operator==(const TimedStreamPrefix&) const = default;

 private:
  std::vector<Interval> intervals_;
};

/// The first `ticks` intervals of `x`.
TimedStreamPrefix truncate(const TimedStreamPrefix& x, std::size_t ticks);

/// Concatenation of all intervals in tick order.
std::vector<Symbol> flatten(const TimedStreamPrefix& x);

/// Interval-sequence concatenation.
TimedStreamPrefix concat(const TimedStreamPrefix& x, const TimedStreamPrefix& y);

/**
 * Assignment of equal-length stream prefixes to a finite set of channels.
 *
 * A tuple with an empty domain still has a tick length.
 */
class NamedStreamTuple {
 public:
  NamedStreamTuple() = default;
  explicit NamedStreamTuple(std::size_t tick_len) : tick_len_(tick_len) {}
  /// Throws InterfaceError unless every entry has the same length.
  explicit NamedStreamTuple(std::map<std::string, TimedStreamPrefix> entries);
  NamedStreamTuple(std::map<std::string, TimedStreamPrefix> entries,
                   std::size_t tick_len);

  std::size_t tick_len() const { return tick_len_; }
  ChannelSet domain() const;
  bool contains(const std::string& channel) const;
  const TimedStreamPrefix& at(const std::string& channel) const;
  const std::map<std::string, TimedStreamPrefix>& entries() const {
    return entries_;
  }

  auto operator<=>(const NamedStreamTuple&) const = default;
  bool operator==(const NamedStreamTuple&) const = default;

 private:
  std::map<std::string, TimedStreamPrefix> entries_;
  std::size_t tick_len_ = 0;
};

NamedStreamTuple truncate(const NamedStreamTuple& x, std::size_t ticks);

/// Restriction to `channels`; throws UnknownChannelError for channels
/// outside the domain.
NamedStreamTuple restrict(const NamedStreamTuple& x, const ChannelSet& channels);

/// Disjoint union of two tuples of the same length.
NamedStreamTuple join(const NamedStreamTuple& x, const NamedStreamTuple& y);

/// A tuple over `channels` with every interval empty.
NamedStreamTuple silent_tuple(const ChannelSet& channels, std::size_t ticks);

std::string to_string(const Interval& interval, const Alphabet* alphabet);
std::string to_string(const TimedStreamPrefix& x, const Alphabet* alphabet);
/// Uses `alphabets` to spell symbols where known, raw indices otherwise.
std::string to_string(const NamedStreamTuple& x, const ChannelMap& alphabets = {});

std::ostream& operator<<(std::ostream& os, const TimedStreamPrefix& x);
std::ostream& operator<<(std::ostream& os, const NamedStreamTuple& x);

}  // namespace archref

#endif  // ARCHREF_STREAM_HPP_
