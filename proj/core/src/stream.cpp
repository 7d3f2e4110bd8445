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

#include "archref/stream.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "archref/errors.hpp"

namespace archref {

Alphabet::Alphabet(std::string name, std::vector<std::string> symbols)
    : name_(std::move(name)), symbols_(std::move(symbols)) {
  if (symbols_.size() > std::numeric_limits<Symbol>::max()) {
    throw DefinitionError("alphabet " + name_ + " is too large");
  }
  std::set<std::string> seen;
  for (const auto& s : symbols_) {
    if (s.empty()) throw DefinitionError("empty symbol in alphabet " + name_);
    if (!seen.insert(s).second) {
      throw DefinitionError("duplicate symbol " + s + " in alphabet " + name_);
    }
  }
}

std::shared_ptr<const Alphabet> Alphabet::product(
    std::string name, std::shared_ptr<const Alphabet> left,
    std::shared_ptr<const Alphabet> right) {
  std::vector<std::string> symbols;
  symbols.reserve(left->size() * right->size());
  for (const auto& a : left->symbols()) {
    for (const auto& b : right->symbols()) symbols.push_back(a + "." + b);
  }
  auto result = std::make_shared<Alphabet>(std::move(name), std::move(symbols));
  result->left_ = std::move(left);
  result->right_ = std::move(right);
  return result;
}

const std::string& Alphabet::spell(Symbol s) const {
  if (s >= symbols_.size()) {
    throw OutOfRangeError("symbol index out of range for alphabet " + name_);
  }
  return symbols_[s];
}

std::optional<Symbol> Alphabet::find(std::string_view spelling) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), spelling);
  if (it == symbols_.end()) return std::nullopt;
  return static_cast<Symbol>(it - symbols_.begin());
}

Symbol Alphabet::pair(Symbol a, Symbol b) const {
  return static_cast<Symbol>(a * right_->size() + b);
}

std::pair<Symbol, Symbol> Alphabet::unpair(Symbol s) const {
  auto width = right_->size();
  return {static_cast<Symbol>(s / width), static_cast<Symbol>(s % width)};
}

bool Alphabet::same_as(const Alphabet& other) const {
  return name_ == other.name_ && symbols_ == other.symbols_;
}

ChannelSet names_of(const ChannelMap& channels) {
  ChannelSet out;
  for (const auto& [name, _] : channels) out.insert(name);
  return out;
}

std::size_t interval_count(std::size_t alphabet_size, std::size_t max_len) {
  std::size_t total = 0;
  std::size_t power = 1;
  for (std::size_t len = 0; len <= max_len; ++len) {
    total += power;
    power *= alphabet_size;
  }
  return total;
}

std::vector<Interval> enumerate_intervals(const Alphabet& alphabet,
                                          std::size_t max_len) {
  std::vector<Interval> out;
  out.emplace_back();
  std::vector<Interval> layer{Interval{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Interval> next;
    for (const auto& prefix : layer) {
      for (std::size_t s = 0; s < alphabet.size(); ++s) {
        Interval grown = prefix;
        grown.push_back(static_cast<Symbol>(s));
        next.push_back(std::move(grown));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

TimedStreamPrefix TimedStreamPrefix::silent(std::size_t ticks) {
  return TimedStreamPrefix(std::vector<Interval>(ticks));
}

const Interval& TimedStreamPrefix::at(std::size_t tick) const {
  if (tick >= intervals_.size()) {
    throw OutOfRangeError("tick " + std::to_string(tick) +
                          " beyond prefix of length " +
                          std::to_string(intervals_.size()));
  }
  return intervals_[tick];
}

TimedStreamPrefix truncate(const TimedStreamPrefix& x, std::size_t ticks) {
  if (ticks > x.length()) {
    throw OutOfRangeError("cannot truncate a prefix of length " +
                          std::to_string(x.length()) + " to " +
                          std::to_string(ticks));
  }
  return TimedStreamPrefix(std::vector<Interval>(
      x.intervals().begin(), x.intervals().begin() + static_cast<long>(ticks)));
}

std::vector<Symbol> flatten(const TimedStreamPrefix& x) {
  std::vector<Symbol> out;
  for (const auto& interval : x.intervals()) {
    out.insert(out.end(), interval.begin(), interval.end());
  }
  return out;
}

TimedStreamPrefix concat(const TimedStreamPrefix& x,
                         const TimedStreamPrefix& y) {
  auto intervals = x.intervals();
  intervals.insert(intervals.end(), y.intervals().begin(), y.intervals().end());
  return TimedStreamPrefix(std::move(intervals));
}

NamedStreamTuple::NamedStreamTuple(
    std::map<std::string, TimedStreamPrefix> entries)
    : entries_(std::move(entries)) {
  if (!entries_.empty()) tick_len_ = entries_.begin()->second.length();
  for (const auto& [name, prefix] : entries_) {
    if (prefix.length() != tick_len_) {
      throw InterfaceError("channel " + name + " has " +
                           std::to_string(prefix.length()) +
                           " intervals, expected " + std::to_string(tick_len_));
    }
  }
}

NamedStreamTuple::NamedStreamTuple(
    std::map<std::string, TimedStreamPrefix> entries, std::size_t tick_len)
    : entries_(std::move(entries)), tick_len_(tick_len) {
  for (const auto& [name, prefix] : entries_) {
    if (prefix.length() != tick_len_) {
      throw InterfaceError("channel " + name + " has " +
                           std::to_string(prefix.length()) +
                           " intervals, expected " + std::to_string(tick_len_));
    }
  }
}

ChannelSet NamedStreamTuple::domain() const {
  ChannelSet out;
  for (const auto& [name, _] : entries_) out.insert(name);
  return out;
}

bool NamedStreamTuple::contains(const std::string& channel) const {
  return entries_.count(channel) != 0;
}

const TimedStreamPrefix& NamedStreamTuple::at(const std::string& channel) const {
  auto it = entries_.find(channel);
  if (it == entries_.end()) {
    throw UnknownChannelError("channel " + channel + " not in tuple domain");
  }
  return it->second;
}

NamedStreamTuple truncate(const NamedStreamTuple& x, std::size_t ticks) {
  if (ticks > x.tick_len()) {
    throw OutOfRangeError("cannot truncate a tuple of length " +
                          std::to_string(x.tick_len()) + " to " +
                          std::to_string(ticks));
  }
  std::map<std::string, TimedStreamPrefix> entries;
  for (const auto& [name, prefix] : x.entries()) {
    entries.emplace(name, truncate(prefix, ticks));
  }
  return NamedStreamTuple(std::move(entries), ticks);
}

NamedStreamTuple restrict(const NamedStreamTuple& x, const ChannelSet& channels) {
  std::map<std::string, TimedStreamPrefix> entries;
  for (const auto& name : channels) entries.emplace(name, x.at(name));
  return NamedStreamTuple(std::move(entries), x.tick_len());
}

NamedStreamTuple join(const NamedStreamTuple& x, const NamedStreamTuple& y) {
  if (x.tick_len() != y.tick_len()) {
    throw JoinError("cannot join tuples of lengths " +
                    std::to_string(x.tick_len()) + " and " +
                    std::to_string(y.tick_len()));
  }
  auto entries = x.entries();
  for (const auto& [name, prefix] : y.entries()) {
    if (!entries.emplace(name, prefix).second) {
      throw JoinError("channel " + name + " present in both tuples");
    }
  }
  return NamedStreamTuple(std::move(entries), x.tick_len());
}

NamedStreamTuple silent_tuple(const ChannelSet& channels, std::size_t ticks) {
  std::map<std::string, TimedStreamPrefix> entries;
  for (const auto& name : channels) {
    entries.emplace(name, TimedStreamPrefix::silent(ticks));
  }
  return NamedStreamTuple(std::move(entries), ticks);
}

std::string to_string(const Interval& interval, const Alphabet* alphabet) {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < interval.size(); ++k) {
    if (k) os << ", ";
    if (alphabet && interval[k] < alphabet->size()) {
      os << alphabet->spell(interval[k]);
    } else {
      os << '#' << interval[k];
    }
  }
  os << ']';
  return os.str();
}

std::string to_string(const TimedStreamPrefix& x, const Alphabet* alphabet) {
  std::ostringstream os;
  os << '<';
  for (std::size_t t = 0; t < x.length(); ++t) {
    if (t) os << ' ';
    os << to_string(x.intervals()[t], alphabet);
  }
  os << '>';
  return os.str();
}

std::string to_string(const NamedStreamTuple& x, const ChannelMap& alphabets) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [name, prefix] : x.entries()) {
    if (!first) os << ", ";
    first = false;
    auto it = alphabets.find(name);
    os << name << ": "
       << to_string(prefix, it == alphabets.end() ? nullptr : it->second.get());
  }
  os << "}/" << x.tick_len();
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const TimedStreamPrefix& x) {
  return os << to_string(x, nullptr);
}

std::ostream& operator<<(std::ostream& os, const NamedStreamTuple& x) {
  return os << to_string(x);
}

}  // namespace archref
