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

// Internal helpers shared by the execution and checking engines.

#ifndef ARCHREF_SRC_DETAIL_HPP_
#define ARCHREF_SRC_DETAIL_HPP_

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "archref/machine.hpp"
#include "archref/stream.hpp"

namespace archref::detail {

inline constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();

/// result[i] is the position of to[i] within `from`, or kAbsent.
std::vector<std::size_t> index_map(const std::vector<std::string>& from,
                                   const std::vector<std::string>& to);

/// Tick-by-tick valuations of `x` over `order`; every name must be in the
/// domain of `x`.
std::vector<Valuation> per_tick(const NamedStreamTuple& x,
                                const std::vector<std::string>& order,
                                std::size_t ticks);

NamedStreamTuple from_per_tick(const std::vector<Valuation>& history,
                               const std::vector<std::string>& order);

/// Whether `coarse` agrees with `fine` on every coarse position, where
/// coarse position i corresponds to fine position map[i].
inline bool agrees(const Valuation& fine, const std::vector<std::size_t>& map,
                   const Valuation& coarse) {
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (coarse[i] != fine[map[i]]) return false;
  }
  return true;
}

template <class T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<std::string> ordered(const ChannelSet& names);

bool same_channels(const ChannelMap& a, const ChannelMap& b);

/// Cartesian product of per-position option lists.
std::vector<Valuation> product(const std::vector<std::vector<Interval>>& options,
                               std::size_t cap);

}  // namespace archref::detail

#endif  // ARCHREF_SRC_DETAIL_HPP_
