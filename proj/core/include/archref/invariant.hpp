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

#ifndef ARCHREF_INVARIANT_HPP_
#define ARCHREF_INVARIANT_HPP_

#include <functional>
#include <map>
#include <string>

#include "archref/machine.hpp"
#include "archref/stream.hpp"

namespace archref {

/**
 * A prefix-closed predicate over the message flow of a system. The
 * predicate receives a tuple over exactly `domain`; it must hold on a
 * prefix whenever it holds on an extension of that prefix.
 */
struct Invariant {
  std::string name;
  ChannelSet domain;
  std::function<bool(const NamedStreamTuple&)> predicate;
  /// Set for the maximal invariant; lets checks skip evaluation.
  bool trivially_true = false;
  /// Declaration form, for serialization: kind(params).
  std::string kind;
  BuiltinParams params;

  bool operator()(const NamedStreamTuple& l) const {
    return trivially_true || predicate(l);
  }
};

/// The maximal invariant.
Invariant true_invariant(std::string name = "true");

/// Holds when `channel` has carried no message so far.
Invariant empty_invariant(std::string name, std::string channel);

using InvariantFactory = std::function<Invariant(
    const std::string& name, const BuiltinParams& params,
    const ChannelMap& declared_channels)>;

class InvariantRegistry {
 public:
  /// A registry that knows `true` and `empty(channel: C)`.
  InvariantRegistry();

  void add(std::string kind, InvariantFactory factory);
  bool has(const std::string& kind) const;
  /// Throws DefinitionError for unknown kinds or bad parameters.
  Invariant make(const std::string& kind, const std::string& name,
                 const BuiltinParams& params,
                 const ChannelMap& declared_channels) const;

 private:
  std::map<std::string, InvariantFactory> factories_;
};

}  // namespace archref

#endif  // ARCHREF_INVARIANT_HPP_
