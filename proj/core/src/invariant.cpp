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

#include "archref/invariant.hpp"

#include "archref/errors.hpp"

namespace archref {

Invariant true_invariant(std::string name) {
  Invariant psi;
  psi.name = std::move(name);
  psi.predicate = [](const NamedStreamTuple&) { return true; };
  psi.trivially_true = true;
  psi.kind = "true";
  return psi;
}

Invariant empty_invariant(std::string name, std::string channel) {
  Invariant psi;
  psi.name = std::move(name);
  psi.domain = {channel};
  psi.predicate = [channel](const NamedStreamTuple& l) {
    for (const auto& interval : l.at(channel).intervals()) {
      if (!interval.empty()) return false;
    }
    return true;
  };
  psi.kind = "empty";
  psi.params = {{"channel", channel}};
  return psi;
}

InvariantRegistry::InvariantRegistry() {
  add("true", [](const std::string& name, const BuiltinParams& params,
                 const ChannelMap&) {
    if (!params.empty()) throw DefinitionError("invariant true takes no parameters");
    return true_invariant(name);
  });
  add("empty", [](const std::string& name, const BuiltinParams& params,
                  const ChannelMap& channels) {
    auto it = params.find("channel");
    if (it == params.end() || params.size() != 1) {
      throw DefinitionError("invariant empty takes exactly one parameter: channel");
    }
    if (!channels.count(it->second)) {
      throw DefinitionError("invariant " + name + ": unknown channel " + it->second);
    }
    return empty_invariant(name, it->second);
  });
}

void InvariantRegistry::add(std::string kind, InvariantFactory factory) {
  factories_[std::move(kind)] = std::move(factory);
}

bool InvariantRegistry::has(const std::string& kind) const {
  return factories_.count(kind) != 0;
}

Invariant InvariantRegistry::make(const std::string& kind,
                                  const std::string& name,
                                  const BuiltinParams& params,
                                  const ChannelMap& declared_channels) const {
  auto it = factories_.find(kind);
  if (it == factories_.end()) {
    throw DefinitionError("unknown invariant kind " + kind);
  }
  return it->second(name, params, declared_channels);
}

}  // namespace archref
