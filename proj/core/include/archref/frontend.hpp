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

#ifndef ARCHREF_FRONTEND_HPP_
#define ARCHREF_FRONTEND_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "archref/errors.hpp"
#include "archref/invariant.hpp"
#include "archref/machine.hpp"
#include "archref/rules.hpp"
#include "archref/system.hpp"

namespace archref {

/// 1-based, end inclusive of the last character.
struct SourceSpan {
  std::string file;
  std::size_t line = 0;
  std::size_t column = 0;
  std::size_t end_line = 0;
  std::size_t end_column = 0;

  bool valid() const { return line != 0; }
  /// Whether `inner` lies within this span (same file).
  bool contains(const SourceSpan& inner) const;
};

std::string to_string(const SourceSpan& span);

struct Diagnostic {
  enum class Severity { kError, kWarning, kNote };

  Severity severity = Severity::kError;
  std::string message;
  SourceSpan span;
  std::optional<int> condition;  // consistency condition, 1..5
  std::string rule;              // rejected rule
};

/// "file:line:col: error: message [condition 2]".
std::string to_string(const Diagnostic& d);

class ParseError : public Error {
 public:
  explicit ParseError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct Registries {
  BuiltinRegistry machines;
  InvariantRegistry invariants;
};

/// Knows the corpus builtins and invariants.
Registries default_registries();

/**
 * A parsed architecture file: declarations plus at most one system. Spans
 * are keyed "kind:name" with kind one of alphabet, channel, machine,
 * invariant, component, system; nested components use "component:A/B".
 */
struct Document {
  std::vector<AlphabetPtr> alphabets;  // declaration order
  ChannelMap channels;
  std::map<std::string, BehaviorPtr> machines;
  std::map<std::string, Invariant> invariants;
  std::optional<System> system;
  std::map<std::string, SourceSpan> spans;
  std::string file;

  /// Throws DefinitionError when the document declares no system.
  const System& require_system() const;
  SourceSpan span_of(const std::string& key) const;
  /// Machines, invariants and channels by name, for scripts.
  RuleContext rule_context(const CheckMode& mode = CheckMode::bounded()) const;
};

/// Does not check consistency. Throws ParseError.
Document parse_architecture(std::string_view text, const std::string& file = "<input>",
                            const Registries& registries = default_registries());

/// One step per non-blank line. Throws ParseError.
std::vector<RefinementStep> parse_script(std::string_view text,
                                         const std::string& file = "<script>");

/// Declarations needed to write `s` down: every channel, alphabet and
/// named machine it mentions. Throws DefinitionError on name clashes.
Document document_of(const System& s);

/// Deterministic text form: declarations sorted by name within each kind.
std::string emit_canonical(const Document& doc);
std::string emit_canonical(const System& s);
std::string emit_script(const std::vector<RefinementStep>& steps);

/// Graphviz digraph: one node per component plus an "environment" node for
/// the system interface; one edge per writer/reader pair of a channel.
std::string emit_dot(const System& s, const std::string& graph_name = "architecture");

// JSON interchange.
std::string to_json(const Document& doc);
Document document_from_json(std::string_view text,
                            const Registries& registries = default_registries());
std::string script_to_json(const std::vector<RefinementStep>& steps);
std::vector<RefinementStep> script_from_json(std::string_view text);

/// {"ticks": N, "channels": {"In": [["k0.1"], [], ...]}}
std::string trace_to_json(const NamedStreamTuple& trace, const ChannelMap& alphabets);
NamedStreamTuple trace_from_json(std::string_view text, const ChannelMap& alphabets);
std::string traces_to_json(const std::set<NamedStreamTuple>& traces,
                           const ChannelMap& alphabets);

/// One diagnostic per violation, located at its first subject.
std::vector<Diagnostic> consistency_diagnostics(const Document& doc,
                                                const std::vector<Violation>& violations);

}  // namespace archref

#endif  // ARCHREF_FRONTEND_HPP_
