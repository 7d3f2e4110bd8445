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

#ifndef ARCHREF_RULES_HPP_
#define ARCHREF_RULES_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "archref/errors.hpp"
#include "archref/invariant.hpp"
#include "archref/oracle.hpp"
#include "archref/system.hpp"

namespace archref {

/**
 * How premises are discharged. Every mode first tries the syntactic
 * criterion; kBounded then falls back to bounded enumeration. Whatever is
 * left undecided is recorded as assumed. kAssumed skips all semantic checks.
 */
struct CheckMode {
  enum class Kind { kSyntactic, kBounded, kAssumed };

  Kind kind = Kind::kBounded;
  EnumerationBudget budget;

  static CheckMode syntactic();
  static CheckMode bounded(std::size_t depth = 5, std::size_t interval_bound = 1);
  static CheckMode sampled(std::size_t depth, std::size_t samples,
                           std::uint64_t seed, std::size_t interval_bound = 1);
  static CheckMode assumed();

  std::string describe() const;
};

std::string to_string(CheckMode::Kind kind);

struct Obligation {
  enum class Status { kDischarged, kAssumed, kFailed };

  std::size_t step = 0;
  std::string rule;
  std::string subject;  // component or channel the premise is about
  std::string premise;
  std::string discharge;  // "syntactic", "assumed" or the bounded budget
  Status status = Status::kDischarged;
  std::optional<Witness> counterexample;
  std::string detail;
};

std::string to_string(Obligation::Status status);

class ObligationLedger {
 public:
  void add(Obligation o) { entries_.push_back(std::move(o)); }
  void append(const ObligationLedger& other);
  const std::vector<Obligation>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  bool any_failed() const;
  bool any_assumed() const;
  bool all_discharged() const;

  /// One line per premise: step, rule, subject, premise, mode, verdict.
  std::string report() const;

 private:
  std::vector<Obligation> entries_;
};

/// A premise that does not hold. Carries the failed obligation.
class RuleRejection : public Error {
 public:
  RuleRejection(std::string rule, Obligation failed, ObligationLedger ledger);
  const std::string& rule() const { return rule_; }
  const Obligation& obligation() const { return failed_; }
  const ObligationLedger& ledger() const { return ledger_; }

 private:
  std::string rule_;
  Obligation failed_;
  ObligationLedger ledger_;
};

struct RuleResult {
  System system;
  ObligationLedger ledger;
};

// ---------------------------------------------------------------------------
// Rules. `step` only labels the obligations.

RuleResult refine_behavior(const System& s, const std::string& component,
                           BehaviorPtr replacement, const CheckMode& mode,
                           std::size_t step = 0);

RuleResult refine_behavior_with_invariant(const System& s,
                                          const std::string& component,
                                          BehaviorPtr replacement,
                                          const Invariant& psi,
                                          const CheckMode& mode,
                                          std::size_t step = 0);

RuleResult add_output_channel(const System& s, const std::string& component,
                              const std::string& channel, AlphabetPtr alphabet,
                              std::size_t step = 0);

RuleResult remove_output_channel(const System& s, const std::string& component,
                                 const std::string& channel, std::size_t step = 0);

RuleResult add_input_channel(const System& s, const std::string& component,
                             const std::string& channel, std::size_t step = 0);

RuleResult remove_input_channel(const System& s, const std::string& component,
                                const std::string& channel, const CheckMode& mode,
                                std::size_t step = 0);

RuleResult add_component(const System& s, const std::string& name,
                         std::size_t step = 0);

RuleResult remove_component(const System& s, const std::string& name,
                            std::size_t step = 0);

RuleResult expand(const System& s, const std::string& component,
                  std::size_t step = 0);

/// Interfaces default to the smallest legal ones.
RuleResult fold(const System& s, const std::vector<std::string>& components,
                const std::string& name,
                const std::optional<ChannelSet>& inputs = std::nullopt,
                const std::optional<ChannelSet>& outputs = std::nullopt,
                std::size_t step = 0);

RuleResult rename_channel(const System& s, const std::string& from,
                          const std::string& to, std::size_t step = 0);

// ---------------------------------------------------------------------------
// Scripts

struct ComponentPayload {
  std::string component;
};
struct ChannelPayload {
  std::string component;
  std::string channel;
};
struct BehaviorPayload {
  std::string component;
  std::string machine;
};
struct InvariantPayload {
  std::string component;
  std::string machine;
  std::string invariant;
};
struct FoldPayload {
  std::vector<std::string> components;
  std::string name;
  std::optional<ChannelSet> inputs;
  std::optional<ChannelSet> outputs;
};
struct RenamePayload {
  std::string from;
  std::string to;
};

using StepPayload = std::variant<ComponentPayload, ChannelPayload, BehaviorPayload,
                                 InvariantPayload, FoldPayload, RenamePayload>;

struct RefinementStep {
  enum class Kind {
    kRefineBehavior,
    kRefineBehaviorWithInvariant,
    kAddOutputChannel,
    kRemoveOutputChannel,
    kAddInputChannel,
    kRemoveInputChannel,
    kAddComponent,
    kRemoveComponent,
    kExpand,
    kFold,
    kRenameChannel,
  };

  Kind kind = Kind::kAddComponent;
  StepPayload payload;
  std::optional<CheckMode> mode;
  std::size_t line = 0;  // source line, 0 when built in code
};

/// Script spelling of a rule, e.g. "add-output-channel".
std::string rule_name(RefinementStep::Kind kind);
std::optional<RefinementStep::Kind> rule_kind(const std::string& name);

/// Throws DefinitionError when the payload alternative does not fit `kind`.
void validate_step(const RefinementStep& step);

/// Declarations a script refers to by name.
struct RuleContext {
  std::map<std::string, BehaviorPtr> machines;
  std::map<std::string, Invariant> invariants;
  ChannelMap channels;
  CheckMode default_mode = CheckMode::bounded();
};

RuleResult apply_step(const System& s, const RefinementStep& step,
                      const RuleContext& context, std::size_t index = 0);

struct ScriptResult {
  System system;
  ObligationLedger ledger;
  std::vector<System> trail;  // system after each step
};

class ScriptError : public Error {
 public:
  ScriptError(std::size_t step, std::string rule, const std::string& message,
              ObligationLedger ledger, System last);
  std::size_t step() const { return step_; }
  const std::string& rule() const { return rule_; }
  const ObligationLedger& ledger() const { return ledger_; }
  const System& last_system() const { return last_; }

 private:
  std::size_t step_;
  std::string rule_;
  ObligationLedger ledger_;
  System last_;
};

/// Applies the steps in order (1-based step indices in the ledger). Throws
/// ScriptError at the first rejected step.
ScriptResult apply_script(const System& s, const std::vector<RefinementStep>& steps,
                          const RuleContext& context);

}  // namespace archref

#endif  // ARCHREF_RULES_HPP_
