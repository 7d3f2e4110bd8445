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

// archref: check, simulate, refine and compare software architectures.
//
// Exit codes: 0 success, 1 violation / failed obligation / refinement
// fails, 2 obligations assumed, 3 inconclusive, 4 bad input.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "archref/frontend.hpp"
#include "archref/oracle.hpp"
#include "archref/rules.hpp"

namespace {

using namespace archref;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kAssumed = 2;
constexpr int kInconclusive = 3;
constexpr int kBadInput = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Document load_document(const std::string& path) {
  auto text = read_file(path);
  if (ends_with(path, ".json")) return document_from_json(text);
  return parse_architecture(text, path);
}

std::vector<RefinementStep> load_script(const std::string& path) {
  auto text = read_file(path);
  if (ends_with(path, ".json")) return script_from_json(text);
  return parse_script(text, path);
}

std::string render(const Document& doc, const std::string& path) {
  return ends_with(path, ".json") ? to_json(doc) : emit_canonical(doc);
}

struct BudgetFlags {
  std::size_t depth = 5;
  std::size_t bound = 1;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  std::size_t ceiling = 0;
  bool sampled = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--depth", depth, "Ticks T")->capture_default_str();
    cmd->add_option("--bound", bound, "Messages per interval L")->capture_default_str();
    cmd->add_option("--samples", samples, "Samples in sampled mode")->capture_default_str();
    cmd->add_option("--seed", seed, "Seed for sampled mode")->capture_default_str();
    cmd->add_option("--ceiling", ceiling, "Node ceiling (default: $ARCHREF_BUDGET_CEILING)");
  }

  EnumerationBudget budget() const {
    auto b = sampled ? EnumerationBudget::sampled(depth, samples, seed, bound)
                     : EnumerationBudget::exhaustive(depth, bound);
    if (ceiling) b.ceiling = ceiling;
    return b;
  }
};

int cmd_check(const std::string& path) {
  auto doc = load_document(path);
  auto violations = check_consistency(doc.require_system());
  for (const auto& d : consistency_diagnostics(doc, violations)) {
    std::cout << to_string(d) << '\n';
  }
  if (violations.empty()) std::cout << path << ": consistent\n";
  return violations.empty() ? kOk : kFailed;
}

int cmd_simulate(const std::string& path, const std::string& input_path, std::size_t ticks,
                 std::size_t bound) {
  auto doc = load_document(path);
  const auto& s = doc.require_system();
  NamedStreamTuple input = silent_tuple(names_of(s.inputs), ticks);
  if (!input_path.empty()) {
    auto given = trace_from_json(read_file(input_path), s.inputs);
    std::map<std::string, TimedStreamPrefix> entries;
    for (const auto& [n, _] : s.inputs) {
      entries[n] = given.contains(n) && given.tick_len() > 0
                       ? truncate(given.at(n), std::min(ticks, given.tick_len()))
                       : TimedStreamPrefix();
      while (entries[n].length() < ticks) entries[n].append({});
    }
    for (const auto& n : given.domain()) {
      if (!s.inputs.count(n)) throw InterfaceError(n + " is not a system input");
    }
    input = NamedStreamTuple(std::move(entries), ticks);
  }
  ComposeOptions options;
  options.chaos_bound = bound;
  auto traces = run(*blackbox(s, options), input, ticks);
  std::cout << traces_to_json(traces, s.outputs);
  return kOk;
}

int cmd_refine(const std::string& arch, const std::string& script_path,
               const std::string& mode_name, const BudgetFlags& flags,
               const std::string& out_path, const std::string& ledger_path) {
  auto doc = load_document(arch);
  auto steps = load_script(script_path);
  CheckMode mode;
  if (mode_name == "syntactic") {
    mode = CheckMode::syntactic();
  } else if (mode_name == "assumed") {
    mode = CheckMode::assumed();
  } else {
    mode = CheckMode::bounded(flags.depth, flags.bound);
    if (mode_name == "sampled") {
      mode = CheckMode::sampled(flags.depth, flags.samples, flags.seed, flags.bound);
    }
    if (flags.ceiling) mode.budget.ceiling = flags.ceiling;
  }
  const auto& initial = doc.require_system();
  auto violations = check_consistency(initial);
  if (!violations.empty()) {
    for (const auto& d : consistency_diagnostics(doc, violations)) {
      std::cerr << to_string(d) << '\n';
    }
    return kFailed;
  }
  try {
    auto result = apply_script(initial, steps, doc.rule_context(mode));
    std::cout << result.ledger.report();
    if (!ledger_path.empty()) write_file(ledger_path, result.ledger.report());
    if (!out_path.empty()) {
      Document out = document_of(result.system);
      out.invariants = doc.invariants;
      for (const auto& [n, m] : doc.machines) out.machines.emplace(n, m);
      for (const auto& a : doc.alphabets) {
        bool known = false;
        for (const auto& b : out.alphabets) known = known || b->name() == a->name();
        if (!known) out.alphabets.push_back(a);
      }
      for (const auto& [n, a] : doc.channels) out.channels.emplace(n, a);
      write_file(out_path, render(out, out_path));
    }
    const auto& entries = result.ledger.entries();
    std::size_t assumed = 0;
    for (const auto& o : entries) assumed += o.status == Obligation::Status::kAssumed;
    std::cout << steps.size() << " steps, " << entries.size() << " obligations, " << assumed
              << " assumed\n";
    return result.ledger.all_discharged() ? kOk : kAssumed;
  } catch (const ScriptError& e) {
    std::cout << e.ledger().report();
    Diagnostic d;
    d.message = e.what();
    d.rule = e.rule();
    const auto& step = steps.at(e.step() - 1);
    d.span = {script_path, step.line, 1, step.line, 1};
    std::cerr << to_string(d) << '\n';
    for (const auto& o : e.ledger().entries()) {
      if (o.status == Obligation::Status::kFailed && o.counterexample) {
        std::cerr << "  input:  " << to_string(o.counterexample->input, doc.channels) << '\n';
        std::cerr << "  output: " << to_string(o.counterexample->output, doc.channels) << '\n';
      }
    }
    return kFailed;
  }
}

void write_witness(const Witness& w, const ChannelMap& channels, const std::string& path) {
  nlohmann::json j{{"ticks", w.ticks},
                   {"note", w.note},
                   {"input", nlohmann::json::parse(trace_to_json(w.input, channels))},
                   {"output", nlohmann::json::parse(trace_to_json(w.output, channels))}};
  write_file(path, j.dump(2) + "\n");
}

int cmd_verify(const std::string& old_path, const std::string& new_path,
               const BudgetFlags& flags, const std::string& witness_path) {
  auto old_doc = load_document(old_path);
  auto new_doc = load_document(new_path);
  auto v = check_trace_inclusion(old_doc.require_system(), new_doc.require_system(),
                                 flags.budget());
  std::cout << to_string(v.status) << ": " << v.coverage << '\n';
  if (v.fails() && v.witness) {
    ChannelMap channels = old_doc.channels;
    for (const auto& [n, a] : new_doc.channels) channels.emplace(n, a);
    std::cout << "input:  " << to_string(v.witness->input, channels) << '\n';
    std::cout << "output: " << to_string(v.witness->output, channels) << '\n';
    if (!witness_path.empty()) {
      write_witness(*v.witness, channels, witness_path);
      std::cout << "witness written to " << witness_path << '\n';
    }
  }
  switch (v.status) {
    case Verdict::Status::kHolds:
      return kOk;
    case Verdict::Status::kFails:
      return kFailed;
    case Verdict::Status::kInconclusive:
      return kInconclusive;
  }
  return kFailed;
}

int cmd_convert(const std::string& in, const std::string& out) {
  if (ends_with(in, ".script") || (ends_with(out, ".script"))) {
    auto steps = load_script(in);
    write_file(out, ends_with(out, ".json") ? script_to_json(steps) : emit_script(steps));
    return kOk;
  }
  write_file(out, render(load_document(in), out));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"archref: architecture refinement checker"};
  app.require_subcommand(1);

  std::string arch, other, script, input, out, ledger, witness;
  std::string mode = "bounded";
  std::size_t ticks = 5, bound = 1;
  BudgetFlags flags;

  auto* check = app.add_subcommand("check", "Check the consistency conditions");
  check->add_option("arch", arch, "Architecture (.arch or .json)")->required();

  auto* simulate = app.add_subcommand("simulate", "Print every output trace for an input");
  simulate->add_option("arch", arch)->required();
  simulate->add_option("--input", input, "Input trace (.json); silent when omitted");
  simulate->add_option("--ticks", ticks)->capture_default_str();
  simulate->add_option("--bound", bound, "Messages per chaotic interval")->capture_default_str();

  auto* refine = app.add_subcommand("refine", "Apply a refinement script");
  refine->add_option("arch", arch)->required();
  refine->add_option("script", script)->required();
  refine->add_option("--mode", mode)
      ->check(CLI::IsMember({"syntactic", "bounded", "sampled", "assumed"}))
      ->capture_default_str();
  flags.attach(refine);
  refine->add_option("--out", out, "Write the refined architecture");
  refine->add_option("--ledger", ledger, "Write the obligation ledger");

  auto* verify = app.add_subcommand("verify-refinement", "Bounded check that new refines old");
  verify->add_option("old", arch)->required();
  verify->add_option("new", other)->required();
  flags.attach(verify);
  verify->add_flag("--sampled", flags.sampled, "Random inputs instead of all inputs");
  verify->add_option("--witness", witness, "Where to write a counterexample")
      ->capture_default_str();

  auto* dot = app.add_subcommand("export-dot", "Write the structure as Graphviz");
  dot->add_option("arch", arch)->required();
  dot->add_option("--out", out, "Output file (default: stdout)");

  auto* convert = app.add_subcommand("convert", "Convert between text and JSON forms");
  convert->add_option("in", arch)->required();
  convert->add_option("out", other)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kBadInput;
  }

  try {
    if (*check) return cmd_check(arch);
    if (*simulate) return cmd_simulate(arch, input, ticks, bound);
    if (*refine) return cmd_refine(arch, script, mode, flags, out, ledger);
    if (*verify) return cmd_verify(arch, other, flags, witness);
    if (*dot) {
      write_file(out.empty() ? "-" : out, emit_dot(load_document(arch).require_system()));
      return kOk;
    }
    if (*convert) return cmd_convert(arch, other);
  } catch (const ParseError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << to_string(d) << '\n';
    return kBadInput;
  } catch (const ConsistencyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInconclusive;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  }
  return kBadInput;
}
