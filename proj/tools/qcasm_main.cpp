// Copyright 2026 The qcasm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qcasm: check, lower, run and enumerate QC-ASM programs.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qcasm/circuit.hpp"
#include "qcasm/parser.hpp"
#include "qcasm/sim.hpp"

namespace {

using namespace qcasm;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string path;
  std::vector<std::string> params;
  std::string registry;
  std::string format = "json";
  std::string out;
  std::uint64_t seed = 0;
  std::size_t shots = 0;
  double min_prob = tolerance::kImpossibleBranch;
  std::string schedule = "greedy";
  std::size_t index = 0;
  std::size_t cap = 6;
  bool verify = false;
  bool elaborated = false;
  bool reverse = false;
  bool no_states = false;
};

std::string read_source(const std::string& path) {
  std::stringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  buf << in.rdbuf();
  return buf.str();
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw IoError("cannot write " + o.out);
  f << text;
}

Bindings parse_bindings(const std::vector<std::string>& params) {
  Bindings b;
  for (const auto& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--param", "expected NAME=INT, got " + p);
    const std::string value = p.substr(eq + 1);
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw CLI::ValidationError("--param", "not an integer: " + value);
    b[p.substr(0, eq)] = v;
  }
  return b;
}

Program load(const Options& o) {
  const std::string text = read_source(o.path);
  ParseResult r = parse(text);
  if (!r.ok()) {
    for (const auto& d : r.diagnostics) std::cerr << format(d, o.path) << "\n";
    throw std::runtime_error("parse failed");
  }
  return std::move(*r.program);
}

GateLibrary library(const Options& o) {
  GateLibrary lib;
  if (!o.registry.empty()) {
    try {
      lib.load_json(read_source(o.registry));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(o.registry + ": " + e.what());
    }
  }
  return lib;
}

Schedule pick_schedule(const Options& o, const CompiledProgram& c) {
  if (o.schedule == "greedy") return greedy_schedule(c);
  auto all = all_schedules(gate_ids(c.lowered.circuit), c.prerequisites, o.cap);
  if (o.index >= all.size()) {
    throw std::runtime_error("schedule index " + std::to_string(o.index) + " out of range (" +
                             std::to_string(all.size()) + " schedules)");
  }
  return all[o.index];
}

int cmd_check(const Options& o) {
  Program p = load(o);
  const GateLibrary lib = library(o);
  Program g = elaborate(p, parse_bindings(o.params));
  auto diags = well_formed(g.body);
  if (g.input) {
    auto more = check_input(*g.input, &lib);
    diags.insert(diags.end(), more.begin(), more.end());
  }
  for (const auto& d : diags) std::cerr << format(d, o.path) << "\n";
  if (!diags.empty()) return kFailure;
  // Resolving gates and states catches unknown names and arity mismatches.
  CompileOptions co;
  co.library = &lib;
  compile(p, parse_bindings(o.params), co);
  emit(o, "ok");
  return kOk;
}

CompiledProgram compiled(const Options& o, const GateLibrary& lib) {
  CompileOptions co;
  co.library = &lib;
  return compile(load(o), parse_bindings(o.params), co);
}

int cmd_lower(const Options& o) {
  const GateLibrary lib = library(o);
  const CompiledProgram c = compiled(o, lib);
  const Schedule s = greedy_schedule(c);
  if (o.format == "dot") {
    emit(o, to_dot(c.lowered));
  } else if (o.format == "text") {
    std::string t;
    for (const auto& g : c.lowered.circuit.gates) t += "g" + std::to_string(g.id) + "  " + pretty(Rule{g.rule}) + "\n";
    t += "tree: " + tree_text(c.lowered.tree) + "\n";
    t += "schedule: " + schedule_text(s) + "\n";
    emit(o, t);
  } else {
    emit(o, to_json(c.lowered, s));
  }
  return kOk;
}

int cmd_run(const Options& o) {
  const GateLibrary lib = library(o);
  const CompiledProgram c = compiled(o, lib);
  const Schedule s = pick_schedule(o, c);
  if (o.shots > 0) {
    emit(o, to_json(sample_distribution(c, s, o.seed, o.shots)));
    return kOk;
  }
  RunOptions ro;
  ro.reverse_within_bout = o.reverse;
  const RunResult r = run(c, s, o.seed, ro);
  if (o.format == "text") {
    std::string t = "outcomes " + outcomes_text(r.outcomes) + "\n";
    for (const auto& e : r.trace) {
      t += "step " + std::to_string(e.step) + ": " + e.family + " on (";
      for (std::size_t i = 0; i < e.wires.size(); ++i) t += (i ? "," : "") + std::to_string(e.wires[i]);
      t += ") -> " + std::to_string(e.label) + "\n";
    }
    emit(o, t);
  } else {
    emit(o, to_json(r));
  }
  return kOk;
}

int cmd_enumerate(const Options& o) {
  const GateLibrary lib = library(o);
  const CompiledProgram c = compiled(o, lib);
  RunOptions ro;
  ro.reverse_within_bout = o.reverse;
  const Enumeration e = enumerate(c, pick_schedule(o, c), o.min_prob, ro);
  if (o.format == "text") {
    std::string t;
    for (const auto& b : e.branches) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", b.probability);
      t += outcomes_text(b.outcomes) + "  " + buf + "\n";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", e.pruned_mass);
    t += "pruned mass " + std::string(buf) + "\n";
    emit(o, t);
  } else {
    emit(o, to_json(e, !o.no_states));
  }
  return kOk;
}

int cmd_schedules(const Options& o) {
  const GateLibrary lib = library(o);
  const CompiledProgram c = compiled(o, lib);
  if (o.verify) {
    const IndependenceReport r = check_schedule_independence(c, o.cap);
    emit(o, to_json(r));
    return r.ok ? kOk : kFailure;
  }
  const auto all = all_schedules(gate_ids(c.lowered.circuit), c.prerequisites, o.cap);
  std::string t;
  for (std::size_t i = 0; i < all.size(); ++i) t += std::to_string(i) + "  " + schedule_text(all[i]) + "\n";
  emit(o, t);
  return kOk;
}

int cmd_canon(const Options& o) {
  const GateLibrary lib = library(o);
  const CompiledProgram c = compiled(o, lib);
  emit(o, tree_text(canonicalize(c.lowered.tree)));
  return kOk;
}

int cmd_ast(const Options& o) {
  Program p = load(o);
  if (o.elaborated) p = elaborate(p, parse_bindings(o.params));
  emit(o, o.format == "text" ? pretty(p) : ast_json(p));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcasm: quantum circuit algorithm specifications"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("file", o.path, "program file, - for standard input")->required();
    sub->add_option("--param,-p", o.params, "parameter binding NAME=INT (repeatable)");
    sub->add_option("--registry", o.registry, "JSON file with user gates and states");
    sub->add_option("--out,-o", o.out, "write output to this file");
  };
  auto scheduling = [&](CLI::App* sub) {
    sub->add_option("--schedule", o.schedule, "greedy or index")->check(CLI::IsMember({"greedy", "index"}));
    sub->add_option("--index", o.index, "schedule number for --schedule index");
    sub->add_option("--cap", o.cap, "gate limit for schedule enumeration");
    sub->add_flag("--reverse", o.reverse, "fire gates within a bout in descending order");
  };

  auto* check = app.add_subcommand("check", "parse, elaborate and check well-formedness");
  common(check);

  auto* lower_cmd = app.add_subcommand("lower", "print the lowered circuit, order and tree");
  common(lower_cmd);
  lower_cmd->add_option("--format", o.format, "json, dot or text")->check(CLI::IsMember({"json", "dot", "text"}));

  auto* run_cmd = app.add_subcommand("run", "one seeded run, or a frequency table with --shots");
  common(run_cmd);
  scheduling(run_cmd);
  run_cmd->add_option("--seed", o.seed, "random seed");
  run_cmd->add_option("--shots", o.shots, "number of runs (seeds seed, seed+1, ...)");
  run_cmd->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));

  auto* enum_cmd = app.add_subcommand("enumerate", "all outcome branches with probabilities");
  common(enum_cmd);
  scheduling(enum_cmd);
  enum_cmd->add_option("--min-prob", o.min_prob, "prune outcomes below this conditional probability");
  enum_cmd->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  enum_cmd->add_flag("--no-states", o.no_states, "omit final state vectors");

  auto* sched_cmd = app.add_subcommand("schedules", "list legal schedules");
  common(sched_cmd);
  sched_cmd->add_option("--cap", o.cap, "gate limit");
  sched_cmd->add_flag("--verify", o.verify, "check that every schedule gives the same branches");

  auto* canon_cmd = app.add_subcommand("canon", "canonical decomposition tree");
  common(canon_cmd);

  auto* ast_cmd = app.add_subcommand("ast", "syntax tree as JSON, or pretty-printed with --format text");
  common(ast_cmd);
  ast_cmd->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  ast_cmd->add_flag("--elaborate", o.elaborated, "elaborate before printing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return cmd_check(o);
    if (*lower_cmd) return cmd_lower(o);
    if (*run_cmd) return cmd_run(o);
    if (*enum_cmd) return cmd_enumerate(o);
    if (*sched_cmd) return cmd_schedules(o);
    if (*canon_cmd) return cmd_canon(o);
    if (*ast_cmd) return cmd_ast(o);
  } catch (const IoError& e) {
    std::cerr << "qcasm: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "qcasm: " << e.what() << "\n";
    return kUsage;
  } catch (const ElaborationError& e) {
    std::cerr << o.path << ":" << e.loc().line << ":" << e.loc().column << ": error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    if (std::string(e.what()) != "parse failed") std::cerr << "qcasm: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
