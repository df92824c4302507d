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

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcasm/ast.hpp"
#include "qcasm/circuit.hpp"
#include "qcasm/qmath.hpp"

namespace qcasm {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gate with its potential measurements resolved: families[i] is selected
/// by the first true guard i, the last family when none holds.
struct CompiledGate {
  GateId id = 0;
  std::string path;
  std::vector<int> wires;
  std::string key;  // outcome key: channel variable, or "@<id>" for anonymous measurements
  bool recorded = true;
  std::vector<Expr> guards;
  std::vector<MeasurementFamily> families;
};

struct CompileOptions {
  const GateLibrary* library = nullptr;  // standard gates only when null
  Store external;                        // values of the O variables
};

struct CompiledProgram {
  Program ground;
  Lowered lowered;
  OrderPairs prerequisites;
  std::vector<CompiledGate> gates;  // indexed by GateId
  QuantumState initial = QuantumState::basis(1, 0);
  Store external;
};

/// Elaborates, checks and lowers `p`, resolves every family and builds the
/// initial state. Throws ElaborationError, SimError (with the diagnostics in
/// the message) or std::invalid_argument.
CompiledProgram compile(const Program& p, const Bindings& bindings = {}, const CompileOptions& options = {});

/// Greedy layering of the program order.
Schedule greedy_schedule(const CompiledProgram& c);

using Outcomes = std::map<std::string, std::int64_t>;

struct TraceEntry {
  int step = 0;  // bout index, from 1
  GateId gate = 0;
  std::string family;  // mq
  std::vector<int> wires;  // wq
  std::int64_t label = 0;  // o(wq)
};

struct RunOptions {
  bool reverse_within_bout = false;
};

struct RunResult {
  Outcomes outcomes;
  Store classical;
  QuantumState final_state = QuantumState::basis(1, 0);
  std::vector<TraceEntry> trace;
  std::uint64_t seed = 0;
};

/// Doubles in [0, 1) from the top 53 bits of a 64-bit Mersenne twister.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

RunResult run(const CompiledProgram& c, const Schedule& s, std::uint64_t seed, const RunOptions& options = {});

struct Branch {
  Outcomes outcomes;
  double probability = 0.0;
  QuantumState final_state = QuantumState::basis(1, 0);
  Store classical;
  std::vector<TraceEntry> trace;
};

struct Enumeration {
  std::vector<Branch> branches;  // sorted by outcomes
  double pruned_mass = 0.0;
  double total_probability() const;
};

inline constexpr std::size_t kMaxBranches = std::size_t{1} << 20;

Enumeration enumerate(const CompiledProgram& c, const Schedule& s, double min_prob = tolerance::kImpossibleBranch,
                      const RunOptions& options = {}, std::size_t max_branches = kMaxBranches);

struct IndependenceReport {
  bool ok = true;
  std::vector<Schedule> schedules;
  std::vector<std::string> discrepancies;
};

/// Compares every schedule's enumeration with the first one.
IndependenceReport check_schedule_independence(const CompiledProgram& c, std::size_t cap = 6);

/// Differences between two enumerations; empty when they agree.
std::vector<std::string> compare_enumerations(const Enumeration& a, const Enumeration& b,
                                              double prob_tol = tolerance::kNormalization,
                                              double fidelity_tol = tolerance::kNormalization);

struct Distribution {
  std::map<Outcomes, std::size_t> counts;
  std::size_t shots = 0;
  double frequency(const Outcomes& o) const;
};

/// Shot k runs with seed + k.
Distribution sample_distribution(const CompiledProgram& c, const Schedule& s, std::uint64_t seed, std::size_t shots);

/// Applies the classical rules of `r` to `store` after the gates have fired.
void run_classical(const Rule& r, Store& store);

// JSON renderings with 17 significant digits.
std::string to_json(const RunResult& r);
std::string to_json(const Enumeration& e, bool with_states = true);
std::string to_json(const Distribution& d);
std::string to_json(const IndependenceReport& r);
std::string outcomes_text(const Outcomes& o);

}  // namespace qcasm
