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

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "test_support.hpp"

namespace {

using namespace qcasm;
using namespace qcasm::testing;

// Small parameters keep every corpus program under a few qubits.
Bindings small_params(const std::string& name) {
  if (name == "qft" || name == "phase_est") return {{"n", 2}, {"j", 1}};
  if (name == "grover") return {{"n", 2}};
  if (name == "cnot_mb" || name == "cnot_mb_liberal") return {{"c", 1}, {"t", 0}};
  return {};
}

CompiledProgram compile_corpus(const std::string& name) {
  static const GateLibrary lib = corpus_library();
  CompileOptions o;
  o.library = &lib;
  return compile(corpus_program(name), small_params(name), o);
}

TEST(Run, DeterministicForSeed) {
  const auto c = compile_corpus("teleport");
  const Schedule s = greedy_schedule(c);
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    const RunResult a = run(c, s, seed);
    const RunResult b = run(c, s, seed);
    EXPECT_EQ(a.outcomes, b.outcomes);
    EXPECT_EQ(to_json(a), to_json(b));
    EXPECT_EQ(a.seed, seed);
  }
}

TEST(Run, OutcomesAreEnumeratedBranches) {
  for (const auto& name : kCorpus) {
    const auto c = compile_corpus(name);
    const Schedule s = greedy_schedule(c);
    const Enumeration e = enumerate(c, s);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const RunResult r = run(c, s, seed);
      auto it = std::find_if(e.branches.begin(), e.branches.end(),
                             [&](const Branch& b) { return b.outcomes == r.outcomes; });
      ASSERT_NE(it, e.branches.end()) << name << " seed " << seed << " " << outcomes_text(r.outcomes);
      EXPECT_GT(it->probability, 0.0);
      EXPECT_NEAR(fidelity_up_to_phase(it->final_state, r.final_state), 1.0, 1e-9) << name;
      EXPECT_EQ(it->classical, r.classical);
    }
  }
}

TEST(Enumerate, ProbabilityIsConserved) {
  for (const auto& name : kCorpus) {
    const auto c = compile_corpus(name);
    const Enumeration e = enumerate(c, greedy_schedule(c));
    EXPECT_NEAR(e.total_probability() + e.pruned_mass, 1.0, 1e-9) << name;
    EXPECT_TRUE(std::is_sorted(e.branches.begin(), e.branches.end(),
                               [](const Branch& a, const Branch& b) { return a.outcomes < b.outcomes; }));
    for (const auto& b : e.branches) EXPECT_NEAR(b.final_state.amplitudes().norm(), 1.0, 1e-9);
  }
}

TEST(Enumerate, ReversedBoutsAgree) {
  for (const auto& name : kCorpus) {
    const auto c = compile_corpus(name);
    const Schedule s = greedy_schedule(c);
    RunOptions rev;
    rev.reverse_within_bout = true;
    const auto diffs = compare_enumerations(enumerate(c, s), enumerate(c, s, tolerance::kImpossibleBranch, rev));
    EXPECT_TRUE(diffs.empty()) << name << ": " << (diffs.empty() ? "" : diffs.front());
  }
}

TEST(Enumerate, ScheduleIndependence) {
  const auto c = compile_text("H(1) || X(2)");
  const IndependenceReport r = check_schedule_independence(c);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.schedules.size(), 3u);
  const auto t = compile_corpus("teleport");
  EXPECT_TRUE(check_schedule_independence(t).ok);
}

TEST(Enumerate, MeasurementBasedCnotOnSuperpositions) {
  // Inputs on wires 1 and 3 with the ancilla (wire 2) at |0>; every branch
  // must leave CNOT|psi> on (1, 3) and |r> on the ancilla.
  const OperatorXcd cnot = std_gate("CNOT").outcomes().front().op;
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = compile_corpus("cnot_mb");
    const QuantumState psi = random_state(2, rng);
    KetXcd init = KetXcd::Zero(8);
    for (int b = 0; b < 4; ++b) init[((b >> 1) << 2) | (b & 1)] = psi[b];
    c.initial = QuantumState(3, init);
    const KetXcd out = cnot * psi.amplitudes();
    const Enumeration e = enumerate(c, greedy_schedule(c));
    EXPECT_NEAR(e.total_probability(), 1.0, 1e-9);
    for (const auto& br : e.branches) {
      const std::int64_t r = br.outcomes.at("r");
      KetXcd want = KetXcd::Zero(8);
      for (int b = 0; b < 4; ++b) want[((b >> 1) << 2) | (r << 1) | (b & 1)] = out[b];
      EXPECT_NEAR(fidelity_up_to_phase(br.final_state, QuantumState(3, want)), 1.0, 1e-9)
          << outcomes_text(br.outcomes);
    }
  }
}

TEST(Enumerate, DeterministicMeasurement) {
  const auto c = compile_text("ket 1 on 1; p := SM(1)");
  const Enumeration e = enumerate(c, greedy_schedule(c));
  ASSERT_EQ(e.branches.size(), 1u);
  EXPECT_EQ(e.branches[0].outcomes.at("p"), 1);
  EXPECT_NEAR(e.branches[0].probability, 1.0, 1e-12);
  for (std::uint64_t seed = 0; seed < 10; ++seed) EXPECT_EQ(run(c, greedy_schedule(c), seed).outcomes.at("p"), 1);
}

TEST(Enumerate, PruningAndLimits) {
  const auto c = compile_text("{forall i in [1, 4]: H(i)}; forall i in [1, 4]: SM(i)");
  EXPECT_EQ(enumerate(c, greedy_schedule(c)).branches.size(), 16u);
  EXPECT_THROW(enumerate(c, greedy_schedule(c), tolerance::kImpossibleBranch, {}, 8), SimError);
  // The threshold applies to each outcome's conditional probability.
  EXPECT_EQ(enumerate(c, greedy_schedule(c), 0.1).branches.size(), 16u);
  const Enumeration pruned = enumerate(c, greedy_schedule(c), 0.6);
  EXPECT_TRUE(pruned.branches.empty());
  EXPECT_NEAR(pruned.pruned_mass, 1.0, 1e-9);
}

TEST(Classical, OnlyClassicalProgram) {
  const auto c = compile_text("x := 7; if x = 7 then y := x * 2 else y := 0");
  const RunResult r = run(c, greedy_schedule(c), 0);
  EXPECT_TRUE(r.outcomes.empty());
  EXPECT_EQ(std::get<std::int64_t>(r.classical.at("x")), 7);
  EXPECT_EQ(std::get<std::int64_t>(r.classical.at("y")), 14);
  const Enumeration e = enumerate(c, greedy_schedule(c));
  ASSERT_EQ(e.branches.size(), 1u);
  EXPECT_NEAR(e.branches[0].probability, 1.0, 1e-12);
}

TEST(Classical, RuntimeErrorsSurface) {
  const auto c = compile_text("H(1); p := SM(1); x := 1 / p");
  bool saw_error = false;
  for (std::uint64_t seed = 0; seed < 20 && !saw_error; ++seed) {
    try {
      run(c, greedy_schedule(c), seed);
    } catch (const SimError&) {
      saw_error = true;
    }
  }
  EXPECT_TRUE(saw_error);
}

TEST(Sample, SingleShotMatchesRun) {
  const auto c = compile_corpus("teleport");
  const Schedule s = greedy_schedule(c);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Distribution d = sample_distribution(c, s, seed, 1);
    ASSERT_EQ(d.counts.size(), 1u);
    EXPECT_EQ(d.counts.begin()->first, run(c, s, seed).outcomes);
    EXPECT_DOUBLE_EQ(d.frequency(d.counts.begin()->first), 1.0);
  }
}

TEST(Sample, FrequenciesApproachProbabilities) {
  const auto c = compile_text("H(1); p := SM(1)");
  const Distribution d = sample_distribution(c, greedy_schedule(c), 3, 20000);
  EXPECT_EQ(d.shots, 20000u);
  EXPECT_NEAR(d.frequency({{"p", 0}}), 0.5, 0.02);
  EXPECT_NEAR(d.frequency({{"p", 1}}), 0.5, 0.02);
}

TEST(Rng, TopBitsUniform) {
  Rng a(5), b(5);
  std::mt19937_64 e(5);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_EQ(x, std::ldexp(static_cast<double>(e() >> 11), -53));
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Compile, Errors) {
  EXPECT_THROW(compile_text("H(25)"), SimError);
  EXPECT_THROW(compile_text("if q = 1 then X(1)"), SimError);
  EXPECT_THROW(compile_text("psi on 1; H(1)"), SimError);
  EXPECT_THROW(compile_text("CNOT(1)"), SimError);
  const auto c = compile_text("H(1) || H(2)");
  EXPECT_THROW(run(c, Schedule{{{0}}}, 0), SimError);
  EXPECT_NO_THROW(run(c, Schedule{{{1}, {0}}}, 0));
}

TEST(Json, RunAndEnumeration) {
  const auto c = compile_text("H(1); p := SM(1)");
  const auto j = nlohmann::json::parse(to_json(enumerate(c, greedy_schedule(c))));
  ASSERT_EQ(j.at("branches").size(), 2u);
  EXPECT_NEAR(j["branches"][0]["probability"].get<double>(), 0.5, 1e-15);
  const std::string text = to_json(enumerate(c, greedy_schedule(c)));
  // Probabilities print with 17 significant digits, enough to round-trip.
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", enumerate(c, greedy_schedule(c)).branches[0].probability);
  EXPECT_NE(text.find(std::string("\"probability\": ") + buf), std::string::npos) << text;
  const auto r = nlohmann::json::parse(to_json(run(c, greedy_schedule(c), 4)));
  EXPECT_TRUE(r.contains("outcomes"));
  EXPECT_EQ(r.at("seed"), 4);
  const auto d = nlohmann::json::parse(to_json(sample_distribution(c, greedy_schedule(c), 0, 5)));
  EXPECT_FALSE(d.empty());
}

}  // namespace
