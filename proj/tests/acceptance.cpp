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

// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit
// status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>

#include "test_support.hpp"

namespace {

using namespace qcasm;
using namespace qcasm::testing;

constexpr double kProbTol = 1e-9;
constexpr double kFidTol = 1e-9;

struct Check {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
  void expect(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Full-width matrix of a compiled unitary gate.
OperatorXcd gate_matrix(const CompiledGate& g, int width) {
  if (!g.guards.empty() || g.families.size() != 1 || !g.families[0].is_unitary()) {
    throw std::runtime_error("gate " + std::to_string(g.id) + " is not an unconditional unitary");
  }
  return embed_by_permutation(g.families[0].outcomes()[0].op, g.wires, width);
}

// DFT matrix with entries e^{2 pi i jk / N} / sqrt(N), built directly.
OperatorXcd dft(int n) {
  const Eigen::Index N = Eigen::Index{1} << n;
  OperatorXcd f(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index k = 0; k < N; ++k) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % N) / static_cast<double>(N);
      f(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(N)), angle);
    }
  }
  return f;
}

// 1. Measurement-based CNOT.
Check cnot_mb() {
  Check ck;
  const auto t0 = std::chrono::steady_clock::now();
  const Program p = corpus_program("cnot_mb");
  for (int c = 0; c <= 1; ++c) {
    for (int t = 0; t <= 1; ++t) {
      const CompiledProgram cp = compile(p, {{"c", c}, {"t", t}});
      const Enumeration e = enumerate(cp, greedy_schedule(cp));
      const std::string tag = "(c,t)=(" + std::to_string(c) + "," + std::to_string(t) + ")";
      ck.expect(e.branches.size() == 8, tag + ": " + std::to_string(e.branches.size()) + " branches");
      for (const auto& b : e.branches) {
        ck.expect(std::abs(b.probability - 0.125) <= kProbTol, tag + ": probability " + num(b.probability));
        const int r = static_cast<int>(b.outcomes.at("r"));
        const auto want = QuantumState::basis(3, 4 * c + 2 * r + (c ^ t));
        const double f = fidelity_up_to_phase(b.final_state, want);
        ck.expect(f >= 1 - kFidTol, tag + ": fidelity " + num(f));
      }
    }
  }
  const double s = elapsed_s(t0);
  ck.expect(s < 1.0, "took " + num(s) + " s");
  return ck;
}

// 2. Teleportation of 20 random states.
Check teleport() {
  Check ck;
  const auto t0 = std::chrono::steady_clock::now();
  const Program p = parse_program(teleport_source());
  std::mt19937_64 rng(20260101);
  for (int trial = 0; trial < 20; ++trial) {
    const QuantumState psi = random_state(1, rng);
    GateLibrary lib;
    lib.add_state("psi", psi);
    CompileOptions o;
    o.library = &lib;
    const CompiledProgram cp = compile(p, {}, o);
    const Enumeration e = enumerate(cp, greedy_schedule(cp));
    ck.expect(e.branches.size() == 4, "trial " + std::to_string(trial) + ": " + std::to_string(e.branches.size()) +
                                          " branches");
    for (const auto& b : e.branches) {
      ck.expect(std::abs(b.probability - 0.25) <= kProbTol, "probability " + num(b.probability));
      const auto pq = static_cast<std::uint64_t>(2 * b.outcomes.at("p") + b.outcomes.at("q"));
      const QuantumState want = QuantumState::basis(2, pq).tensor(psi);
      const double f = fidelity_up_to_phase(b.final_state, want);
      ck.expect(f >= 1 - kFidTol, "trial " + std::to_string(trial) + ": fidelity " + num(f));
    }
  }
  const double s = elapsed_s(t0);
  ck.expect(s < 1.0, "took " + num(s) + " s");
  return ck;
}

// 3. QFT composite unitary against the DFT matrix.
Check qft() {
  Check ck;
  const auto t0 = std::chrono::steady_clock::now();
  const Program p = corpus_program("qft");
  for (int n = 1; n <= 4; ++n) {
    const Eigen::Index N = Eigen::Index{1} << n;
    const OperatorXcd want = dft(n);

    // Product of the elaborated gate list in schedule order.
    const CompiledProgram cp = compile(p, {{"n", n}, {"j", 0}});
    OperatorXcd u = OperatorXcd::Identity(N, N);
    for (const auto& bout : greedy_schedule(cp).bouts) {
      for (GateId g : bout) u = gate_matrix(cp.gates[g], n) * u;
    }
    const double err = (u - want).cwiseAbs().maxCoeff();
    ck.expect(err <= 1e-9, "n=" + std::to_string(n) + ": gate-list error " + num(err));

    // The simulator on every basis input.
    for (Eigen::Index j = 0; j < N; ++j) {
      const CompiledProgram cj = compile(p, {{"n", n}, {"j", j}});
      const RunResult r = run(cj, greedy_schedule(cj), 0);
      const double e = (r.final_state.amplitudes() - want.col(j)).cwiseAbs().maxCoeff();
      ck.expect(e <= 1e-9, "n=" + std::to_string(n) + ", j=" + std::to_string(j) + ": column error " + num(e));
    }
  }
  const double s = elapsed_s(t0);
  ck.expect(s < 5.0, "took " + num(s) + " s");
  return ck;
}

// 4. Phase estimation recovers j exactly.
Check phase_est() {
  Check ck;
  const Program p = corpus_program("phase_est");
  for (int n = 1; n <= 4; ++n) {
    for (int j = 0; j < (1 << n); ++j) {
      const CompiledProgram cp = compile(p, {{"n", n}, {"j", j}});
      std::map<int, std::string> key_of_wire;
      for (const auto& g : cp.gates) {
        if (!g.families[0].is_unitary()) key_of_wire[g.wires.at(0)] = g.key;
      }
      const Enumeration e = enumerate(cp, greedy_schedule(cp));
      double hit = 0.0;
      for (const auto& b : e.branches) {
        bool match = true;
        for (int i = 1; i <= n; ++i) match = match && b.outcomes.at(key_of_wire.at(i)) == ((j >> (n - i)) & 1);
        if (match) hit += b.probability;
      }
      ck.expect(std::abs(hit - 1.0) <= kProbTol,
                "n=" + std::to_string(n) + ", j=" + std::to_string(j) + ": probability " + num(hit));
    }
  }
  return ck;
}

// Success probability of Grover search by explicit matrices over n + 1 qubits.
double grover_oracle(int n, std::int64_t marked) {
  const Eigen::Index N = Eigen::Index{1} << n;
  const int rounds = static_cast<int>(std::floor(std::numbers::pi / 4.0 * std::sqrt(static_cast<double>(N))));
  OperatorXcd h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  OperatorXcd hn = OperatorXcd::Identity(1, 1);
  for (int i = 0; i < n; ++i) hn = kron(hn, h);
  const OperatorXcd i2 = OperatorXcd::Identity(2, 2);
  OperatorXcd reflect = -OperatorXcd::Identity(N, N);
  reflect(0, 0) = 1.0;
  const OperatorXcd diffusion = kron(hn * reflect * hn, i2);
  OperatorXcd oracle = OperatorXcd::Zero(2 * N, 2 * N);
  for (Eigen::Index x = 0; x < N; ++x) {
    for (Eigen::Index y = 0; y < 2; ++y) oracle(2 * x + (x == marked ? 1 - y : y), 2 * x + y) = 1.0;
  }
  KetXcd v = KetXcd::Zero(2 * N);
  v[1] = 1.0;
  v = kron(hn, h) * v;
  for (int k = 0; k < rounds; ++k) v = diffusion * (oracle * v);
  return std::norm(v[2 * marked]) + std::norm(v[2 * marked + 1]);
}

// 5. Grover search.
Check grover() {
  Check ck;
  const Program p = corpus_program("grover");
  for (int n : {2, 3}) {
    const std::int64_t marked = (std::int64_t{1} << n) - 1;
    const CompiledProgram cp = compile(p, {{"n", n}});
    std::map<int, std::string> key_of_wire;
    for (const auto& g : cp.gates) {
      if (!g.families[0].is_unitary()) key_of_wire[g.wires.at(0)] = g.key;
    }
    const Enumeration e = enumerate(cp, greedy_schedule(cp));
    double success = 0.0;
    for (const auto& b : e.branches) {
      bool match = true;
      for (int i = 1; i <= n; ++i) match = match && b.outcomes.at(key_of_wire.at(i)) == ((marked >> (n - i)) & 1);
      if (match) success += b.probability;
    }
    const double oracle = grover_oracle(n, marked);
    ck.expect(std::abs(success - oracle) <= kProbTol,
              "n=" + std::to_string(n) + ": " + num(success) + " vs matrix oracle " + num(oracle));
    if (n == 2) {
      ck.expect(std::abs(success - 1.0) <= kProbTol, "n=2: probability of (1,1) is " + num(success));
      ck.expect(e.branches.size() == 1, "n=2: " + std::to_string(e.branches.size()) + " branches");
    } else {
      ck.expect(success >= 0.94, "n=3: success probability " + num(success));
    }
  }
  return ck;
}

// 6. Schedule independence.
Check schedule_independence() {
  Check ck;
  const GateLibrary lib = corpus_library();
  CompileOptions o;
  o.library = &lib;
  const CompiledProgram tp = compile(corpus_program("teleport"), {}, o);
  IndependenceReport r = check_schedule_independence(tp);
  ck.expect(r.schedules.size() > 1, "teleport: only " + std::to_string(r.schedules.size()) + " schedule(s)");
  ck.expect(r.ok, "teleport: " + (r.discrepancies.empty() ? std::string() : r.discrepancies.front()));

  const Program first4 = parse_program(read_file(fixture_path("cnot_mb_first4.qcasm")));
  for (int c = 0; c <= 1; ++c) {
    for (int t = 0; t <= 1; ++t) {
      const CompiledProgram cp = compile(first4, {{"c", c}, {"t", t}});
      ck.expect(cp.gates.size() == 4, "truncation has " + std::to_string(cp.gates.size()) + " gates");
      r = check_schedule_independence(cp);
      ck.expect(r.schedules.size() > 1, "cnot first 4: only " + std::to_string(r.schedules.size()) + " schedule(s)");
      ck.expect(r.ok, "cnot first 4: " + (r.discrepancies.empty() ? std::string() : r.discrepancies.front()));
    }
  }
  return ck;
}

// Top-level sequence prefixes of a ground rule.
std::vector<Rule> prefixes(const Rule& body) {
  std::vector<Rule> out;
  if (const auto* s = body.as<Sequential>()) {
    for (std::size_t k = 1; k <= s->parts.size(); ++k) {
      out.push_back(Rule{Sequential{{s->parts.begin(), s->parts.begin() + k}, {}}});
    }
  } else {
    out.push_back(body);
  }
  return out;
}

// 7. Lowering against brute-force oracles.
Check lowering() {
  Check ck;
  const GateLibrary lib = corpus_library();
  std::mt19937_64 rng(7);
  std::size_t small = 0;
  auto small_params = [](const std::string& name) -> std::vector<Bindings> {
    if (name == "qft") return {{{"n", 1}}, {{"n", 2}}, {{"n", 3}}};
    if (name == "phase_est") return {{{"n", 1}, {"j", 1}}, {{"n", 2}, {"j", 3}}, {{"n", 3}, {"j", 5}}};
    if (name == "grover") return {{{"n", 2}}, {{"n", 3}}};
    return {{}};
  };
  for (const auto& name : kCorpus) {
    for (const auto& b : small_params(name)) {
      CompileOptions o;
      o.library = &lib;
      const CompiledProgram cp = compile(corpus_program(name), b, o);
      const Lowered& l = cp.lowered;

      for (const auto& pr : cp.prerequisites) {
        ck.expect(l.order.less(pr.first, pr.second),
                  name + ": prerequisite g" + std::to_string(pr.first) + " < g" + std::to_string(pr.second) +
                      " missing from the order");
      }

      const DecompTree canon = canonicalize(l.tree);
      ck.expect(canonicalize(canon) == canon, name + ": canonicalize not idempotent");
      ck.expect(order_from_tree(canon).pairs == l.order.pairs, name + ": canonical tree changes the order");
      for (int trial = 0; trial < 8; ++trial) {
        const Rule g = regroup(cp.ground.body, rng);
        const Lowered lg = lower(g, {}, l.circuit.width);
        ck.expect(canonicalize(lg.tree) == canon,
                  name + ": regrouped canonical tree " + tree_text(canonicalize(lg.tree)) + " vs " + tree_text(canon));
      }

      for (const Rule& prefix : prefixes(cp.ground.body)) {
        const Lowered lp = lower(prefix, {}, l.circuit.width);
        const int n = static_cast<int>(lp.circuit.gates.size());
        if (n == 0 || n > 5) continue;
        ++small;
        const OrderPairs pre = prerequisite_relation(lp.circuit);
        const std::size_t got = all_schedules(lp.circuit, 5).size();
        const std::size_t want = ordered_partition_count(n, pre);
        ck.expect(got == want, name + ": " + std::to_string(got) + " schedules, oracle " + std::to_string(want));
        const std::size_t got_r = all_schedules(gate_ids(lp.circuit), lp.order.pairs, 5).size();
        ck.expect(got_r == ordered_partition_count(n, lp.order.pairs), name + ": schedule count under the program order");
      }
    }
  }
  ck.expect(small >= 6, "only " + std::to_string(small) + " circuits with at most 5 gates");
  return ck;
}

// 8. Sampler against enumeration.
Check sampler() {
  Check ck;
  const CompiledProgram cp = compile(corpus_program("cnot_mb"), {{"c", 1}, {"t", 0}});
  const Schedule s = greedy_schedule(cp);
  const Enumeration e = enumerate(cp, s);
  const Distribution d = sample_distribution(cp, s, 1, 80000);
  ck.expect(d.counts.size() == e.branches.size(), std::to_string(d.counts.size()) + " distinct outcomes sampled");
  for (const auto& b : e.branches) {
    const double f = d.frequency(b.outcomes);
    ck.expect(std::abs(f - b.probability) <= 0.006,
              outcomes_text(b.outcomes) + ": frequency " + num(f) + " vs " + num(b.probability));
  }
  return ck;
}

// 9. Well-formedness of the corpus and the mutated fixtures.
Check well_formedness() {
  Check ck;
  const GateLibrary lib = corpus_library();
  for (const auto& name : kCorpus) {
    const Program g = elaborate(corpus_program(name));
    auto diags = well_formed(g.body);
    if (g.input) {
      auto more = check_input(*g.input, &lib);
      diags.insert(diags.end(), more.begin(), more.end());
    }
    ck.expect(diags.empty(), name + ": " + (diags.empty() ? std::string() : format(diags.front())));
  }

  std::map<std::string, int> per_category;
  for (const auto& entry : std::filesystem::directory_iterator(QCASM_FIXTURE_DIR)) {
    const std::string file = entry.path().filename().string();
    const std::string text = read_file(entry.path().string());
    const auto cat = text.find("# category: ");
    const auto exp = text.find("# expect: ");
    if (cat == std::string::npos || exp == std::string::npos) continue;
    const std::string category = text.substr(cat + 12, text.find('\n', cat) - cat - 12);
    const std::string tag = text.substr(exp + 10, text.find('\n', exp) - exp - 10);
    ++per_category[category];
    const Program g = elaborate(parse_program(text));
    const auto diags = well_formed(g.body);
    ck.expect(!diags.empty(), file + ": accepted");
    for (const auto& d : diags) {
      ck.expect(clause_tag(d.clause) == tag, file + ": got [" + std::string(clause_tag(d.clause)) + "], want [" + tag + "]");
    }
  }
  for (const char* c : {"wire-overlap", "unbound-channel", "duplicate-output", "measurement-outside-gate"}) {
    ck.expect(per_category[c] == 3, std::string(c) + ": " + std::to_string(per_category[c]) + " fixtures");
  }
  return ck;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"measurement-based CNOT", cnot_mb},
      {"teleportation", teleport},
      {"QFT unitary", qft},
      {"phase estimation", phase_est},
      {"Grover search", grover},
      {"schedule independence", schedule_independence},
      {"lowering oracles", lowering},
      {"sampler statistics", sampler},
      {"well-formedness suite", well_formedness},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Check ck;
    try {
      ck = criteria[i].second();
    } catch (const std::exception& e) {
      ck.fail(std::string("exception: ") + e.what());
    }
    const double ms = elapsed_s(t0) * 1000.0;
    std::printf("%s %zu %-24s %8.1f ms%s%s\n", ck.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), ms,
                ck.ok ? "" : "  ", ck.detail.c_str());
    if (!ck.ok) ++failed;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
