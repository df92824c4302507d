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

#include "qcasm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qcasm {

namespace {

std::string join_diagnostics(const std::string& what, const std::vector<Diagnostic>& diags) {
  std::string s = what;
  for (const auto& d : diags) s += "\n  " + format(d);
  return s;
}

const GateLibrary& default_library() {
  static const GateLibrary lib;
  return lib;
}

QuantumState conjunct_state(const InputConjunct& c, const GateLibrary& lib) {
  if (c.state.kind == StateRef::Kind::Named) return lib.state(c.state.name);
  std::string bits;
  for (const auto& b : c.state.bits) bits += b.value ? '1' : '0';
  return make_state(KetBits{bits}, static_cast<int>(bits.size()));
}

// Declared states placed on their wires, |0> elsewhere.
QuantumState initial_state(const std::optional<InputDecl>& input, int width, const GateLibrary& lib) {
  std::vector<int> wires;
  std::optional<QuantumState> product;
  if (input) {
    for (const auto& c : input->conjuncts) {
      QuantumState s = conjunct_state(c, lib);
      for (const auto& w : c.wires) wires.push_back(wire_value(w));
      product = product ? product->tensor(s) : s;
    }
  }
  if (!product) return QuantumState::basis(width, 0);
  KetXcd v = KetXcd::Zero(Eigen::Index{1} << width);
  const auto& t = product->amplitudes();
  const int m = static_cast<int>(wires.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    Eigen::Index full = 0;
    for (int k = 0; k < m; ++k) {
      if ((i >> (m - 1 - k)) & 1) full |= Eigen::Index{1} << (width - wires[k]);
    }
    v[full] = t[i];
  }
  return QuantumState(width, std::move(v));
}

struct Firing {
  int step;
  GateId gate;
};

std::vector<Firing> firing_order(const CompiledProgram& c, const Schedule& s, const RunOptions& options) {
  if (auto err = schedule_violation(s, gate_ids(c.lowered.circuit), c.prerequisites)) {
    throw SimError("schedule does not fit the circuit: " + *err);
  }
  std::vector<Firing> out;
  for (std::size_t i = 0; i < s.bouts.size(); ++i) {
    std::vector<GateId> bout = s.bouts[i];
    std::sort(bout.begin(), bout.end());
    if (options.reverse_within_bout) std::reverse(bout.begin(), bout.end());
    for (GateId g : bout) out.push_back({static_cast<int>(i + 1), g});
  }
  return out;
}

const MeasurementFamily& select_family(const CompiledGate& g, const Store& store) {
  try {
    for (std::size_t i = 0; i < g.guards.size(); ++i) {
      if (evaluate_bool(g.guards[i], store)) return g.families[i];
    }
  } catch (const EvalError& e) {
    throw SimError("guard of gate " + std::to_string(g.id) + " (" + g.path + "): " + e.what());
  }
  return g.families.back();
}

void record(const CompiledGate& g, std::int64_t label, Outcomes& outcomes, Store& store) {
  if (g.recorded) outcomes[g.key] = label;
  if (g.key.empty() || g.key[0] == '@') return;
  store[g.key] = label;
}

std::string location_key(const ClassicalAssign& a, const Store& store) {
  if (!a.index) return a.target;
  return a.target + "(" + to_string(evaluate(*a.index, store)) + ")";
}

void exec_classical(const Rule& r, Store& store) {
  if (const auto* a = r.as<ClassicalAssign>()) {
    const std::string key = location_key(*a, store);
    store[key] = evaluate(a->value, store);
  } else if (const auto* c = r.as<ClassicalCond>()) {
    std::size_t chosen = c->guards.size();
    for (std::size_t i = 0; i < c->guards.size(); ++i) {
      if (evaluate_bool(c->guards[i], store)) {
        chosen = i;
        break;
      }
    }
    if (chosen < c->branches.size()) exec_classical(c->branches[chosen], store);
  } else if (const auto* s = r.as<Sequential>()) {
    for (const auto& part : s->parts) exec_classical(part, store);
  } else if (const auto* p = r.as<Parallel>()) {
    // Components read the same state; their updates must agree.
    const Store before = store;
    Store merged = before;
    std::map<std::string, Value> written;
    for (const auto& body : p->bodies) {
      Store local = before;
      exec_classical(body, local);
      for (const auto& [k, v] : local) {
        auto it = before.find(k);
        if (it != before.end() && it->second == v) continue;
        auto [w, fresh] = written.emplace(k, v);
        if (!fresh && w->second != v) throw SimError("conflicting parallel updates of " + k);
        merged[k] = v;
      }
    }
    store = std::move(merged);
  }
}

}  // namespace

void run_classical(const Rule& r, Store& store) {
  try {
    exec_classical(r, store);
  } catch (const EvalError& e) {
    throw SimError(std::string("classical rule: ") + e.what());
  }
}

CompiledProgram compile(const Program& p, const Bindings& bindings, const CompileOptions& options) {
  const GateLibrary& lib = options.library ? *options.library : default_library();
  CompiledProgram c;
  c.ground = elaborate(p, bindings);
  c.external = options.external;
  ChannelVarSet external;
  for (const auto& [k, v] : options.external) {
    (void)v;
    external.insert(k);
  }
  if (auto diags = well_formed(c.ground.body, external); !diags.empty()) {
    throw SimError(join_diagnostics("program is not well-formed:", diags));
  }
  int width = 0;
  if (c.ground.input) {
    if (auto diags = check_input(*c.ground.input, &lib); !diags.empty()) {
      throw SimError(join_diagnostics("invalid input declaration:", diags));
    }
    for (const auto& conj : c.ground.input->conjuncts) {
      for (const auto& w : conj.wires) width = std::max<int>(width, static_cast<int>(w.value));
    }
  }
  for (const auto* g : gate_subrules(c.ground.body)) {
    for (const auto& w : g->wires) {
      if (!w.is_int()) throw SimError("wire is not a compile-time integer");
      if (w.value > kMaxWidth) {
        throw SimError("wire " + std::to_string(w.value) + " exceeds the maximum width " + std::to_string(kMaxWidth));
      }
      width = std::max<int>(width, static_cast<int>(w.value));
    }
  }
  if (width > kMaxWidth) throw SimError("width " + std::to_string(width) + " exceeds " + std::to_string(kMaxWidth));
  width = std::max(width, 1);

  c.lowered = lower(c.ground.body, external, width);
  c.prerequisites = prerequisite_relation(c.lowered.circuit);

  for (const auto& g : c.lowered.circuit.gates) {
    CompiledGate cg;
    cg.id = g.id;
    cg.path = g.path;
    cg.wires = g.wires;
    cg.guards = g.rule.guards;
    bool measuring = false;
    for (const auto& m : g.rule.branches) {
      std::vector<std::int64_t> params;
      for (const auto& s : m.subscripts) params.push_back(s.value);
      std::optional<std::int64_t> power;
      if (m.power_log2) power = m.power_log2->value;
      const bool negate = m.phase && m.phase->is_int() && m.phase->value % 2 != 0;
      MeasurementFamily f = lib.resolve(m.name, params, power, negate);
      if (f.arity() != static_cast<int>(g.wires.size())) {
        throw SimError("gate " + f.name() + " acts on " + std::to_string(f.arity()) + " qubit(s) but " +
                       std::to_string(g.wires.size()) + " wire(s) given at " + g.path);
      }
      measuring = measuring || !f.is_unitary();
      cg.families.push_back(std::move(f));
    }
    if (!g.channel.empty()) {
      cg.key = g.channel;
    } else {
      cg.key = "@" + std::to_string(g.id);
      cg.recorded = measuring;
    }
    c.gates.push_back(std::move(cg));
  }
  c.initial = initial_state(c.ground.input, width, lib);
  return c;
}

Schedule greedy_schedule(const CompiledProgram& c) { return schedule_from_order(c.lowered.order); }

RunResult run(const CompiledProgram& c, const Schedule& s, std::uint64_t seed, const RunOptions& options) {
  RunResult r;
  r.seed = seed;
  Rng rng(seed);
  Store store = c.external;
  QuantumState state = c.initial;
  for (const auto& [step, id] : firing_order(c, s, options)) {
    const CompiledGate& g = c.gates[id];
    const MeasurementFamily& f = select_family(g, store);
    std::int64_t label = f.outcomes().front().label;
    if (!f.is_unitary()) {
      std::vector<double> probs;
      for (const auto& o : f.outcomes()) probs.push_back(outcome_probability(state, f, g.wires, o.label));
      const double u = rng.uniform();
      double cumulative = 0.0;
      std::optional<std::size_t> chosen;
      std::size_t last_possible = 0;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] < tolerance::kImpossibleBranch) continue;
        last_possible = i;
        cumulative += probs[i];
        if (!chosen && u < cumulative) chosen = i;
      }
      label = f.outcomes()[chosen.value_or(last_possible)].label;
    }
    state = measure_outcome(state, f, g.wires, label).second;
    record(g, label, r.outcomes, store);
    r.trace.push_back({step, id, f.name(), g.wires, label});
  }
  run_classical(c.ground.body, store);
  r.classical = std::move(store);
  r.final_state = std::move(state);
  return r;
}

double Enumeration::total_probability() const {
  double sum = 0.0;
  for (const auto& b : branches) sum += b.probability;
  return sum;
}

Enumeration enumerate(const CompiledProgram& c, const Schedule& s, double min_prob, const RunOptions& options,
                      std::size_t max_branches) {
  const auto order = firing_order(c, s, options);
  const double threshold = std::max(min_prob, tolerance::kImpossibleBranch);
  Enumeration out;
  std::function<void(std::size_t, const QuantumState&, Store&, Outcomes&, double, std::vector<TraceEntry>&)> expand =
      [&](std::size_t k, const QuantumState& state, Store& store, Outcomes& outcomes, double prob,
          std::vector<TraceEntry>& trace) {
        if (k == order.size()) {
          if (out.branches.size() >= max_branches) {
            throw SimError("more than " + std::to_string(max_branches) + " branches");
          }
          Branch b;
          b.outcomes = outcomes;
          b.probability = prob;
          b.final_state = state;
          b.classical = store;
          run_classical(c.ground.body, b.classical);
          b.trace = trace;
          out.branches.push_back(std::move(b));
          return;
        }
        const auto [step, id] = order[k];
        const CompiledGate& g = c.gates[id];
        const MeasurementFamily& f = select_family(g, store);
        for (const auto& o : f.outcomes()) {
          const double p = f.is_unitary() ? 1.0 : outcome_probability(state, f, g.wires, o.label);
          if (p < threshold) {
            out.pruned_mass += prob * p;
            continue;
          }
          auto [q, next] = measure_outcome(state, f, g.wires, o.label);
          if (f.is_unitary()) q = 1.0;
          Store store2 = store;
          Outcomes outcomes2 = outcomes;
          record(g, o.label, outcomes2, store2);
          trace.push_back({step, id, f.name(), g.wires, o.label});
          expand(k + 1, next, store2, outcomes2, prob * q, trace);
          trace.pop_back();
        }
      };
  Store store = c.external;
  Outcomes outcomes;
  std::vector<TraceEntry> trace;
  expand(0, c.initial, store, outcomes, 1.0, trace);
  std::stable_sort(out.branches.begin(), out.branches.end(),
                   [](const Branch& a, const Branch& b) { return a.outcomes < b.outcomes; });
  return out;
}

std::vector<std::string> compare_enumerations(const Enumeration& a, const Enumeration& b, double prob_tol,
                                              double fidelity_tol) {
  std::vector<std::string> diffs;
  std::map<Outcomes, const Branch*> index;
  for (const auto& br : b.branches) index[br.outcomes] = &br;
  std::set<Outcomes> seen;
  for (const auto& br : a.branches) {
    seen.insert(br.outcomes);
    auto it = index.find(br.outcomes);
    if (it == index.end()) {
      diffs.push_back("branch " + outcomes_text(br.outcomes) + " missing");
      continue;
    }
    const Branch& other = *it->second;
    if (std::abs(br.probability - other.probability) > prob_tol) {
      diffs.push_back("branch " + outcomes_text(br.outcomes) + " probability " + std::to_string(br.probability) +
                      " vs " + std::to_string(other.probability));
    }
    if (fidelity_up_to_phase(br.final_state, other.final_state) < 1.0 - fidelity_tol) {
      diffs.push_back("branch " + outcomes_text(br.outcomes) + " final states differ");
    }
  }
  for (const auto& br : b.branches) {
    if (!seen.count(br.outcomes)) diffs.push_back("extra branch " + outcomes_text(br.outcomes));
  }
  return diffs;
}

IndependenceReport check_schedule_independence(const CompiledProgram& c, std::size_t cap) {
  IndependenceReport report;
  report.schedules = all_schedules(gate_ids(c.lowered.circuit), c.prerequisites, cap);
  if (report.schedules.empty()) return report;
  const Enumeration reference = enumerate(c, report.schedules.front());
  for (std::size_t i = 1; i < report.schedules.size(); ++i) {
    const Enumeration e = enumerate(c, report.schedules[i]);
    for (auto& d : compare_enumerations(reference, e)) {
      report.discrepancies.push_back("schedule " + schedule_text(report.schedules[i]) + ": " + d);
    }
  }
  report.ok = report.discrepancies.empty();
  return report;
}

double Distribution::frequency(const Outcomes& o) const {
  if (shots == 0) return 0.0;
  auto it = counts.find(o);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(shots);
}

Distribution sample_distribution(const CompiledProgram& c, const Schedule& s, std::uint64_t seed, std::size_t shots) {
  if (shots == 0) throw std::invalid_argument("shots must be positive");
  Distribution d;
  d.shots = shots;
  for (std::size_t k = 0; k < shots; ++k) ++d.counts[run(c, s, seed + k).outcomes];
  return d;
}

std::string outcomes_text(const Outcomes& o) {
  std::string s = "{";
  for (const auto& [k, v] : o) {
    if (s.size() > 1) s += ", ";
    s += k + "=" + std::to_string(v);
  }
  return s + "}";
}

}  // namespace qcasm
