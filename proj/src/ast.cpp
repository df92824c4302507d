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

#include "qcasm/ast.hpp"

#include <algorithm>
#include <sstream>

#include "qcasm/qmath.hpp"

namespace qcasm {

const char* clause_tag(Clause c) {
  switch (c) {
    case Clause::None:
      return "";
    case Clause::GateRule:
      return "gate-rule";
    case Clause::ClassicalAssignment:
      return "classical-assignment";
    case Clause::ClassicalConditional:
      return "classical-conditional";
    case Clause::ParallelComposition:
      return "parallel-composition";
    case Clause::SequentialComposition:
      return "sequential-composition";
    case Clause::InputDeclaration:
      return "input-declaration";
  }
  return "";
}

std::string format(const Diagnostic& d, const std::string& origin) {
  std::ostringstream os;
  if (!origin.empty()) os << origin << ":";
  os << d.line << ":" << d.column << ": "
     << (d.severity == Diagnostic::Severity::Error ? "error" : "warning") << ": " << d.message;
  if (d.clause != Clause::None) os << " [" << clause_tag(d.clause) << "]";
  if (!d.path.empty()) os << " (at " << d.path << ")";
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& d) { return os << format(d); }

Loc Rule::loc() const {
  return std::visit([](const auto& n) { return n.loc; }, node);
}

int wire_value(const Expr& e) {
  if (!e.is_int()) throw std::invalid_argument("wire expression is not a compile-time integer");
  if (e.value < 1 || e.value > kMaxWidth) {
    throw std::invalid_argument("wire " + std::to_string(e.value) + " outside 1.." +
                                std::to_string(kMaxWidth));
  }
  return static_cast<int>(e.value);
}

namespace {

template <typename F>
void for_each_child(const Rule& r, F&& f) {
  if (const auto* c = r.as<ClassicalCond>()) {
    for (const auto& b : c->branches) f(b);
  } else if (const auto* p = r.as<Parallel>()) {
    for (const auto& b : p->bodies) f(b);
  } else if (const auto* s = r.as<Sequential>()) {
    for (const auto& b : s->parts) f(b);
  } else if (const auto* l = r.as<ForLoop>()) {
    for (const auto& b : l->body) f(b);
  }
}

void collect_gates(const Rule& r, std::vector<const GateRule*>& out) {
  if (const auto* g = r.as<GateRule>()) {
    out.push_back(g);
    return;
  }
  for_each_child(r, [&](const Rule& c) { collect_gates(c, out); });
}

}  // namespace

std::set<int> wire_set(const Rule& r) {
  std::set<int> out;
  if (const auto* g = r.as<GateRule>()) {
    for (const auto& w : g->wires) {
      if (w.is_int()) out.insert(static_cast<int>(w.value));
    }
    return out;
  }
  // Classical conditionals contribute no wires even when (ill-formed) they
  // contain gates.
  if (r.as<ClassicalCond>() || r.as<ClassicalAssign>()) return out;
  for_each_child(r, [&](const Rule& c) {
    auto sub = wire_set(c);
    out.insert(sub.begin(), sub.end());
  });
  return out;
}

std::set<std::string> output_vars(const Rule& r) {
  std::set<std::string> out;
  if (const auto* g = r.as<GateRule>()) {
    if (!g->out.empty()) out.insert(g->out);
    return out;
  }
  if (r.as<ClassicalCond>() || r.as<ClassicalAssign>()) return out;
  for_each_child(r, [&](const Rule& c) {
    auto sub = output_vars(c);
    out.insert(sub.begin(), sub.end());
  });
  return out;
}

std::vector<const GateRule*> gate_subrules(const Rule& r) {
  std::vector<const GateRule*> out;
  collect_gates(r, out);
  return out;
}

bool is_classical(const Rule& r) { return gate_subrules(r).empty(); }

std::set<std::string> occurring_vars(const Rule& r) {
  std::set<std::string> out;
  if (const auto* g = r.as<GateRule>()) {
    for (const auto& e : g->guards) collect_vars(e, out);
    for (const auto& b : g->branches) {
      if (b.phase) collect_vars(*b.phase, out);
    }
    if (!g->out.empty()) out.insert(g->out);
    return out;
  }
  if (const auto* a = r.as<ClassicalAssign>()) {
    out.insert(a->target);
    if (a->index) collect_vars(*a->index, out);
    collect_vars(a->value, out);
    return out;
  }
  if (const auto* c = r.as<ClassicalCond>()) {
    for (const auto& e : c->guards) collect_vars(e, out);
  }
  for_each_child(r, [&](const Rule& c) {
    auto sub = occurring_vars(c);
    out.insert(sub.begin(), sub.end());
  });
  return out;
}

namespace {

std::string join(const std::set<std::string>& names) {
  std::string s;
  for (const auto& n : names) s += (s.empty() ? "" : ", ") + n;
  return s;
}

std::string join(const std::set<int>& wires) {
  std::string s;
  for (int w : wires) s += (s.empty() ? "" : ", ") + std::to_string(w);
  return s;
}

void collect_dynamic_targets(const Rule& r, std::set<std::string>& out) {
  if (const auto* a = r.as<ClassicalAssign>()) {
    out.insert(a->target);
    return;
  }
  for_each_child(r, [&](const Rule& c) { collect_dynamic_targets(c, out); });
}

class Checker {
 public:
  Checker(const Rule& root, const ChannelVarSet& external) : external_(external) {
    program_outputs_ = output_vars(root);
    collect_dynamic_targets(root, dynamic_);
  }

  void check(const Rule& r, const ChannelVarSet& available, const std::string& path) {
    if (const auto* g = r.as<GateRule>()) return check_gate(*g, available, path);
    if (const auto* a = r.as<ClassicalAssign>()) return check_assign(*a, available, path);
    if (const auto* c = r.as<ClassicalCond>()) return check_cond(*c, available, path);
    if (const auto* p = r.as<Parallel>()) return check_parallel(*p, available, path);
    if (const auto* s = r.as<Sequential>()) return check_sequential(*s, available, path);
    if (const auto* l = r.as<ForLoop>()) {
      report(l->loc, path, Clause::None, "for loop must be elaborated before checking");
      for (const auto& b : l->body) check(b, available, child(path, 0));
    }
  }

  std::vector<Diagnostic> take() { return std::move(diags_); }

 private:
  static std::string child(const std::string& path, std::size_t i) {
    return path + "." + std::to_string(i);
  }

  void report(Loc loc, const std::string& path, Clause clause, std::string message) {
    Diagnostic d;
    d.message = std::move(message);
    d.line = loc.line;
    d.column = loc.column;
    d.clause = clause;
    d.path = path;
    diags_.push_back(std::move(d));
  }

  void check_no_measurement(const Expr& e, Loc loc, const std::string& path) {
    if (contains_measurement(e)) {
      report(loc, path, Clause::GateRule,
             "a measurement expression may only appear as the assigned measurement of a gate rule");
    }
  }

  // Reads in classical expressions: channel variables must already be
  // available, other names must be classical locations assigned somewhere.
  void check_classical_reads(const Expr& e, const ChannelVarSet& available, Loc loc,
                             const std::string& path, Clause clause) {
    std::set<std::string> vars;
    collect_vars(e, vars);
    for (const auto& v : vars) {
      if (is_gate_name(v)) continue;  // reported by check_no_measurement
      if (available.count(v) || dynamic_.count(v)) continue;
      report(loc, path, clause,
             program_outputs_.count(v)
                 ? "channel variable " + v + " is read before it is assigned"
                 : "unbound variable " + v);
    }
  }

  void check_gate(const GateRule& g, const ChannelVarSet& available, const std::string& path) {
    std::set<std::int64_t> seen;
    for (const auto& w : g.wires) {
      if (!w.is_int()) {
        report(g.loc, path, Clause::GateRule, "wire names must be compile-time integers");
        continue;
      }
      if (w.value < 1) {
        report(g.loc, path, Clause::GateRule, "wire " + std::to_string(w.value) + " is not positive");
      }
      if (!seen.insert(w.value).second) {
        report(g.loc, path, Clause::GateRule,
               "wire " + std::to_string(w.value) + " repeated: gate wires must be distinct");
      }
    }
    if (g.branches.empty()) report(g.loc, path, Clause::GateRule, "gate rule without a measurement");
    std::set<std::string> vars;  // once per gate: the phase split repeats guards
    for (const auto& guard : g.guards) {
      check_no_measurement(guard, g.loc, path);
      collect_vars(guard, vars);
    }
    for (const auto& v : vars) {
      if (is_gate_name(v) || available.count(v)) continue;
      std::string why;
      if (program_outputs_.count(v)) {
        why = "guard reads channel variable " + v + " before it is assigned";
      } else if (dynamic_.count(v)) {
        why = "guard reads " + v + ", which is not a channel variable";
      } else {
        why = "guard reads unbound channel variable " + v;
      }
      report(g.loc, path, Clause::GateRule, why);
    }
    for (const auto& b : g.branches) {
      if (b.phase) check_no_measurement(*b.phase, g.loc, path);
    }
    if (!g.out.empty()) {
      if (external_.count(g.out)) {
        report(g.loc, path, Clause::GateRule,
               "output variable " + g.out + " is not fresh: it is an external channel variable");
      }
      if (dynamic_.count(g.out)) {
        report(g.loc, path, Clause::GateRule,
               "output variable " + g.out + " is also a classical assignment target");
      }
    }
  }

  void check_assign(const ClassicalAssign& a, const ChannelVarSet& available,
                    const std::string& path) {
    if (program_outputs_.count(a.target) || available.count(a.target) ||
        external_.count(a.target)) {
      report(a.loc, path, Clause::ClassicalAssignment,
             "classical assignment target " + a.target + " is a channel variable");
    }
    check_no_measurement(a.value, a.loc, path);
    check_classical_reads(a.value, available, a.loc, path, Clause::ClassicalAssignment);
    if (a.index) {
      check_no_measurement(*a.index, a.loc, path);
      check_classical_reads(*a.index, available, a.loc, path, Clause::ClassicalAssignment);
    }
  }

  void check_cond(const ClassicalCond& c, const ChannelVarSet& available, const std::string& path) {
    for (const auto& guard : c.guards) {
      check_no_measurement(guard, c.loc, path);
      check_classical_reads(guard, available, c.loc, path, Clause::ClassicalConditional);
    }
    for (std::size_t i = 0; i < c.branches.size(); ++i) {
      const auto& b = c.branches[i];
      if (!is_classical(b)) {
        report(b.loc(), child(path, i), Clause::ClassicalConditional,
               "branches of a classical conditional must be classical rules");
      }
      check(b, available, child(path, i));
    }
  }

  void check_parallel(const Parallel& p, const ChannelVarSet& available, const std::string& path) {
    if (p.binder) {
      report(p.loc, path, Clause::None, "forall must be elaborated before checking");
    }
    std::vector<std::set<int>> wires;
    std::vector<std::set<std::string>> outputs, occurring;
    for (const auto& b : p.bodies) {
      wires.push_back(wire_set(b));
      outputs.push_back(output_vars(b));
      occurring.push_back(occurring_vars(b));
    }
    for (std::size_t i = 0; i < p.bodies.size(); ++i) {
      for (std::size_t j = i + 1; j < p.bodies.size(); ++j) {
        std::set<int> shared;
        std::set_intersection(wires[i].begin(), wires[i].end(), wires[j].begin(), wires[j].end(),
                              std::inserter(shared, shared.end()));
        if (!shared.empty()) {
          report(p.bodies[j].loc(), path, Clause::ParallelComposition,
                 "components " + std::to_string(i) + " and " + std::to_string(j) +
                     " share wire(s) " + join(shared) +
                     ": parallel components need pairwise disjoint wire sets");
        }
      }
    }
    for (std::size_t i = 0; i < p.bodies.size(); ++i) {
      for (std::size_t j = i + 1; j < p.bodies.size(); ++j) {
        std::set<std::string> clash;
        std::set_intersection(outputs[i].begin(), outputs[i].end(), occurring[j].begin(),
                              occurring[j].end(), std::inserter(clash, clash.end()));
        std::set_intersection(outputs[j].begin(), outputs[j].end(), occurring[i].begin(),
                              occurring[i].end(), std::inserter(clash, clash.end()));
        if (!clash.empty()) {
          report(p.bodies[j].loc(), path, Clause::ParallelComposition,
                 "components " + std::to_string(i) + " and " + std::to_string(j) +
                     " share output variable(s) " + join(clash));
        }
      }
    }
    for (std::size_t i = 0; i < p.bodies.size(); ++i) check(p.bodies[i], available, child(path, i));
  }

  void check_sequential(const Sequential& s, const ChannelVarSet& available,
                        const std::string& path) {
    ChannelVarSet scope = available;
    std::set<std::string> assigned;
    for (std::size_t i = 0; i < s.parts.size(); ++i) {
      const auto& part = s.parts[i];
      check(part, scope, child(path, i));
      const auto ov = output_vars(part);
      std::set<std::string> clash;
      std::set_intersection(ov.begin(), ov.end(), assigned.begin(), assigned.end(),
                            std::inserter(clash, clash.end()));
      if (!clash.empty()) {
        report(part.loc(), child(path, i), Clause::SequentialComposition,
               "output variable(s) " + join(clash) +
                   " assigned by more than one component of a sequential composition");
      }
      assigned.insert(ov.begin(), ov.end());
      scope.insert(ov.begin(), ov.end());
    }
  }

  const ChannelVarSet& external_;
  std::set<std::string> program_outputs_;
  std::set<std::string> dynamic_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> well_formed(const Rule& r, const ChannelVarSet& external) {
  Checker checker(r, external);
  checker.check(r, external, "body");
  return checker.take();
}

std::vector<Diagnostic> check_input(const InputDecl& decl, const GateLibrary* library) {
  std::vector<Diagnostic> diags;
  auto report = [&](Loc loc, std::string msg) {
    Diagnostic d;
    d.message = std::move(msg);
    d.line = loc.line;
    d.column = loc.column;
    d.clause = Clause::InputDeclaration;
    diags.push_back(std::move(d));
  };
  std::set<std::int64_t> used;
  for (const auto& c : decl.conjuncts) {
    if (c.binder) {
      report(c.loc, "forall in input declaration must be elaborated before checking");
      continue;
    }
    std::optional<int> arity;
    if (c.state.kind == StateRef::Kind::Ket) {
      arity = static_cast<int>(c.state.bits.size());
    } else if (library) {
      arity = library->state_width(c.state.name);
      if (!arity) report(c.loc, "unknown state " + c.state.name);
    } else {
      arity = named_state_width(c.state.name);
    }
    if (arity && *arity != static_cast<int>(c.wires.size())) {
      report(c.loc, "state has " + std::to_string(*arity) + " qubit(s) but is placed on " +
                        std::to_string(c.wires.size()) + " wire(s)");
    }
    std::set<std::int64_t> wires;
    for (const auto& w : c.wires) {
      if (!w.is_int() || w.value < 1) {
        report(c.loc, "input wires must be positive compile-time integers");
        continue;
      }
      if (!wires.insert(w.value).second) {
        report(c.loc, "wire " + std::to_string(w.value) + " repeated in an input wire list");
        continue;
      }
      if (!used.insert(w.value).second) {
        report(c.loc, "wire " + std::to_string(w.value) + " initialized by more than one conjunct");
      }
    }
  }
  return diags;
}

}  // namespace qcasm
