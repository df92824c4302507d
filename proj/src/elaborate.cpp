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

#include <set>

#include "qcasm/ast.hpp"
#include "qcasm/qmath.hpp"

namespace qcasm {

namespace {

using Op = Expr::Op;

// Domains and bounds larger than this are certainly mistakes.
constexpr std::int64_t kMaxUnroll = 1 << 20;

class Elaborator {
 public:
  explicit Elaborator(Store env) : env_(std::move(env)) {}

  Rule rule(const Rule& r) {
    if (const auto* g = r.as<GateRule>()) return Rule{gate(*g)};
    if (const auto* a = r.as<ClassicalAssign>()) return Rule{assign(*a)};
    if (const auto* c = r.as<ClassicalCond>()) {
      ClassicalCond out{{}, {}, c->loc};
      for (const auto& e : c->guards) out.guards.push_back(fold(e, c->loc));
      for (const auto& b : c->branches) out.branches.push_back(rule(b));
      return Rule{std::move(out)};
    }
    if (const auto* p = r.as<Parallel>()) return parallel(*p);
    if (const auto* s = r.as<Sequential>()) {
      Sequential out{{}, s->loc};
      for (const auto& part : s->parts) out.parts.push_back(rule(part));
      return Rule{std::move(out)};
    }
    if (const auto* l = r.as<ForLoop>()) return loop(*l);
    return r;
  }

  InputDecl input(const InputDecl& d) {
    InputDecl out;
    for (const auto& c : d.conjuncts) {
      if (!c.binder) {
        out.conjuncts.push_back(conjunct(c));
        continue;
      }
      for (std::int64_t v : domain(c.binder->domain, c.loc)) {
        Scope scope(env_, c.binder->var, v);
        out.conjuncts.push_back(conjunct(c));
      }
    }
    return out;
  }

 private:
  // Binds a compile-time variable for the duration of a scope.
  class Scope {
   public:
    Scope(Store& env, const std::string& name, std::int64_t v) : env_(env), name_(name) {
      if (auto it = env.find(name); it != env.end()) saved_ = it->second;
      env[name] = v;
    }
    ~Scope() {
      if (saved_) {
        env_[name_] = *saved_;
      } else {
        env_.erase(name_);
      }
    }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Store& env_;
    std::string name_;
    std::optional<Value> saved_;
  };

  Expr fold(const Expr& e, Loc loc) const {
    try {
      return substitute_and_fold(e, env_);
    } catch (const EvalError& err) {
      throw ElaborationError(err.what(), loc);
    }
  }

  std::int64_t constant(const Expr& e, Loc loc, const char* what) const {
    Expr f = fold(e, loc);
    if (!f.is_int()) throw ElaborationError(std::string(what) + " is not a compile-time integer", loc);
    return f.value;
  }

  std::vector<std::int64_t> range(std::int64_t lo, std::int64_t hi, Loc loc) const {
    std::vector<std::int64_t> out;
    if (hi < lo) return out;
    if (hi - lo >= kMaxUnroll) throw ElaborationError("range too large to unroll", loc);
    for (std::int64_t v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }

  std::vector<std::int64_t> domain(const Domain& d, Loc loc) const {
    if (d.is_range()) {
      return range(constant(*d.lo, loc, "range bound"), constant(*d.hi, loc, "range bound"), loc);
    }
    std::vector<std::int64_t> out;
    std::set<std::int64_t> seen;
    for (const auto& e : d.elements) {
      const auto v = constant(e, loc, "set element");
      if (seen.insert(v).second) out.push_back(v);
    }
    return out;
  }

  std::vector<Expr> wires(const std::vector<Expr>& in, Loc loc) const {
    std::vector<Expr> out;
    for (const auto& w : in) {
      if (w.op == Op::Range) {
        const auto lo = constant(w.args[0], loc, "wire range bound");
        const auto hi = constant(w.args[1], loc, "wire range bound");
        for (auto v : range(lo, hi, loc)) out.push_back(Expr::integer(v));
        continue;
      }
      out.push_back(Expr::integer(constant(w, loc, "wire")));
    }
    return out;
  }

  void check_not_bound(const std::string& name, Loc loc) const {
    if (env_.count(name)) {
      throw ElaborationError("cannot assign to compile-time name " + name, loc);
    }
  }

  MeasurementExpr measurement(const MeasurementExpr& m, Loc loc) const {
    MeasurementExpr out;
    out.name = m.name;
    for (const auto& s : m.subscripts) out.subscripts.push_back(Expr::integer(constant(s, loc, "subscript")));
    if (m.power_log2) {
      const auto e = constant(*m.power_log2, loc, "power exponent");
      if (e < 0) throw ElaborationError("negative power exponent", loc);
      out.power_log2 = Expr::integer(e);
    }
    if (m.phase) {
      Expr ph = fold(*m.phase, loc);
      if (ph.is_int()) {
        if (ph.value % 2 != 0) out.phase = Expr::integer(1);
      } else if (ph.op == Op::Bool) {
        throw ElaborationError("phase exponent must be an integer", loc);
      } else {
        out.phase = std::move(ph);
      }
    }
    return out;
  }

  GateRule gate(const GateRule& g) {
    check_not_bound(g.out, g.loc);
    GateRule out;
    out.loc = g.loc;
    out.out = g.out;
    out.explicit_output = g.explicit_output;
    out.wires = wires(g.wires, g.loc);

    std::vector<Expr> guards;
    std::vector<MeasurementExpr> branches;
    for (const auto& e : g.guards) guards.push_back(fold(e, g.loc));
    for (const auto& b : g.branches) branches.push_back(measurement(b, g.loc));
    if (branches.size() == guards.size()) {
      MeasurementExpr id{"I", {}, {}, {}};
      if (out.wires.size() > 1) id.subscripts.push_back(Expr::integer(static_cast<std::int64_t>(out.wires.size())));
      branches.push_back(std::move(id));
    }

    // (-1)^e M under guard g splits into [g and e mod 2 = 0 -> M], [g -> -M].
    for (std::size_t i = 0; i < branches.size(); ++i) {
      auto& m = branches[i];
      const bool is_else = i == guards.size();
      if (!m.phase || m.phase->is_int()) {
        if (!is_else) out.guards.push_back(guards[i]);
        out.branches.push_back(m);
        continue;
      }
      Expr even = Expr::binary(Op::Eq, Expr::binary(Op::Mod, *m.phase, Expr::integer(2)), Expr::integer(0));
      MeasurementExpr plain = m;
      plain.phase.reset();
      MeasurementExpr negated = m;
      negated.phase = Expr::integer(1);
      out.guards.push_back(is_else ? even : Expr::binary(Op::And, guards[i], even));
      out.branches.push_back(std::move(plain));
      if (!is_else) out.guards.push_back(guards[i]);
      out.branches.push_back(std::move(negated));
    }
    return out;
  }

  ClassicalAssign assign(const ClassicalAssign& a) {
    check_not_bound(a.target, a.loc);
    ClassicalAssign out{a.target, {}, fold(a.value, a.loc), a.loc};
    if (a.index) out.index = fold(*a.index, a.loc);
    return out;
  }

  Rule parallel(const Parallel& p) {
    if (!p.binder) {
      Parallel out{{}, {}, p.loc};
      for (const auto& b : p.bodies) out.bodies.push_back(rule(b));
      return Rule{std::move(out)};
    }
    std::vector<Rule> bodies;
    for (std::int64_t v : domain(p.binder->domain, p.loc)) {
      Scope scope(env_, p.binder->var, v);
      bodies.push_back(rule(p.bodies.front()));
    }
    if (bodies.empty()) return Rule{Skip{p.loc}};
    if (bodies.size() == 1) return std::move(bodies.front());
    return Rule{Parallel{{}, std::move(bodies), p.loc}};
  }

  Rule loop(const ForLoop& l) {
    const auto lo = constant(l.lo, l.loc, "loop bound");
    const auto hi = constant(l.hi, l.loc, "loop bound");
    std::vector<Rule> parts;
    for (std::int64_t v : range(lo, hi, l.loc)) {
      Scope scope(env_, l.var, v);
      parts.push_back(rule(l.body.front()));
    }
    if (parts.empty()) return Rule{Skip{l.loc}};
    if (parts.size() == 1) return std::move(parts.front());
    return Rule{Sequential{std::move(parts), l.loc}};
  }

  InputConjunct conjunct(const InputConjunct& c) const {
    InputConjunct out;
    out.loc = c.loc;
    out.state.kind = c.state.kind;
    out.state.name = c.state.name;
    for (const auto& b : c.state.bits) {
      const auto v = constant(b, c.loc, "ket bit");
      if (v != 0 && v != 1) throw ElaborationError("ket bit must be 0 or 1", c.loc);
      out.state.bits.push_back(Expr::integer(v));
    }
    out.wires = wires(c.wires, c.loc);
    return out;
  }

  Store env_;
};

void collect_all_names(const Rule& r, std::set<std::string>& out) {
  auto sub = occurring_vars(r);
  out.insert(sub.begin(), sub.end());
}

// Names anonymous guarded or `output` gates, in program order.
void name_outputs(Rule& r, const std::set<std::string>& taken, int& counter) {
  if (auto* g = r.as<GateRule>()) {
    if (g->out.empty() && (g->explicit_output || !g->guards.empty())) {
      std::string name;
      do {
        name = kFreshPrefix + std::to_string(++counter);
      } while (taken.count(name));
      g->out = std::move(name);
    }
    g->explicit_output = false;
    return;
  }
  if (auto* c = r.as<ClassicalCond>()) {
    for (auto& b : c->branches) name_outputs(b, taken, counter);
  } else if (auto* p = r.as<Parallel>()) {
    for (auto& b : p->bodies) name_outputs(b, taken, counter);
  } else if (auto* s = r.as<Sequential>()) {
    for (auto& b : s->parts) name_outputs(b, taken, counter);
  }
}

}  // namespace

Program elaborate(const Program& p, const Bindings& bindings) {
  for (const auto& [name, value] : bindings) {
    (void)value;
    bool declared = false;
    for (const auto& d : p.params) declared = declared || d.name == name;
    if (!declared) throw ElaborationError("unknown parameter " + name, Loc{});
  }
  Store env;
  for (const auto& d : p.params) {
    if (auto it = bindings.find(d.name); it != bindings.end()) {
      env[d.name] = it->second;
    } else if (d.default_value) {
      try {
        env[d.name] = evaluate_int(*d.default_value, env);
      } catch (const EvalError& e) {
        throw ElaborationError("default of parameter " + d.name + ": " + e.what(), Loc{});
      }
    } else {
      throw ElaborationError("unbound parameter " + d.name, Loc{});
    }
  }

  Elaborator elab(env);
  Program out;
  if (p.input) out.input = elab.input(*p.input);
  out.body = elab.rule(p.body);

  std::set<std::string> taken;
  collect_all_names(out.body, taken);
  int counter = 0;
  name_outputs(out.body, taken, counter);
  return out;
}

}  // namespace qcasm
