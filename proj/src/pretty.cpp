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

#include "json.hpp"
#include "qcasm/parser.hpp"

namespace qcasm {

namespace {

using Op = Expr::Op;

// Binding strength, loosest first.
enum Level { kRange = 0, kOr = 1, kAnd, kNot, kCmp, kArith, kTerm, kUnary, kPow, kPrimary };

int level(const Expr& e) {
  switch (e.op) {
    case Op::Int:
      return e.value < 0 ? kUnary : kPrimary;
    case Op::Bool:
    case Op::Var:
    case Op::Call:
      return kPrimary;
    case Op::Range:
      return kRange;
    case Op::Neg:
      return kUnary;
    case Op::Not:
      return kNot;
    case Op::Add:
    case Op::Sub:
    case Op::Xor:
      return kArith;
    case Op::Mul:
    case Op::Div:
    case Op::Mod:
      return kTerm;
    case Op::Pow:
      return kPow;
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
      return kCmp;
    case Op::And:
      return kAnd;
    case Op::Or:
      return kOr;
  }
  return kPrimary;
}

const char* op_text(Op op) {
  switch (op) {
    case Op::Add:
      return " + ";
    case Op::Sub:
      return " - ";
    case Op::Xor:
      return " xor ";
    case Op::Mul:
      return " * ";
    case Op::Div:
      return " / ";
    case Op::Mod:
      return " mod ";
    case Op::Pow:
      return "^";
    case Op::Eq:
      return " = ";
    case Op::Ne:
      return " != ";
    case Op::Lt:
      return " < ";
    case Op::Le:
      return " <= ";
    case Op::Gt:
      return " > ";
    case Op::Ge:
      return " >= ";
    case Op::And:
      return " and ";
    case Op::Or:
      return " or ";
    case Op::Range:
      return "..";
    default:
      return "?";
  }
}

void print(const Expr& e, int min_level, std::string& out);

// Gate wire lists admit a bare range; argument lists do not.
void print_list(const std::vector<Expr>& list, std::string& out, int min_level = kOr) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ", ";
    print(list[i], min_level, out);
  }
}

void print_inner(const Expr& e, std::string& out) {
  switch (e.op) {
    case Op::Int:
      out += std::to_string(e.value);
      return;
    case Op::Bool:
      out += e.value ? "true" : "false";
      return;
    case Op::Var:
      out += e.name;
      return;
    case Op::Call:
      out += e.name;
      out += "(";
      print_list(e.args, out);
      out += ")";
      return;
    case Op::Neg:
      out += "-";
      if (e.args[0].op == Op::Int) {
        out += "(" + std::to_string(e.args[0].value) + ")";
      } else {
        print(e.args[0], kUnary, out);
      }
      return;
    case Op::Not:
      out += "not ";
      print(e.args[0], kNot, out);
      return;
    case Op::Pow:
      print(e.args[0], kPrimary, out);
      out += "^";
      print(e.args[1], kUnary, out);
      return;
    case Op::Range:
      print(e.args[0], kOr, out);
      out += "..";
      print(e.args[1], kOr, out);
      return;
    default: {
      const int l = level(e);
      // Comparisons do not associate; other binary operators are left
      // associative.
      const int left = l == kCmp ? kArith : l;
      const int right = l == kCmp ? kArith : l + 1;
      print(e.args[0], left, out);
      out += op_text(e.op);
      print(e.args[1], right, out);
    }
  }
}

void print(const Expr& e, int min_level, std::string& out) {
  if (level(e) < min_level) {
    out += "(";
    print_inner(e, out);
    out += ")";
  } else {
    print_inner(e, out);
  }
}

std::string expr_at(const Expr& e, int min_level) {
  std::string s;
  print(e, min_level, s);
  return s;
}

bool simple_subscript(const Expr& e) {
  if (e.op == Op::Int) return e.value >= 0;
  if (e.op != Op::Var) return false;
  return e.name.find('_') == std::string::npos && e.name != "pow" && !is_keyword(e.name);
}

std::string wires_text(const std::vector<Expr>& wires) {
  std::string s = "(";
  print_list(wires, s, kRange);
  return s + ")";
}

std::string gate_branch(const std::string& out, bool explicit_output, const MeasurementExpr& m,
                        const std::vector<Expr>& wires) {
  std::string s;
  if (!out.empty()) {
    s = out + " := ";
  } else if (explicit_output) {
    s = "output ";
  }
  return s + pretty(m) + wires_text(wires);
}

// Syntactic position: a whole sequence, a `||` operand list, a single `||`
// operand, or a conditional branch.
enum class Ctx { Seq, Par, Patom, Branch };

std::string rule_text(const Rule& r, Ctx ctx);

std::string braced(const Rule& r) { return "{" + rule_text(r, Ctx::Seq) + "}"; }

std::string domain_text(const Domain& d) {
  if (d.is_range()) return "[" + expr_at(*d.lo, kOr) + ", " + expr_at(*d.hi, kOr) + "]";
  std::string s = "{";
  print_list(d.elements, s);
  return s + "}";
}

std::string binder_text(const Binder& b) { return "forall " + b.var + " in " + domain_text(b.domain) + ": "; }

std::string cond_text(const std::vector<Expr>& guards, const std::vector<std::string>& branches) {
  std::string s;
  for (std::size_t i = 0; i < guards.size(); ++i) {
    s += i == 0 ? "if " : " elseif ";
    s += expr_at(guards[i], kOr) + " then " + branches[i];
  }
  if (branches.size() > guards.size()) s += " else " + branches.back();
  return s;
}

std::string rule_text(const Rule& r, Ctx ctx) {
  if (const auto* g = r.as<GateRule>()) {
    std::vector<std::string> branches;
    for (const auto& m : g->branches) branches.push_back(gate_branch(g->out, g->explicit_output, m, g->wires));
    if (g->guards.empty()) {
      // An unguarded rule always has one branch; anything else is malformed.
      return branches.empty() ? "skip" : branches.front();
    }
    std::string s = cond_text(g->guards, branches);
    return ctx == Ctx::Branch ? "{" + s + "}" : s;
  }
  if (const auto* a = r.as<ClassicalAssign>()) {
    std::string s = a->target;
    if (a->index) s += "(" + expr_at(*a->index, kOr) + ")";
    const bool gate_like = (a->value.op == Op::Var || a->value.op == Op::Call) && is_gate_name(a->value.name);
    return s + " := " + (gate_like ? "(" + expr_at(a->value, kOr) + ")" : expr_at(a->value, kOr));
  }
  if (const auto* c = r.as<ClassicalCond>()) {
    std::vector<std::string> branches;
    for (const auto& b : c->branches) {
      // Bare gates would merge into a gate rule; nested conditionals would
      // capture a trailing else.
      const bool plain = b.as<ClassicalAssign>() || b.as<Skip>();
      branches.push_back(plain ? rule_text(b, Ctx::Branch) : braced(b));
    }
    std::string s = cond_text(c->guards, branches);
    return ctx == Ctx::Branch ? "{" + s + "}" : s;
  }
  if (const auto* p = r.as<Parallel>()) {
    if (p->binder) {
      std::string s = binder_text(*p->binder) + (p->bodies.empty() ? "skip" : rule_text(p->bodies.front(), Ctx::Patom));
      return ctx == Ctx::Branch ? "{" + s + "}" : s;
    }
    if (p->bodies.empty()) return "skip";
    if (p->bodies.size() == 1) return braced(p->bodies.front());
    std::string s;
    for (std::size_t i = 0; i < p->bodies.size(); ++i) {
      if (i) s += " || ";
      const Rule& b = p->bodies[i];
      const auto* bp = b.as<Parallel>();
      s += (bp && !bp->binder) ? braced(b) : rule_text(b, Ctx::Patom);
    }
    return ctx == Ctx::Seq || ctx == Ctx::Par ? s : "{" + s + "}";
  }
  if (const auto* q = r.as<Sequential>()) {
    if (q->parts.empty()) return "skip";
    if (q->parts.size() == 1) return braced(q->parts.front());
    std::string s;
    for (std::size_t i = 0; i < q->parts.size(); ++i) {
      if (i) s += "; ";
      const Rule& b = q->parts[i];
      s += b.as<Sequential>() ? braced(b) : rule_text(b, Ctx::Par);
    }
    return ctx == Ctx::Seq ? s : "{" + s + "}";
  }
  if (const auto* l = r.as<ForLoop>()) {
    return "for " + l->var + " = " + expr_at(l->lo, kArith) + " to " + expr_at(l->hi, kArith) + ": " +
           (l->body.empty() ? "skip" : rule_text(l->body.front(), Ctx::Patom));
  }
  return "skip";
}

std::string state_text(const StateRef& s) {
  if (s.kind == StateRef::Kind::Named) return s.name;
  bool ground = !s.bits.empty();
  for (const auto& b : s.bits) ground = ground && b.op == Op::Int && (b.value == 0 || b.value == 1);
  if (ground) {
    std::string bits;
    for (const auto& b : s.bits) bits += b.value ? '1' : '0';
    return "ket " + bits;
  }
  std::string out = "ket(";
  print_list(s.bits, out);
  return out + ")";
}

std::string conjunct_text(const InputConjunct& c) {
  std::string s;
  if (c.binder) s += binder_text(*c.binder);
  s += state_text(c.state) + " on ";
  for (std::size_t i = 0; i < c.wires.size(); ++i) {
    if (i) s += ", ";
    const Expr& w = c.wires[i];
    if (w.op == Op::Range) {
      s += expr_at(w.args[0], kArith) + ".." + expr_at(w.args[1], kArith);
    } else {
      s += expr_at(w, kArith);
    }
  }
  return c.braced ? "{" + s + "}" : s;
}

// Top-level sequences print one component per line.
std::string body_text(const Rule& r) {
  const auto* q = r.as<Sequential>();
  if (!q || q->parts.size() < 2) return rule_text(r, Ctx::Seq);
  std::string s;
  for (std::size_t i = 0; i < q->parts.size(); ++i) {
    if (i) s += ";\n";
    const Rule& b = q->parts[i];
    s += b.as<Sequential>() ? braced(b) : rule_text(b, Ctx::Par);
  }
  return s;
}

using json = nlohmann::ordered_json;

json expr_json(const Expr& e) {
  static const char* kNames[] = {"int", "bool", "var", "call", "range", "neg", "not", "add", "sub", "xor", "mul",
                                 "div", "mod",  "pow", "eq",   "ne",    "lt",  "le",  "gt",  "ge",  "and", "or"};
  json j;
  j["op"] = kNames[static_cast<int>(e.op)];
  if (e.op == Op::Int) j["value"] = e.value;
  if (e.op == Op::Bool) j["value"] = e.value != 0;
  if (!e.name.empty()) j["name"] = e.name;
  if (!e.args.empty()) {
    j["args"] = json::array();
    for (const auto& a : e.args) j["args"].push_back(expr_json(a));
  }
  return j;
}

json exprs_json(const std::vector<Expr>& list) {
  json j = json::array();
  for (const auto& e : list) j.push_back(expr_json(e));
  return j;
}

json loc_json(Loc l) { return json::array({l.line, l.column}); }

json rule_json(const Rule& r) {
  json j;
  if (const auto* g = r.as<GateRule>()) {
    j["kind"] = "gate";
    j["out"] = g->out;
    if (g->explicit_output) j["output"] = true;
    j["guards"] = exprs_json(g->guards);
    j["branches"] = json::array();
    for (const auto& m : g->branches) {
      json b;
      b["name"] = m.name;
      b["subscripts"] = exprs_json(m.subscripts);
      if (m.power_log2) b["power_log2"] = expr_json(*m.power_log2);
      if (m.phase) b["phase"] = expr_json(*m.phase);
      j["branches"].push_back(std::move(b));
    }
    j["wires"] = exprs_json(g->wires);
  } else if (const auto* a = r.as<ClassicalAssign>()) {
    j["kind"] = "assign";
    j["target"] = a->target;
    if (a->index) j["index"] = expr_json(*a->index);
    j["value"] = expr_json(a->value);
  } else if (const auto* c = r.as<ClassicalCond>()) {
    j["kind"] = "cond";
    j["guards"] = exprs_json(c->guards);
    j["branches"] = json::array();
    for (const auto& b : c->branches) j["branches"].push_back(rule_json(b));
  } else if (const auto* p = r.as<Parallel>()) {
    j["kind"] = "parallel";
    if (p->binder) {
      j["var"] = p->binder->var;
      j["domain"] = domain_text(p->binder->domain);
    }
    j["bodies"] = json::array();
    for (const auto& b : p->bodies) j["bodies"].push_back(rule_json(b));
  } else if (const auto* q = r.as<Sequential>()) {
    j["kind"] = "sequential";
    j["parts"] = json::array();
    for (const auto& b : q->parts) j["parts"].push_back(rule_json(b));
  } else if (const auto* l = r.as<ForLoop>()) {
    j["kind"] = "for";
    j["var"] = l->var;
    j["lo"] = expr_json(l->lo);
    j["hi"] = expr_json(l->hi);
    j["body"] = l->body.empty() ? json() : rule_json(l->body.front());
  } else {
    j["kind"] = "skip";
  }
  j["loc"] = loc_json(r.loc());
  return j;
}

}  // namespace

std::string pretty(const Expr& e) { return expr_at(e, kRange); }

std::string pretty(const MeasurementExpr& m) {
  std::string s;
  if (m.phase) {
    const Expr& ph = *m.phase;
    const bool bare = (ph.op == Op::Int && ph.value >= 0) || ph.op == Op::Var || ph.op == Op::Call;
    s += "(-1)^" + (bare ? expr_at(ph, kPrimary) : "(" + expr_at(ph, kOr) + ")") + " ";
  }
  s += m.name;
  bool simple = true;
  for (const auto& e : m.subscripts) simple = simple && simple_subscript(e);
  if (simple) {
    for (const auto& e : m.subscripts) s += "_" + expr_at(e, kPrimary);
  } else {
    s += "_(";
    print_list(m.subscripts, s);
    s += ")";
  }
  if (m.power_log2) s += "_pow(" + expr_at(*m.power_log2, kOr) + ")";
  return s;
}

std::string pretty(const Rule& r) { return rule_text(r, Ctx::Seq); }

std::string pretty(const Program& p) {
  std::string s;
  for (const auto& d : p.params) {
    s += "param " + d.name;
    if (d.default_value) s += " = " + expr_at(*d.default_value, kArith);
    s += "\n";
  }
  if (p.input) {
    for (std::size_t i = 0; i < p.input->conjuncts.size(); ++i) {
      if (i) s += " and ";
      s += conjunct_text(p.input->conjuncts[i]);
    }
    s += ";\n";
  }
  return s + body_text(p.body) + "\n";
}

std::string ast_json(const Program& p, int indent) {
  json j;
  j["params"] = json::array();
  for (const auto& d : p.params) {
    json pj;
    pj["name"] = d.name;
    if (d.default_value) pj["default"] = expr_json(*d.default_value);
    j["params"].push_back(std::move(pj));
  }
  if (p.input) {
    j["input"] = json::array();
    for (const auto& c : p.input->conjuncts) {
      json cj;
      if (c.binder) {
        cj["var"] = c.binder->var;
        cj["domain"] = domain_text(c.binder->domain);
      }
      if (c.state.kind == StateRef::Kind::Named) {
        cj["state"] = c.state.name;
      } else {
        cj["ket"] = exprs_json(c.state.bits);
      }
      cj["wires"] = exprs_json(c.wires);
      cj["loc"] = loc_json(c.loc);
      j["input"].push_back(std::move(cj));
    }
  }
  j["body"] = rule_json(p.body);
  return j.dump(indent);
}

}  // namespace qcasm
