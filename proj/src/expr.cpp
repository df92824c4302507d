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

#include <cctype>
#include <cmath>
#include <numbers>

#include "qcasm/ast.hpp"

namespace qcasm {

namespace {

using Op = Expr::Op;

std::int64_t as_int(const Value& v, const char* what) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw EvalError(std::string(what) + " expects an integer operand");
}

bool as_bool(const Value& v, const char* what) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  throw EvalError(std::string(what) + " expects a boolean operand");
}

std::int64_t checked(bool overflow, std::int64_t v) {
  if (overflow) throw EvalError("integer overflow");
  return v;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  if (b == 0) throw EvalError("division by zero");
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t euclid_mod(std::int64_t a, std::int64_t b) {
  if (b == 0) throw EvalError("mod by zero");
  std::int64_t r = a % b;
  if (r < 0) r += (b < 0 ? -b : b);
  return r;
}

std::int64_t int_pow(std::int64_t base, std::int64_t exp) {
  if (exp < 0) throw EvalError("negative exponent");
  if (base == 0) return exp == 0 ? 1 : 0;
  if (base == 1) return 1;
  if (base == -1) return exp % 2 == 0 ? 1 : -1;
  std::int64_t result = 1;
  for (std::int64_t i = 0; i < exp; ++i) {
    if (__builtin_mul_overflow(result, base, &result)) throw EvalError("integer overflow in power");
  }
  return result;
}

// floor((pi/4) * sqrt(N)) for N a power of two, in extended precision.
std::int64_t grover_rounds(std::int64_t n) {
  if (n < 1 || (n & (n - 1)) != 0) throw EvalError("grover_rounds(N) requires N a power of two");
  const long double x = std::numbers::pi_v<long double> / 4.0L * std::sqrt(static_cast<long double>(n));
  return static_cast<std::int64_t>(std::floor(x));
}

Value call_builtin(const std::string& name, const std::vector<Value>& args) {
  if (name == "grover_rounds") {
    if (args.size() != 1) throw EvalError("grover_rounds takes one argument");
    return grover_rounds(as_int(args[0], "grover_rounds"));
  }
  if (name == "min" || name == "max") {
    if (args.size() != 2) throw EvalError(name + " takes two arguments");
    const auto a = as_int(args[0], name.c_str());
    const auto b = as_int(args[1], name.c_str());
    return name == "min" ? std::min(a, b) : std::max(a, b);
  }
  throw EvalError("unknown function " + name);
}

Value apply_op(Op op, const std::vector<Value>& a) {
  switch (op) {
    case Op::Neg: {
      std::int64_t r = 0;
      const bool overflow = __builtin_sub_overflow(std::int64_t{0}, as_int(a[0], "-"), &r);
      return checked(overflow, r);
    }
    case Op::Not:
      return !as_bool(a[0], "not");
    case Op::Add: {
      std::int64_t r = 0;
      const bool overflow = __builtin_add_overflow(as_int(a[0], "+"), as_int(a[1], "+"), &r);
      return checked(overflow, r);
    }
    case Op::Sub: {
      std::int64_t r = 0;
      const bool overflow = __builtin_sub_overflow(as_int(a[0], "-"), as_int(a[1], "-"), &r);
      return checked(overflow, r);
    }
    case Op::Mul: {
      std::int64_t r = 0;
      const bool overflow = __builtin_mul_overflow(as_int(a[0], "*"), as_int(a[1], "*"), &r);
      return checked(overflow, r);
    }
    case Op::Xor:
      return as_int(a[0], "xor") ^ as_int(a[1], "xor");
    case Op::Div:
      return floor_div(as_int(a[0], "/"), as_int(a[1], "/"));
    case Op::Mod:
      return euclid_mod(as_int(a[0], "mod"), as_int(a[1], "mod"));
    case Op::Pow:
      return int_pow(as_int(a[0], "^"), as_int(a[1], "^"));
    case Op::Eq:
    case Op::Ne: {
      if (a[0].index() != a[1].index()) throw EvalError("comparison of integer with boolean");
      const bool eq = a[0] == a[1];
      return op == Op::Eq ? eq : !eq;
    }
    case Op::Lt:
      return as_int(a[0], "<") < as_int(a[1], "<");
    case Op::Le:
      return as_int(a[0], "<=") <= as_int(a[1], "<=");
    case Op::Gt:
      return as_int(a[0], ">") > as_int(a[1], ">");
    case Op::Ge:
      return as_int(a[0], ">=") >= as_int(a[1], ">=");
    case Op::And:
      return as_bool(a[0], "and") && as_bool(a[1], "and");
    case Op::Or:
      return as_bool(a[0], "or") || as_bool(a[1], "or");
    default:
      throw EvalError("operator cannot be applied");
  }
}

Expr literal(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return Expr::boolean(*b);
  return Expr::integer(std::get<std::int64_t>(v));
}

Value literal_value(const Expr& e) {
  if (e.op == Op::Bool) return e.value != 0;
  return e.value;
}

}  // namespace

bool is_builtin_function(const std::string& name) {
  return name == "grover_rounds" || name == "min" || name == "max";
}

bool is_gate_name(const std::string& name) {
  if (name.empty()) return false;
  auto upper = [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; };
  return upper(name[0]) || (name.size() > 1 && name[0] == 'c' && upper(name[1]));
}

bool contains_measurement(const Expr& e) {
  if ((e.op == Op::Var || e.op == Op::Call) && is_gate_name(e.name)) return true;
  for (const auto& a : e.args) {
    if (contains_measurement(a)) return true;
  }
  return false;
}

std::string to_string(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return std::to_string(std::get<std::int64_t>(v));
}

Value evaluate(const Expr& e, const Store& vars) {
  switch (e.op) {
    case Op::Int:
      return e.value;
    case Op::Bool:
      return e.value != 0;
    case Op::Var: {
      if (is_gate_name(e.name)) throw EvalError("measurement " + e.name + " used as a value");
      auto it = vars.find(e.name);
      if (it == vars.end()) throw EvalError("unbound variable " + e.name);
      return it->second;
    }
    case Op::Call: {
      if (is_gate_name(e.name)) throw EvalError("measurement " + e.name + " used as a value");
      std::vector<Value> args;
      for (const auto& a : e.args) args.push_back(evaluate(a, vars));
      if (is_builtin_function(e.name)) return call_builtin(e.name, args);
      if (args.size() != 1) throw EvalError("dynamic function " + e.name + " is unary");
      const std::string key = e.name + "(" + to_string(args[0]) + ")";
      auto it = vars.find(key);
      if (it == vars.end()) throw EvalError("undefined location " + key);
      return it->second;
    }
    case Op::Range:
      throw EvalError("range used outside a wire list");
    case Op::And: {
      if (!as_bool(evaluate(e.args[0], vars), "and")) return false;
      return as_bool(evaluate(e.args[1], vars), "and");
    }
    case Op::Or: {
      if (as_bool(evaluate(e.args[0], vars), "or")) return true;
      return as_bool(evaluate(e.args[1], vars), "or");
    }
    default: {
      std::vector<Value> args;
      for (const auto& a : e.args) args.push_back(evaluate(a, vars));
      return apply_op(e.op, args);
    }
  }
}

std::int64_t evaluate_int(const Expr& e, const Store& vars) {
  return as_int(evaluate(e, vars), "integer context");
}

bool evaluate_bool(const Expr& e, const Store& vars) {
  return as_bool(evaluate(e, vars), "guard");
}

Expr substitute_and_fold(const Expr& e, const Store& bindings) {
  if (e.op == Op::Var) {
    if (auto it = bindings.find(e.name); it != bindings.end()) return literal(it->second);
    return e;
  }
  Expr out = e;
  bool all_literal = true;
  for (auto& a : out.args) {
    a = substitute_and_fold(a, bindings);
    all_literal = all_literal && a.is_literal();
  }
  const bool foldable =
      all_literal && !out.is_literal() && out.op != Op::Range &&
      (out.op != Op::Call || is_builtin_function(out.name));
  if (!foldable) return out;
  std::vector<Value> args;
  for (const auto& a : out.args) args.push_back(literal_value(a));
  if (out.op == Op::Call) return literal(call_builtin(out.name, args));
  return literal(apply_op(out.op, args));
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
  if (e.op == Op::Var || (e.op == Op::Call && !is_builtin_function(e.name))) out.insert(e.name);
  for (const auto& a : e.args) collect_vars(a, out);
}

}  // namespace qcasm
