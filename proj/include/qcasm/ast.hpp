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
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qcasm/diagnostic.hpp"

namespace qcasm {

class GateLibrary;

// ---------------------------------------------------------------------------
// Classical expressions.

struct Expr {
  enum class Op {
    Int,
    Bool,
    Var,
    Call,   // name(args): classical builtin, dynamic function read, or misplaced measurement
    Range,  // a..b, only inside wire lists
    Neg,
    Not,
    Add,
    Sub,
    Xor,
    Mul,
    Div,
    Mod,
    Pow,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
  };

  Op op = Op::Int;
  std::int64_t value = 0;  // Int literal, or 0/1 for Bool
  std::string name;        // Var / Call
  std::vector<Expr> args;

  static Expr integer(std::int64_t v) { return Expr{Op::Int, v, {}, {}}; }
  static Expr boolean(bool v) { return Expr{Op::Bool, v ? 1 : 0, {}, {}}; }
  static Expr var(std::string n) { return Expr{Op::Var, 0, std::move(n), {}}; }
  static Expr call(std::string n, std::vector<Expr> a) {
    return Expr{Op::Call, 0, std::move(n), std::move(a)};
  }
  static Expr unary(Op op, Expr a) { return Expr{op, 0, {}, {std::move(a)}}; }
  static Expr binary(Op op, Expr a, Expr b) { return Expr{op, 0, {}, {std::move(a), std::move(b)}}; }

  bool is_int() const { return op == Op::Int; }
  bool is_literal() const { return op == Op::Int || op == Op::Bool; }

  friend bool operator==(const Expr&, const Expr&) = default;
};

using Value = std::variant<std::int64_t, bool>;
using Store = std::map<std::string, Value, std::less<>>;

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluates a closed expression; `vars` supplies every variable. Dynamic
/// function reads look up "name(arg)" keys.
Value evaluate(const Expr& e, const Store& vars);
std::int64_t evaluate_int(const Expr& e, const Store& vars);
bool evaluate_bool(const Expr& e, const Store& vars);

/// Substitutes bound names and folds constant subtrees.
Expr substitute_and_fold(const Expr& e, const Store& bindings);

/// Variable names read by `e` (Var nodes and dynamic-function names).
void collect_vars(const Expr& e, std::set<std::string>& out);

/// Names of classical builtins usable as Call expressions.
bool is_builtin_function(const std::string& name);

/// Gate-shaped identifiers start with an uppercase letter, optionally
/// prefixed by 'c' (controlled).
bool is_gate_name(const std::string& name);

/// Expressions naming a measurement (gate-shaped Var or Call).
bool contains_measurement(const Expr& e);

std::string to_string(const Value& v);

// ---------------------------------------------------------------------------
// Rules.

/// Source position; does not participate in structural equality.
struct Loc {
  int line = 0;
  int column = 0;
  friend bool operator==(const Loc&, const Loc&) { return true; }
};

/// Measurement expression: a gate name with compile-time subscripts, an
/// optional power 2^e, and an optional (-1)^e phase.
struct MeasurementExpr {
  std::string name;
  std::vector<Expr> subscripts;
  std::optional<Expr> power_log2;
  std::optional<Expr> phase;

  friend bool operator==(const MeasurementExpr&, const MeasurementExpr&) = default;
};

/// Guarded gate assignment. `branches` has guards.size() + 1 entries when an
/// else branch is present, guards.size() entries otherwise (identity else).
struct GateRule {
  std::vector<Expr> guards;
  std::vector<MeasurementExpr> branches;
  std::vector<Expr> wires;
  std::string out;  // empty: anonymous output
  bool explicit_output = false;
  Loc loc;

  bool has_else() const { return branches.size() == guards.size() + 1; }
  friend bool operator==(const GateRule&, const GateRule&) = default;
};

struct ClassicalAssign {
  std::string target;
  std::optional<Expr> index;  // unary dynamic function f(index) := value
  Expr value;
  Loc loc;
  friend bool operator==(const ClassicalAssign&, const ClassicalAssign&) = default;
};

struct Rule;

struct ClassicalCond {
  std::vector<Expr> guards;
  std::vector<Rule> branches;  // guards.size() or guards.size() + 1
  Loc loc;
  friend bool operator==(const ClassicalCond&, const ClassicalCond&);
};

struct Domain {
  std::optional<Expr> lo, hi;  // [lo, hi]
  std::vector<Expr> elements;  // {e1, ..., ek} when lo/hi are absent
  bool is_range() const { return lo.has_value(); }
  friend bool operator==(const Domain&, const Domain&) = default;
};

struct Binder {
  std::string var;
  Domain domain;
  friend bool operator==(const Binder&, const Binder&) = default;
};

/// `forall var in D: body` when binder is set (exactly one body), otherwise
/// R1 || R2 || ... .
struct Parallel {
  std::optional<Binder> binder;
  std::vector<Rule> bodies;
  Loc loc;
  friend bool operator==(const Parallel&, const Parallel&);
};

struct Sequential {
  std::vector<Rule> parts;
  Loc loc;
  friend bool operator==(const Sequential&, const Sequential&);
};

/// for var = lo to hi: body; removed by elaboration.
struct ForLoop {
  std::string var;
  Expr lo, hi;
  std::vector<Rule> body;  // exactly one element
  Loc loc;
  friend bool operator==(const ForLoop&, const ForLoop&);
};

struct Skip {
  Loc loc;
  friend bool operator==(const Skip&, const Skip&) = default;
};

struct Rule {
  std::variant<GateRule, ClassicalAssign, ClassicalCond, Parallel, Sequential, ForLoop, Skip> node;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  T* as() {
    return std::get_if<T>(&node);
  }
  Loc loc() const;
  friend bool operator==(const Rule&, const Rule&) = default;
};

inline bool operator==(const ClassicalCond& a, const ClassicalCond& b) {
  return a.guards == b.guards && a.branches == b.branches;
}
inline bool operator==(const Parallel& a, const Parallel& b) {
  return a.binder == b.binder && a.bodies == b.bodies;
}
inline bool operator==(const Sequential& a, const Sequential& b) { return a.parts == b.parts; }
inline bool operator==(const ForLoop& a, const ForLoop& b) {
  return a.var == b.var && a.lo == b.lo && a.hi == b.hi && a.body == b.body;
}

// ---------------------------------------------------------------------------
// Programs.

struct StateRef {
  enum class Kind { Ket, Named };
  Kind kind = Kind::Ket;
  std::vector<Expr> bits;  // Ket: one expression per qubit
  std::string name;        // Named
  friend bool operator==(const StateRef&, const StateRef&) = default;
};

struct InputConjunct {
  std::optional<Binder> binder;  // forall var in D: state on wires
  bool braced = false;
  StateRef state;
  std::vector<Expr> wires;
  Loc loc;
  friend bool operator==(const InputConjunct&, const InputConjunct&) = default;
};

struct InputDecl {
  std::vector<InputConjunct> conjuncts;
  friend bool operator==(const InputDecl&, const InputDecl&) = default;
};

struct ParamDecl {
  std::string name;
  std::optional<Expr> default_value;
  friend bool operator==(const ParamDecl&, const ParamDecl&) = default;
};

struct Program {
  std::vector<ParamDecl> params;
  std::optional<InputDecl> input;
  Rule body{Skip{}};
  friend bool operator==(const Program&, const Program&) = default;
};

using Bindings = std::map<std::string, std::int64_t, std::less<>>;

// ---------------------------------------------------------------------------
// Structural attributes (ground rules).

std::set<int> wire_set(const Rule& r);
std::set<std::string> output_vars(const Rule& r);
/// Gate rules contained in `r` in program order.
std::vector<const GateRule*> gate_subrules(const Rule& r);
/// True when `r` contains no gate rules (and so no quantum expressions).
bool is_classical(const Rule& r);
/// Every variable name occurring anywhere in `r` (guards, values, targets).
std::set<std::string> occurring_vars(const Rule& r);
/// Integer value of a ground wire expression.
int wire_value(const Expr& e);

// ---------------------------------------------------------------------------
// Checking and elaboration.

using ChannelVarSet = std::set<std::string>;

/// Diagnoses violations of the rule-formation conditions; empty means ok.
std::vector<Diagnostic> well_formed(const Rule& r, const ChannelVarSet& external = {});

/// Input declarations: wire lists disjoint, state arity matching.
std::vector<Diagnostic> check_input(const InputDecl& decl, const GateLibrary* library);

class ElaborationError : public std::runtime_error {
 public:
  ElaborationError(const std::string& what, Loc loc) : std::runtime_error(what), loc_(loc) {}
  Loc loc() const { return loc_; }

 private:
  Loc loc_;
};

/// Substitutes parameters, unrolls loops, expands binders and sugar. The
/// result has no parameters and only ground wire/subscript expressions.
Program elaborate(const Program& p, const Bindings& bindings = {});

inline constexpr const char* kFreshPrefix = "__out_";

}  // namespace qcasm
