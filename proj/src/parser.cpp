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

#include <charconv>
#include <limits>

#include "qcasm/parser.hpp"

namespace qcasm {

namespace {

using Op = Expr::Op;
using Kind = Token::Kind;

// Counted in parser frames, several per nesting level.
constexpr int kMaxDepth = 1500;

struct Failure {
  Diagnostic diagnostic;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program program() {
    Program p;
    while (keyword("param")) {
      ParamDecl d;
      d.name = ident("parameter name");
      for (const auto& other : p.params) {
        if (other.name == d.name) fail(prev(), "parameter " + d.name + " declared twice");
      }
      if (symbol("=")) d.default_value = arith();
      p.params.push_back(std::move(d));
    }
    if (input_ahead()) {
      p.input = input();
      expect(";", "after the input declaration");
    }
    p.body = seq();
    if (peek().kind != Kind::End) fail(peek(), "unexpected " + describe(peek()));
    return p;
  }

 private:
  // -- token helpers --------------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& prev() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  bool is_symbol(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Kind::Symbol && peek(k).text == s;
  }
  bool is_keyword(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Kind::Keyword && peek(k).text == s;
  }
  bool symbol(std::string_view s) {
    if (!is_symbol(s)) return false;
    next();
    return true;
  }
  bool keyword(std::string_view s) {
    if (!is_keyword(s)) return false;
    next();
    return true;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Kind::End:
        return "end of input";
      case Kind::Int:
        return "integer " + t.text;
      case Kind::Keyword:
        return "keyword '" + t.text + "'";
      default:
        return "'" + t.text + "'";
    }
  }

  [[noreturn]] static void fail(const Token& at, std::string message) {
    Diagnostic d;
    d.message = std::move(message);
    d.line = at.line;
    d.column = at.column;
    throw Failure{std::move(d)};
  }

  void expect(std::string_view s, std::string_view context) {
    if (!symbol(s)) {
      fail(peek(), "expected '" + std::string(s) + "' " + std::string(context) + ", found " + describe(peek()));
    }
  }
  void expect_keyword(std::string_view s, std::string_view context) {
    if (!keyword(s)) {
      fail(peek(), "expected '" + std::string(s) + "' " + std::string(context) + ", found " + describe(peek()));
    }
  }

  std::string ident(std::string_view what) {
    if (peek().kind != Kind::Ident) fail(peek(), "expected " + std::string(what) + ", found " + describe(peek()));
    return next().text;
  }

  static Loc loc_of(const Token& t) { return Loc{t.line, t.column}; }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxDepth) fail(p_.peek(), "nesting too deep");
    }
    ~DepthGuard() { --p_.depth_; }
    Parser& p_;
  };

  // -- expressions ----------------------------------------------------------

  Expr bexpr() {
    DepthGuard guard(*this);
    Expr e = and_expr();
    while (keyword("or")) e = Expr::binary(Op::Or, std::move(e), and_expr());
    return e;
  }

  Expr and_expr() {
    Expr e = not_expr();
    while (keyword("and")) e = Expr::binary(Op::And, std::move(e), not_expr());
    return e;
  }

  Expr not_expr() {
    DepthGuard guard(*this);
    if (keyword("not")) return Expr::unary(Op::Not, not_expr());
    return comparison();
  }

  Expr comparison() {
    Expr e = arith();
    static const std::pair<std::string_view, Op> kOps[] = {
        {"=", Op::Eq}, {"!=", Op::Ne}, {"<", Op::Lt}, {"<=", Op::Le}, {">", Op::Gt}, {">=", Op::Ge}};
    for (const auto& [s, op] : kOps) {
      if (symbol(s)) {
        e = Expr::binary(op, std::move(e), arith());
        for (const auto& [s2, op2] : kOps) {
          (void)op2;
          if (is_symbol(s2)) fail(peek(), "comparisons do not chain; use parentheses");
        }
        return e;
      }
    }
    return e;
  }

  Expr arith() {
    DepthGuard guard(*this);
    Expr e = term();
    for (;;) {
      if (symbol("+")) {
        e = Expr::binary(Op::Add, std::move(e), term());
      } else if (symbol("-")) {
        e = Expr::binary(Op::Sub, std::move(e), term());
      } else if (keyword("xor")) {
        e = Expr::binary(Op::Xor, std::move(e), term());
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (symbol("*")) {
        e = Expr::binary(Op::Mul, std::move(e), unary());
      } else if (symbol("/")) {
        e = Expr::binary(Op::Div, std::move(e), unary());
      } else if (keyword("mod")) {
        e = Expr::binary(Op::Mod, std::move(e), unary());
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    DepthGuard guard(*this);
    if (is_symbol("-")) {
      next();
      // A minus directly on an integer token is a negative literal, unless the
      // literal is the base of a power.
      if (peek().kind == Kind::Int && !is_symbol("^", 1)) {
        const Token& t = next();
        return Expr::integer(int_value(t, true));
      }
      return Expr::unary(Op::Neg, unary());
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (symbol("^")) return Expr::binary(Op::Pow, std::move(base), unary());
    return base;
  }

  static std::int64_t int_value(const Token& t, bool negative = false) {
    // Parse magnitude as unsigned so that the most negative value is allowed.
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    (void)p;
    const std::uint64_t limit = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) + (negative ? 1 : 0);
    if (ec != std::errc() || v > limit) fail(t, "integer literal " + t.text + " out of range");
    if (negative) return v == limit ? std::numeric_limits<std::int64_t>::min() : -static_cast<std::int64_t>(v);
    return static_cast<std::int64_t>(v);
  }

  std::vector<Expr> args() {
    std::vector<Expr> out;
    expect("(", "to open the argument list");
    if (symbol(")")) return out;
    do {
      out.push_back(bexpr());
    } while (symbol(","));
    expect(")", "to close the argument list");
    return out;
  }

  Expr primary() {
    DepthGuard guard(*this);
    const Token& t = peek();
    if (t.kind == Kind::Int) {
      next();
      return Expr::integer(int_value(t));
    }
    if (keyword("true")) return Expr::boolean(true);
    if (keyword("false")) return Expr::boolean(false);
    if (t.kind == Kind::Ident) {
      std::string name = next().text;
      if (is_symbol("(")) return Expr::call(std::move(name), args());
      return Expr::var(std::move(name));
    }
    if (symbol("(")) {
      Expr e = bexpr();
      expect(")", "to close the parenthesized expression");
      return e;
    }
    fail(t, "expected an expression, found " + describe(t));
  }

  // -- measurement expressions and gates ------------------------------------

  bool phase_ahead() const {
    return is_symbol("(") && is_symbol("-", 1) && peek(2).kind == Kind::Int && peek(2).text == "1" &&
           is_symbol(")", 3) && is_symbol("^", 4);
  }

  bool gate_ahead() const {
    return phase_ahead() || (peek().kind == Kind::Ident && is_gate_name(peek().text));
  }

  static bool is_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
      if (c < '0' || c > '9') return false;
    }
    return true;
  }

  static bool is_simple_ident(std::string_view s) {
    return !s.empty() && !(s[0] >= '0' && s[0] <= '9') && !qcasm::is_keyword(s);
  }

  MeasurementExpr mexpr() {
    MeasurementExpr m;
    if (phase_ahead()) {
      for (int k = 0; k < 5; ++k) next();
      const Token& t = peek();
      if (t.kind == Kind::Int) {
        next();
        m.phase = Expr::integer(int_value(t));
      } else if (t.kind == Kind::Ident && !is_gate_name(t.text)) {
        std::string name = next().text;
        m.phase = is_symbol("(") ? Expr::call(std::move(name), args()) : Expr::var(std::move(name));
      } else if (symbol("(")) {
        m.phase = bexpr();
        expect(")", "to close the phase exponent");
      } else {
        fail(t, "expected a phase exponent after (-1)^, found " + describe(t));
      }
    }
    const Token& name_tok = peek();
    if (name_tok.kind != Kind::Ident || !is_gate_name(name_tok.text)) {
      fail(name_tok, "expected a measurement name, found " + describe(name_tok));
    }
    const std::string full = next().text;
    const auto us = full.find('_');
    m.name = full.substr(0, us);
    if (us != std::string::npos) pieces(full.substr(us + 1), name_tok, m);
    // A separate `_pow(e)` may follow a parenthesized subscript list.
    if (!m.power_log2 && peek().kind == Kind::Ident && peek().text.size() > 1 && peek().text[0] == '_') {
      const Token t = next();
      pieces(t.text.substr(1), t, m);
    }
    return m;
  }

  // Subscript pieces after an underscore: INT, IDENT, trailing empty piece
  // followed by (args), or trailing `pow` followed by (exponent).
  void pieces(const std::string& rest, const Token& at, MeasurementExpr& m) {
    std::size_t start = 0;
    for (;;) {
      const auto us = rest.find('_', start);
      const std::string piece = rest.substr(start, us == std::string::npos ? std::string::npos : us - start);
      const bool last = us == std::string::npos;
      if (piece.empty()) {
        if (!last) fail(at, "empty subscript in " + at.text);
        if (!is_symbol("(")) fail(peek(), "expected '(' after trailing '_' in " + at.text);
        for (auto& e : args()) m.subscripts.push_back(std::move(e));
        return;
      }
      if (piece == "pow") {
        if (!last) fail(at, "'pow' must be the last subscript in " + at.text);
        if (m.power_log2) fail(at, "power given twice");
        expect("(", "after pow");
        m.power_log2 = bexpr();
        expect(")", "to close the power exponent");
        return;
      }
      if (is_digits(piece)) {
        Token t = at;
        t.text = piece;
        m.subscripts.push_back(Expr::integer(int_value(t)));
      } else if (is_simple_ident(piece)) {
        m.subscripts.push_back(Expr::var(piece));
      } else {
        fail(at, "malformed subscript '" + piece + "' in " + at.text);
      }
      if (last) return;
      start = us + 1;
    }
  }

  std::vector<Expr> gate_wires() {
    std::vector<Expr> out;
    expect("(", "to open the wire list");
    do {
      Expr w = bexpr();
      if (symbol("..")) w = Expr::binary(Op::Range, std::move(w), bexpr());
      out.push_back(std::move(w));
    } while (symbol(","));
    expect(")", "to close the wire list");
    return out;
  }

  GateRule gate(std::string out, bool explicit_output, Loc loc) {
    GateRule g;
    g.loc = loc;
    g.out = std::move(out);
    g.explicit_output = explicit_output;
    g.branches.push_back(mexpr());
    g.wires = gate_wires();
    return g;
  }

  bool at_terminator() const {
    return peek().kind == Kind::End || is_symbol(";") || is_symbol("||") || is_symbol("}") ||
           is_keyword("elseif") || is_keyword("else");
  }

  // -- rules ----------------------------------------------------------------

  struct Atom {
    Rule rule;
    bool braced = false;
  };

  Rule seq() {
    DepthGuard guard(*this);
    const Loc loc = loc_of(peek());
    std::vector<Rule> parts;
    parts.push_back(par());
    while (symbol(";")) {
      if (peek().kind == Kind::End || is_symbol("}")) break;
      parts.push_back(par());
    }
    if (parts.size() == 1) return std::move(parts.front());
    return Rule{Sequential{std::move(parts), loc}};
  }

  Rule par() {
    const Loc loc = loc_of(peek());
    std::vector<Rule> bodies;
    bodies.push_back(patom());
    while (symbol("||")) bodies.push_back(patom());
    if (bodies.size() == 1) return std::move(bodies.front());
    return Rule{Parallel{{}, std::move(bodies), loc}};
  }

  Domain domain() {
    Domain d;
    if (symbol("[")) {
      d.lo = bexpr();
      expect(",", "between range bounds");
      d.hi = bexpr();
      expect("]", "to close the range");
    } else if (symbol("{")) {
      if (!is_symbol("}")) {
        do {
          d.elements.push_back(bexpr());
        } while (symbol(","));
      }
      expect("}", "to close the set");
    } else {
      d.lo = arith();
      expect("..", "in a range");
      d.hi = arith();
    }
    return d;
  }

  Binder binder() {
    Binder b;
    b.var = ident("a bound variable");
    expect_keyword("in", "after the forall variable");
    b.domain = domain();
    expect(":", "after the forall domain");
    return b;
  }

  Rule patom() {
    DepthGuard guard(*this);
    if (is_keyword("forall")) {
      const Loc loc = loc_of(next());
      Parallel p;
      p.loc = loc;
      p.binder = binder();
      p.bodies.push_back(patom());
      return Rule{std::move(p)};
    }
    return atom().rule;
  }

  Atom atom() {
    DepthGuard guard(*this);
    const Token& t = peek();
    const Loc loc = loc_of(t);
    if (symbol("{")) {
      Rule r = seq();
      expect("}", "to close the block");
      return {std::move(r), true};
    }
    if (keyword("skip")) return {Rule{Skip{loc}}, false};
    if (keyword("for")) {
      ForLoop l;
      l.loc = loc;
      l.var = ident("a loop variable");
      expect("=", "after the loop variable");
      l.lo = arith();
      expect_keyword("to", "in a for loop");
      l.hi = arith();
      expect(":", "after the loop bounds");
      l.body.push_back(patom());
      return {Rule{std::move(l)}, false};
    }
    if (keyword("if")) return {conditional(loc), false};
    if (keyword("output")) return {Rule{gate({}, true, loc)}, false};
    if (gate_ahead()) return {Rule{gate({}, false, loc)}, false};
    if (t.kind == Kind::Ident) return {assignment(loc), false};
    fail(t, "expected a rule, found " + describe(t));
  }

  Rule assignment(Loc loc) {
    const Token& name_tok = peek();
    std::string target = next().text;
    std::optional<Expr> index;
    if (is_symbol("(")) {
      auto a = args();
      if (a.size() != 1) fail(name_tok, "dynamic function " + target + " must take exactly one argument");
      index = std::move(a.front());
    }
    expect(":=", "in an assignment");
    if (!index && gate_ahead()) {
      const std::size_t save = pos_;
      std::optional<Failure> gate_error;
      try {
        GateRule g = gate(target, false, loc);
        if (at_terminator()) return Rule{std::move(g)};
      } catch (Failure& f) {
        gate_error = std::move(f);
      }
      pos_ = save;
      try {
        Expr value = bexpr();
        if (at_terminator()) return Rule{ClassicalAssign{std::move(target), std::nullopt, std::move(value), loc}};
      } catch (Failure&) {
      }
      if (gate_error) throw *gate_error;
      pos_ = save;
      gate(target, false, loc);
      fail(peek(), "unexpected " + describe(peek()) + " after a gate assignment");
    }
    Expr value = bexpr();
    return Rule{ClassicalAssign{std::move(target), std::move(index), std::move(value), loc}};
  }

  static bool simple_gate(const Atom& a) {
    const auto* g = a.rule.as<GateRule>();
    return !a.braced && g && g->guards.empty() && g->branches.size() == 1;
  }

  Rule conditional(Loc loc) {
    std::vector<Expr> guards;
    std::vector<Atom> branches;
    guards.push_back(bexpr());
    expect_keyword("then", "after the condition");
    branches.push_back(atom());
    while (keyword("elseif")) {
      guards.push_back(bexpr());
      expect_keyword("then", "after the condition");
      branches.push_back(atom());
    }
    if (keyword("else")) branches.push_back(atom());

    bool merge = true;
    const GateRule* first = nullptr;
    for (const auto& b : branches) {
      if (!simple_gate(b)) {
        merge = false;
        break;
      }
      const auto* g = b.rule.as<GateRule>();
      if (!first) {
        first = g;
      } else if (g->wires != first->wires || g->out != first->out ||
                 g->explicit_output != first->explicit_output) {
        merge = false;
        break;
      }
    }
    if (merge) {
      GateRule g;
      g.loc = loc;
      g.out = first->out;
      g.explicit_output = first->explicit_output;
      g.wires = first->wires;
      g.guards = std::move(guards);
      for (auto& b : branches) g.branches.push_back(b.rule.as<GateRule>()->branches.front());
      return Rule{std::move(g)};
    }
    ClassicalCond c;
    c.loc = loc;
    c.guards = std::move(guards);
    for (auto& b : branches) c.branches.push_back(std::move(b.rule));
    return Rule{std::move(c)};
  }

  // -- input declarations ---------------------------------------------------

  // An input declaration is present when `on` occurs before the first
  // top-level `;`.
  bool input_ahead() const {
    int depth = 0;
    for (std::size_t k = pos_; k < toks_.size(); ++k) {
      const Token& t = toks_[k];
      if (t.kind == Kind::End) return false;
      if (t.kind == Kind::Symbol) {
        if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
        if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
        if (t.text == ";" && depth <= 0) return false;
      }
      if (t.kind == Kind::Keyword && t.text == "on") return true;
    }
    return false;
  }

  InputDecl input() {
    InputDecl d;
    do {
      d.conjuncts.push_back(conjunct());
    } while (keyword("and"));
    return d;
  }

  InputConjunct conjunct() {
    DepthGuard guard(*this);
    const Loc loc = loc_of(peek());
    if (symbol("{")) {
      InputConjunct c = conjunct();
      expect("}", "to close the braced input conjunct");
      c.braced = true;
      c.loc = loc;
      return c;
    }
    InputConjunct c;
    c.loc = loc;
    if (keyword("forall")) c.binder = binder();
    c.state = state();
    expect_keyword("on", "after the input state");
    do {
      Expr w = arith();
      if (symbol("..")) w = Expr::binary(Op::Range, std::move(w), arith());
      c.wires.push_back(std::move(w));
    } while (symbol(","));
    return c;
  }

  StateRef state() {
    StateRef s;
    if (keyword("ket")) {
      s.kind = StateRef::Kind::Ket;
      if (peek().kind == Kind::Int) {
        const Token& t = next();
        for (char ch : t.text) {
          if (ch != '0' && ch != '1') fail(t, "ket bit string may contain only 0 and 1");
          s.bits.push_back(Expr::integer(ch - '0'));
        }
        return s;
      }
      if (is_symbol("(")) {
        s.bits = args();
        if (s.bits.empty()) fail(prev(), "ket needs at least one bit");
        return s;
      }
      fail(peek(), "expected a bit string or '(' after ket, found " + describe(peek()));
    }
    s.kind = StateRef::Kind::Named;
    s.name = ident("an input state");
    return s;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

ParseResult parse(std::string_view text) {
  ParseResult result;
  LexResult lexed = lex(text);
  if (lexed.error) {
    result.diagnostics.push_back(*lexed.error);
    return result;
  }
  try {
    Parser parser(std::move(lexed.tokens));
    result.program = parser.program();
  } catch (Failure& f) {
    result.diagnostics.push_back(std::move(f.diagnostic));
  }
  return result;
}

Program parse_program(std::string_view text) {
  ParseResult r = parse(text);
  if (!r.ok()) throw ParseError(r.diagnostics.front());
  return std::move(*r.program);
}

}  // namespace qcasm
