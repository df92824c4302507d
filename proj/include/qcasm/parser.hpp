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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qcasm/ast.hpp"
#include "qcasm/diagnostic.hpp"

namespace qcasm {

// ---------------------------------------------------------------------------
// Tokens.

struct Token {
  enum class Kind { Ident, Keyword, Int, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
  int column = 1;
};

bool is_keyword(std::string_view word);

/// Splits `text` into tokens ending with an End token. Returns a diagnostic
/// instead on the first bad character.
struct LexResult {
  std::vector<Token> tokens;
  std::optional<Diagnostic> error;
};
LexResult lex(std::string_view text);

// ---------------------------------------------------------------------------
// Parsing.

struct ParseResult {
  std::optional<Program> program;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return program.has_value(); }
};

ParseResult parse(std::string_view text);

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(Diagnostic d) : std::runtime_error(format(d)), diagnostic_(std::move(d)) {}
  const Diagnostic& diagnostic() const { return diagnostic_; }

 private:
  Diagnostic diagnostic_;
};

/// parse(), throwing ParseError on the first diagnostic.
Program parse_program(std::string_view text);

// ---------------------------------------------------------------------------
// Printing. The output re-parses to a structurally equal tree.

std::string pretty(const Program& p);
std::string pretty(const Rule& r);
std::string pretty(const Expr& e);
std::string pretty(const MeasurementExpr& m);

/// Debug JSON rendering of the syntax tree.
std::string ast_json(const Program& p, int indent = 2);

}  // namespace qcasm
