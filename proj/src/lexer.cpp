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

#include <array>
#include <cctype>

#include "qcasm/parser.hpp"

namespace qcasm {

namespace {

constexpr std::array<std::string_view, 20> kKeywords = {
    "param", "on",   "and",  "or",     "not",  "forall", "in",   "for",  "to",   "if",
    "then",  "elseif", "else", "skip", "output", "ket",  "mod",  "xor",  "true", "false",
};

// Longest first.
constexpr std::array<std::string_view, 21> kSymbols = {
    ":=", "!=", "<=", ">=", "..", "||", "(", ")", "{", "}", "[",
    "]",  ",",  ";",  ":",  "=",  "<",  ">",  "+", "-", "*",
};
constexpr std::string_view kSingles = "/^";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

bool is_keyword(std::string_view word) {
  for (auto k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

LexResult lex(std::string_view text) {
  LexResult out;
  int line = 1;
  int column = 1;
  // Position of the last byte consumed; End tokens point there so that every
  // diagnostic lies inside the source.
  int last_line = 1;
  int last_column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      last_line = line;
      last_column = column;
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = column;
    std::size_t n = 0;
    if (ident_start(c)) {
      while (i + n < text.size() && ident_char(text[i + n])) ++n;
      t.text = std::string(text.substr(i, n));
      t.kind = is_keyword(t.text) ? Token::Kind::Keyword : Token::Kind::Ident;
    } else if (digit(c)) {
      while (i + n < text.size() && digit(text[i + n])) ++n;
      t.text = std::string(text.substr(i, n));
      t.kind = Token::Kind::Int;
    } else {
      for (auto s : kSymbols) {
        if (text.substr(i, s.size()) == s) {
          n = s.size();
          break;
        }
      }
      if (n == 0 && kSingles.find(c) != std::string_view::npos) n = 1;
      if (n == 0) {
        Diagnostic d;
        const auto byte = static_cast<unsigned char>(c);
        d.message = std::isprint(byte) ? std::string("unexpected character '") + c + "'"
                                       : "unexpected byte " + std::to_string(byte);
        d.line = line;
        d.column = column;
        out.error = std::move(d);
        out.tokens.clear();
        return out;
      }
      t.text = std::string(text.substr(i, n));
      t.kind = Token::Kind::Symbol;
    }
    advance(n);
    out.tokens.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = last_line;
  end.column = last_column;
  out.tokens.push_back(std::move(end));
  return out;
}

}  // namespace qcasm
