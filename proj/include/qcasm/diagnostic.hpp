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

#include <ostream>
#include <string>
#include <vector>

namespace qcasm {

/// Rule-formation clause a diagnostic refers to.
enum class Clause {
  None,
  GateRule,
  ClassicalAssignment,
  ClassicalConditional,
  ParallelComposition,
  SequentialComposition,
  InputDeclaration,
};

const char* clause_tag(Clause c);

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;
  int line = 0;
  int column = 0;
  Clause clause = Clause::None;
  std::string path;  // rule path, e.g. "body.2.0"
};

std::string format(const Diagnostic& d, const std::string& origin = {});
std::ostream& operator<<(std::ostream& os, const Diagnostic& d);

}  // namespace qcasm
