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

#include <cmath>
#include <cstdio>

#include "qcasm/sim.hpp"

namespace qcasm {

namespace {

// 17 significant digits.
std::string number(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string value_json(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return std::to_string(std::get<std::int64_t>(v));
}

std::string outcomes_json(const Outcomes& o) {
  std::string s = "{";
  for (const auto& [k, v] : o) {
    if (s.size() > 1) s += ", ";
    s += quoted(k) + ": " + std::to_string(v);
  }
  return s + "}";
}

std::string store_json(const Store& st) {
  std::string s = "{";
  for (const auto& [k, v] : st) {
    if (s.size() > 1) s += ", ";
    s += quoted(k) + ": " + value_json(v);
  }
  return s + "}";
}

std::string state_json(const QuantumState& q) {
  std::string s = "[";
  const auto& a = q.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (i) s += ", ";
    s += "[" + number(a[i].real()) + ", " + number(a[i].imag()) + "]";
  }
  return s + "]";
}

std::string ints_json(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + "]";
}

std::string trace_json(const std::vector<TraceEntry>& trace, const std::string& indent) {
  if (trace.empty()) return "[]";
  std::string s = "[\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& t = trace[i];
    s += indent + "  {\"step\": " + std::to_string(t.step) + ", \"gate\": " + std::to_string(t.gate) +
         ", \"mq\": " + quoted(t.family) + ", \"wq\": " + ints_json(t.wires) + ", \"o\": " + std::to_string(t.label) +
         "}";
    s += i + 1 < trace.size() ? ",\n" : "\n";
  }
  return s + indent + "]";
}

std::string schedule_json(const Schedule& sch) {
  std::string s = "[";
  for (std::size_t i = 0; i < sch.bouts.size(); ++i) {
    if (i) s += ", ";
    s += "[";
    for (std::size_t j = 0; j < sch.bouts[i].size(); ++j) s += (j ? ", " : "") + std::to_string(sch.bouts[i][j]);
    s += "]";
  }
  return s + "]";
}

}  // namespace

std::string to_json(const RunResult& r) {
  std::string s = "{\n";
  s += "  \"seed\": " + std::to_string(r.seed) + ",\n";
  s += "  \"outcomes\": " + outcomes_json(r.outcomes) + ",\n";
  s += "  \"classical\": " + store_json(r.classical) + ",\n";
  s += "  \"state\": " + state_json(r.final_state) + ",\n";
  s += "  \"trace\": " + trace_json(r.trace, "  ") + "\n";
  return s + "}\n";
}

std::string to_json(const Enumeration& e, bool with_states) {
  std::string s = "{\n  \"branches\": [";
  for (std::size_t i = 0; i < e.branches.size(); ++i) {
    const auto& b = e.branches[i];
    s += i ? ",\n" : "\n";
    s += "    {\"outcomes\": " + outcomes_json(b.outcomes) + ", \"probability\": " + number(b.probability);
    s += ", \"classical\": " + store_json(b.classical);
    if (with_states) s += ",\n     \"state\": " + state_json(b.final_state);
    s += ",\n     \"trace\": " + trace_json(b.trace, "     ") + "}";
  }
  s += e.branches.empty() ? "],\n" : "\n  ],\n";
  s += "  \"pruned_mass\": " + number(e.pruned_mass) + ",\n";
  s += "  \"total_probability\": " + number(e.total_probability()) + "\n";
  return s + "}\n";
}

std::string to_json(const Distribution& d) {
  std::string s = "{\n  \"shots\": " + std::to_string(d.shots) + ",\n  \"frequencies\": [";
  std::size_t i = 0;
  for (const auto& [o, n] : d.counts) {
    s += i++ ? ",\n" : "\n";
    s += "    {\"outcomes\": " + outcomes_json(o) + ", \"count\": " + std::to_string(n) +
         ", \"frequency\": " + number(d.frequency(o)) + "}";
  }
  s += d.counts.empty() ? "]\n" : "\n  ]\n";
  return s + "}\n";
}

std::string to_json(const IndependenceReport& r) {
  std::string s = "{\n  \"ok\": " + std::string(r.ok ? "true" : "false") + ",\n";
  s += "  \"schedules\": [";
  for (std::size_t i = 0; i < r.schedules.size(); ++i) s += (i ? ", " : "") + schedule_json(r.schedules[i]);
  s += "],\n  \"discrepancies\": [";
  for (std::size_t i = 0; i < r.discrepancies.size(); ++i) s += (i ? ", " : "") + quoted(r.discrepancies[i]);
  return s + "]\n}\n";
}

}  // namespace qcasm
