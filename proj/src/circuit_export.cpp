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

#include <sstream>

#include "json.hpp"
#include "qcasm/circuit.hpp"
#include "qcasm/parser.hpp"

namespace qcasm {

namespace {

using json = nlohmann::ordered_json;

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string node_name(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Input:
      return "in" + std::to_string(n.wire);
    case Node::Kind::Output:
      return "out" + std::to_string(n.wire);
    default:
      return "g" + std::to_string(n.gate);
  }
}

const char* node_kind(Node::Kind k) {
  switch (k) {
    case Node::Kind::Input:
      return "input";
    case Node::Kind::Entry:
      return "entry";
    case Node::Kind::Exit:
      return "exit";
    case Node::Kind::Output:
      return "output";
  }
  return "";
}

json node_json(const Node& n) {
  json j;
  j["kind"] = node_kind(n.kind);
  if (n.gate >= 0) j["gate"] = n.gate;
  j["wire"] = n.wire;
  return j;
}

json tree_json(const DecompTree& t) {
  json j;
  switch (t.kind) {
    case DecompTree::Kind::Empty:
      j["kind"] = "empty";
      break;
    case DecompTree::Kind::Leaf:
      j["kind"] = "leaf";
      j["gate"] = t.gate;
      break;
    case DecompTree::Kind::Series:
    case DecompTree::Kind::Parallel:
      j["kind"] = t.kind == DecompTree::Kind::Series ? "series" : "parallel";
      j["children"] = json::array();
      for (const auto& c : t.children) j["children"].push_back(tree_json(c));
      break;
  }
  return j;
}

json pairs_json(const OrderPairs& pairs) {
  json j = json::array();
  for (const auto& [a, b] : pairs) j.push_back(json::array({a, b}));
  return j;
}

}  // namespace

std::string tree_text(const DecompTree& t) {
  switch (t.kind) {
    case DecompTree::Kind::Empty:
      return "empty";
    case DecompTree::Kind::Leaf:
      return "g" + std::to_string(t.gate);
    default: {
      std::string s = t.kind == DecompTree::Kind::Series ? "series(" : "parallel(";
      for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (i) s += ", ";
        s += tree_text(t.children[i]);
      }
      return s + ")";
    }
  }
}

std::string schedule_text(const Schedule& s) {
  std::string out;
  for (const auto& bout : s.bouts) {
    out += "[";
    for (std::size_t i = 0; i < bout.size(); ++i) {
      if (i) out += ",";
      out += "g" + std::to_string(bout[i]);
    }
    out += "]";
  }
  return out;
}

std::string to_dot(const Lowered& l) {
  const auto& c = l.circuit;
  std::ostringstream os;
  os << "digraph circuit {\n  rankdir=LR;\n  node [fontname=\"Helvetica\"];\n";
  std::set<int> wires;
  for (const auto& [from, to] : c.bind) {
    if (from.kind == Node::Kind::Input) wires.insert(from.wire);
  }
  for (int w : wires) {
    os << "  in" << w << " [shape=plaintext, label=\"in " << w << "\"];\n";
    os << "  out" << w << " [shape=plaintext, label=\"out " << w << "\"];\n";
  }
  for (const auto& g : c.gates) {
    os << "  g" << g.id << " [shape=box, label=\"" << dot_escape(pretty(Rule{g.rule})) << "\"];\n";
  }
  for (const auto& [from, to] : c.bind) {
    os << "  " << node_name(from) << " -> " << node_name(to) << " [label=\"" << from.wire << "\"];\n";
  }
  for (const auto& v : c.external) {
    os << "  \"ext_" << dot_escape(v) << "\" [shape=ellipse, label=\"" << dot_escape(v) << "\"];\n";
  }
  for (const auto& g : c.gates) {
    for (GateId s : g.classical_sources) {
      os << "  g" << s << " -> g" << g.id << " [style=dashed, label=\"" << dot_escape(c.gates[s].channel)
         << "\"];\n";
    }
    for (const auto& v : g.external_sources) {
      os << "  \"ext_" << dot_escape(v) << "\" -> g" << g.id << " [style=dashed];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string to_json(const Lowered& l, const std::optional<Schedule>& schedule, int indent) {
  const auto& c = l.circuit;
  json j;
  j["width"] = c.width;
  j["external"] = c.external;
  j["gates"] = json::array();
  for (const auto& g : c.gates) {
    json gj;
    gj["id"] = g.id;
    gj["path"] = g.path;
    gj["rule"] = pretty(Rule{g.rule});
    gj["wires"] = g.wires;
    gj["channel"] = g.channel;
    gj["quantum_sources"] = g.quantum_sources;
    gj["classical_sources"] = g.classical_sources;
    gj["external_sources"] = g.external_sources;
    j["gates"].push_back(std::move(gj));
  }
  j["bind"] = json::array();
  for (const auto& [from, to] : c.bind) j["bind"].push_back(json::array({node_json(from), node_json(to)}));
  j["order"] = pairs_json(l.order.pairs);
  j["prerequisites"] = pairs_json(prerequisite_relation(c));
  j["tree"] = tree_json(l.tree);
  j["canonical_tree"] = tree_json(canonicalize(l.tree));
  if (schedule) j["schedule"] = schedule->bouts;
  return j.dump(indent);
}

}  // namespace qcasm
