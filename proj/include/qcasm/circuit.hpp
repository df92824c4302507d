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

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcasm/ast.hpp"

namespace qcasm {

/// Gates are numbered 0..n-1 in program order of their gate rules.
using GateId = int;

struct Gate {
  GateId id = 0;
  std::string path;        // position of the gate rule, e.g. "body.2.0"
  GateRule rule;           // ground gate rule
  std::vector<int> wires;  // entry/exit pairs, one per wire
  std::string channel;     // outgoing channel variable; empty for a channel to nowhere
  std::set<GateId> quantum_sources;
  std::set<GateId> classical_sources;
  std::set<std::string> external_sources;  // O variables read by the guards
};

/// Endpoint of a Bind pair.
struct Node {
  enum class Kind { Input, Entry, Exit, Output };
  Kind kind = Kind::Input;
  GateId gate = -1;  // Entry/Exit only
  int wire = 0;
  friend bool operator==(const Node&, const Node&) = default;
  friend auto operator<=>(const Node&, const Node&) = default;
};

struct GeneralizedCircuit {
  int width = 0;
  std::vector<Gate> gates;
  std::vector<std::pair<Node, Node>> bind;
  ChannelVarSet external;
};

using OrderPairs = std::set<std::pair<GateId, GateId>>;

/// Strict partial order over gates; `pairs` holds (a, b) for a < b.
struct SPOrder {
  std::vector<GateId> elements;
  OrderPairs pairs;
  bool less(GateId a, GateId b) const { return pairs.count({a, b}) != 0; }
};

struct DecompTree {
  enum class Kind { Empty, Leaf, Series, Parallel };
  Kind kind = Kind::Empty;
  GateId gate = -1;
  std::vector<DecompTree> children;

  static DecompTree leaf(GateId g) { return DecompTree{Kind::Leaf, g, {}}; }
  friend bool operator==(const DecompTree&, const DecompTree&) = default;
};

struct Schedule {
  std::vector<std::vector<GateId>> bouts;
  friend bool operator==(const Schedule&, const Schedule&) = default;
  friend auto operator<=>(const Schedule&, const Schedule&) = default;
};

class CircuitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Lowered {
  GeneralizedCircuit circuit;
  SPOrder order;
  DecompTree tree;
};

/// Lowers a ground, well-formed rule. `width` 0 means the largest wire used.
Lowered lower(const Rule& r, const ChannelVarSet& external = {}, int width = 0);

/// Transitive closure of quantum and classical source pairs. Throws
/// CircuitError on a cycle.
OrderPairs prerequisite_relation(const GeneralizedCircuit& c);

/// Transitive closure of an arbitrary relation over `n` gates.
OrderPairs transitive_closure(const OrderPairs& direct, std::size_t n);

/// Flattens nested series/parallel nodes, drops empties, collapses unary
/// nodes and orders parallel children by their least gate.
DecompTree canonicalize(const DecompTree& t);

/// Partial order represented by a tree.
SPOrder order_from_tree(const DecompTree& t);

/// Gates under `t` in left-to-right order.
std::vector<GateId> leaves(const DecompTree& t);

/// Greedy layering: each bout is the set of minimal remaining elements.
Schedule schedule_from_order(const SPOrder& o);

/// Every ordered partition of `elements` into bouts that respects `order`.
/// Throws CircuitError when there are more than `cap` elements.
std::vector<Schedule> all_schedules(const std::vector<GateId>& elements, const OrderPairs& order,
                                    std::size_t cap = 6);
std::vector<Schedule> all_schedules(const GeneralizedCircuit& c, std::size_t cap = 6);

/// Empty when `s` is a schedule for `elements` under `order`; otherwise the
/// first violation.
std::optional<std::string> schedule_violation(const Schedule& s, const std::vector<GateId>& elements,
                                              const OrderPairs& order);

std::vector<GateId> gate_ids(const GeneralizedCircuit& c);

// Exports.
std::string to_dot(const Lowered& l);
std::string to_json(const Lowered& l, const std::optional<Schedule>& schedule = std::nullopt, int indent = 2);
std::string tree_text(const DecompTree& t);
std::string schedule_text(const Schedule& s);

}  // namespace qcasm
