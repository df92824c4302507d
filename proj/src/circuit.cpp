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

#include "qcasm/circuit.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace qcasm {

namespace {

// Per-wire boundary of a partially lowered rule.
struct Fragment {
  std::map<int, GateId> first_entry;
  std::map<int, GateId> last_exit;
};

class Lowerer {
 public:
  explicit Lowerer(GeneralizedCircuit& c) : c_(c) {}

  std::pair<Fragment, DecompTree> rule(const Rule& r, const std::string& path) {
    if (const auto* g = r.as<GateRule>()) return gate(*g, path);
    if (const auto* p = r.as<Parallel>()) {
      if (p->binder) throw CircuitError("forall must be elaborated before lowering");
      Fragment f;
      DecompTree t{DecompTree::Kind::Parallel, -1, {}};
      for (std::size_t i = 0; i < p->bodies.size(); ++i) {
        auto [sub, st] = rule(p->bodies[i], path + "." + std::to_string(i));
        for (const auto& [w, g] : sub.first_entry) {
          if (!f.first_entry.emplace(w, g).second) {
            throw CircuitError("parallel components share wire " + std::to_string(w));
          }
        }
        f.last_exit.insert(sub.last_exit.begin(), sub.last_exit.end());
        add_child(t, std::move(st));
      }
      return {std::move(f), collapse(std::move(t))};
    }
    if (const auto* s = r.as<Sequential>()) {
      Fragment f;
      DecompTree t{DecompTree::Kind::Series, -1, {}};
      for (std::size_t i = 0; i < s->parts.size(); ++i) {
        auto [sub, st] = rule(s->parts[i], path + "." + std::to_string(i));
        for (const auto& [w, g] : sub.first_entry) {
          if (auto it = f.last_exit.find(w); it != f.last_exit.end()) {
            c_.bind.push_back({Node{Node::Kind::Exit, it->second, w}, Node{Node::Kind::Entry, g, w}});
            c_.gates[g].quantum_sources.insert(it->second);
          } else {
            f.first_entry.emplace(w, g);
          }
        }
        for (const auto& [w, g] : sub.last_exit) f.last_exit[w] = g;
        add_child(t, std::move(st));
      }
      return {std::move(f), collapse(std::move(t))};
    }
    if (r.as<ForLoop>()) throw CircuitError("for loop must be elaborated before lowering");
    // Classical rules contribute no gates.
    return {Fragment{}, DecompTree{}};
  }

 private:
  static void add_child(DecompTree& t, DecompTree child) {
    if (child.kind != DecompTree::Kind::Empty) t.children.push_back(std::move(child));
  }

  static DecompTree collapse(DecompTree t) {
    if (t.children.empty()) return DecompTree{};
    if (t.children.size() == 1) return std::move(t.children.front());
    return t;
  }

  std::pair<Fragment, DecompTree> gate(const GateRule& g, const std::string& path) {
    Gate gate;
    gate.id = static_cast<GateId>(c_.gates.size());
    gate.path = path;
    gate.rule = g;
    gate.channel = g.out;
    Fragment f;
    for (const auto& w : g.wires) {
      const int v = wire_value(w);
      if (std::find(gate.wires.begin(), gate.wires.end(), v) != gate.wires.end()) {
        throw CircuitError("gate at " + path + " repeats wire " + std::to_string(v));
      }
      gate.wires.push_back(v);
      f.first_entry[v] = gate.id;
      f.last_exit[v] = gate.id;
    }
    c_.gates.push_back(std::move(gate));
    return {std::move(f), DecompTree::leaf(static_cast<GateId>(c_.gates.size() - 1))};
  }

  GeneralizedCircuit& c_;
};

void collect_order(const DecompTree& t, SPOrder& o) {
  switch (t.kind) {
    case DecompTree::Kind::Empty:
      return;
    case DecompTree::Kind::Leaf:
      o.elements.push_back(t.gate);
      return;
    case DecompTree::Kind::Parallel:
      for (const auto& c : t.children) collect_order(c, o);
      return;
    case DecompTree::Kind::Series: {
      std::vector<GateId> before;
      for (const auto& c : t.children) {
        collect_order(c, o);
        const auto mine = leaves(c);
        for (GateId a : before) {
          for (GateId b : mine) o.pairs.insert({a, b});
        }
        before.insert(before.end(), mine.begin(), mine.end());
      }
      return;
    }
  }
}

GateId least_gate(const DecompTree& t) {
  const auto l = leaves(t);
  return l.empty() ? -1 : *std::min_element(l.begin(), l.end());
}

}  // namespace

Lowered lower(const Rule& r, const ChannelVarSet& external, int width) {
  Lowered out;
  GeneralizedCircuit& c = out.circuit;
  c.external = external;
  Lowerer lowerer(c);
  auto [frag, tree] = lowerer.rule(r, "body");
  out.tree = std::move(tree);

  int max_wire = 0;
  for (const auto& [w, g] : frag.first_entry) {
    (void)g;
    max_wire = std::max(max_wire, w);
  }
  if (width == 0) width = max_wire;
  if (width < max_wire) throw CircuitError("circuit width " + std::to_string(width) + " below wire " + std::to_string(max_wire));
  c.width = width;
  for (const auto& [w, g] : frag.first_entry) c.bind.push_back({Node{Node::Kind::Input, -1, w}, Node{Node::Kind::Entry, g, w}});
  for (const auto& [w, g] : frag.last_exit) c.bind.push_back({Node{Node::Kind::Exit, g, w}, Node{Node::Kind::Output, -1, w}});
  std::sort(c.bind.begin(), c.bind.end());

  std::map<std::string, GateId> producer;
  for (const auto& g : c.gates) {
    if (!g.channel.empty()) producer[g.channel] = g.id;
  }
  for (auto& g : c.gates) {
    std::set<std::string> vars;
    for (const auto& e : g.rule.guards) collect_vars(e, vars);
    for (const auto& b : g.rule.branches) {
      if (b.phase) collect_vars(*b.phase, vars);
    }
    for (const auto& v : vars) {
      if (auto it = producer.find(v); it != producer.end() && it->second != g.id) {
        g.classical_sources.insert(it->second);
      } else if (external.count(v)) {
        g.external_sources.insert(v);
      }
    }
  }

  collect_order(out.tree, out.order);
  std::sort(out.order.elements.begin(), out.order.elements.end());
  return out;
}

OrderPairs transitive_closure(const OrderPairs& direct, std::size_t n) {
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (const auto& [a, b] : direct) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n) {
      throw CircuitError("relation refers to an unknown gate");
    }
    reach[a][b] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = 1;
      }
    }
  }
  OrderPairs out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j]) out.insert({static_cast<GateId>(i), static_cast<GateId>(j)});
    }
  }
  return out;
}

OrderPairs prerequisite_relation(const GeneralizedCircuit& c) {
  OrderPairs direct;
  for (const auto& g : c.gates) {
    for (GateId s : g.quantum_sources) direct.insert({s, g.id});
    for (GateId s : g.classical_sources) direct.insert({s, g.id});
  }
  OrderPairs closed = transitive_closure(direct, c.gates.size());
  for (const auto& [a, b] : closed) {
    if (a == b) throw CircuitError("prerequisite cycle through gate " + std::to_string(a));
  }
  return closed;
}

std::vector<GateId> leaves(const DecompTree& t) {
  std::vector<GateId> out;
  std::function<void(const DecompTree&)> walk = [&](const DecompTree& n) {
    if (n.kind == DecompTree::Kind::Leaf) out.push_back(n.gate);
    for (const auto& c : n.children) walk(c);
  };
  walk(t);
  return out;
}

DecompTree canonicalize(const DecompTree& t) {
  if (t.kind == DecompTree::Kind::Empty || t.kind == DecompTree::Kind::Leaf) return t;
  DecompTree out{t.kind, -1, {}};
  for (const auto& c : t.children) {
    DecompTree cc = canonicalize(c);
    if (cc.kind == DecompTree::Kind::Empty) continue;
    if (cc.kind == t.kind) {
      for (auto& g : cc.children) out.children.push_back(std::move(g));
    } else {
      out.children.push_back(std::move(cc));
    }
  }
  if (out.children.empty()) return DecompTree{};
  if (out.children.size() == 1) return std::move(out.children.front());
  if (out.kind == DecompTree::Kind::Parallel) {
    std::sort(out.children.begin(), out.children.end(),
              [](const DecompTree& a, const DecompTree& b) { return least_gate(a) < least_gate(b); });
  }
  return out;
}

SPOrder order_from_tree(const DecompTree& t) {
  SPOrder o;
  collect_order(t, o);
  std::sort(o.elements.begin(), o.elements.end());
  return o;
}

Schedule schedule_from_order(const SPOrder& o) {
  Schedule s;
  std::set<GateId> remaining(o.elements.begin(), o.elements.end());
  while (!remaining.empty()) {
    std::vector<GateId> bout;
    for (GateId g : remaining) {
      bool minimal = true;
      for (GateId h : remaining) {
        if (o.less(h, g)) {
          minimal = false;
          break;
        }
      }
      if (minimal) bout.push_back(g);
    }
    if (bout.empty()) throw CircuitError("order is cyclic");
    for (GateId g : bout) remaining.erase(g);
    s.bouts.push_back(std::move(bout));
  }
  return s;
}

std::vector<Schedule> all_schedules(const std::vector<GateId>& elements, const OrderPairs& order,
                                    std::size_t cap) {
  if (elements.size() > cap) {
    throw CircuitError("schedule enumeration limited to " + std::to_string(cap) + " gates, circuit has " +
                       std::to_string(elements.size()));
  }
  std::vector<Schedule> out;
  std::set<GateId> done;
  Schedule current;
  std::function<void()> extend = [&]() {
    if (done.size() == elements.size()) {
      out.push_back(current);
      return;
    }
    std::vector<GateId> available;
    for (GateId g : elements) {
      if (done.count(g)) continue;
      bool ready = true;
      for (GateId h : elements) {
        if (!done.count(h) && order.count({h, g})) {
          ready = false;
          break;
        }
      }
      if (ready) available.push_back(g);
    }
    const std::size_t n = available.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
      std::vector<GateId> bout;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (std::size_t{1} << i)) bout.push_back(available[i]);
      }
      for (GateId g : bout) done.insert(g);
      current.bouts.push_back(bout);
      extend();
      current.bouts.pop_back();
      for (GateId g : bout) done.erase(g);
    }
  };
  extend();
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<GateId> gate_ids(const GeneralizedCircuit& c) {
  std::vector<GateId> ids;
  for (const auto& g : c.gates) ids.push_back(g.id);
  return ids;
}

std::vector<Schedule> all_schedules(const GeneralizedCircuit& c, std::size_t cap) {
  return all_schedules(gate_ids(c), prerequisite_relation(c), cap);
}

std::optional<std::string> schedule_violation(const Schedule& s, const std::vector<GateId>& elements,
                                              const OrderPairs& order) {
  std::map<GateId, std::size_t> bout_of;
  for (std::size_t i = 0; i < s.bouts.size(); ++i) {
    if (s.bouts[i].empty()) return "bout " + std::to_string(i + 1) + " is empty";
    for (GateId g : s.bouts[i]) {
      if (std::find(elements.begin(), elements.end(), g) == elements.end()) {
        return "gate " + std::to_string(g) + " is not in the circuit";
      }
      if (!bout_of.emplace(g, i).second) return "gate " + std::to_string(g) + " appears twice";
    }
  }
  for (GateId g : elements) {
    if (!bout_of.count(g)) return "gate " + std::to_string(g) + " is not scheduled";
  }
  for (const auto& [a, b] : order) {
    auto ia = bout_of.find(a);
    auto ib = bout_of.find(b);
    if (ia == bout_of.end() || ib == bout_of.end()) continue;
    if (ia->second >= ib->second) {
      return "gate " + std::to_string(a) + " must fire before gate " + std::to_string(b);
    }
  }
  return std::nullopt;
}

}  // namespace qcasm
