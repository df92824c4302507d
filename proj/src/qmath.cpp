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

#include "qcasm/qmath.hpp"

#include <array>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace qcasm {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 15> kStdNames = {
    "I", "H", "X", "Y", "Z", "SWAP", "CNOT", "R", "QFT", "QFTdg", "SM", "PM", "Phase", "V",
    "Oracle"};

std::string display_name(std::string_view name, std::span<const std::int64_t> params) {
  std::string out(name);
  if (params.size() == 1 && params[0] >= 0) {
    out += "_" + std::to_string(params[0]);
  } else if (!params.empty()) {
    out += "_(";
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (i) out += ", ";
      out += std::to_string(params[i]);
    }
    out += ")";
  }
  return out;
}

void expect_params(std::string_view name, std::span<const std::int64_t> params, std::size_t n) {
  if (params.size() != n) {
    throw std::invalid_argument("gate " + std::string(name) + " takes " + std::to_string(n) +
                                " parameter(s), got " + std::to_string(params.size()));
  }
}

int checked_qubits(std::string_view name, std::int64_t n) {
  if (n < 1 || n > 12) {
    throw std::invalid_argument("gate " + std::string(name) + " qubit count " + std::to_string(n) +
                                " outside 1..12");
  }
  return static_cast<int>(n);
}

Complex unit_phase(double turns) {
  const double angle = 2.0 * std::numbers::pi * turns;
  return {std::cos(angle), std::sin(angle)};
}

OperatorXcd projector(std::initializer_list<int> basis, int dim) {
  OperatorXcd p = OperatorXcd::Zero(dim, dim);
  for (int b : basis) p(b, b) = 1.0;
  return p;
}

Complex parse_complex(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw std::invalid_argument("complex entries must be [re, im] pairs");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

MeasurementFamily family_from(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("family document must be an object");
  const std::string name = doc.at("name").get<std::string>();
  const int arity = doc.at("arity").get<int>();
  if (arity < 1 || arity > 12) throw std::invalid_argument("family arity outside 1..12");
  const Eigen::Index dim = Eigen::Index{1} << arity;
  std::vector<MeasurementFamily::Outcome> outcomes;
  for (const auto& o : doc.at("outcomes")) {
    const auto& rows = o.at("matrix");
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != dim) {
      throw std::invalid_argument("matrix of " + name + " must have " + std::to_string(dim) +
                                  " rows");
    }
    OperatorXcd m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      const auto& row = rows[r];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
        throw std::invalid_argument("matrix row of " + name + " must have " + std::to_string(dim) +
                                    " entries");
      }
      for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = parse_complex(row[c]);
    }
    outcomes.push_back({o.at("label").get<std::int64_t>(), std::move(m)});
  }
  return MeasurementFamily(name, arity, std::move(outcomes));
}

void check_registry_name(std::string_view name) {
  if (name.empty() || !std::isupper(static_cast<unsigned char>(name[0]))) {
    throw std::invalid_argument("gate names must start with an uppercase letter: " +
                                std::string(name));
  }
  for (char ch : name) {
    if (!std::isalnum(static_cast<unsigned char>(ch))) {
      throw std::invalid_argument("gate names are alphanumeric: " + std::string(name));
    }
  }
}

OperatorXcd power_of_two_power(OperatorXcd u, std::int64_t log2_exponent) {
  if (log2_exponent < 0 || log2_exponent > 62) {
    throw std::invalid_argument("power exponent 2^" + std::to_string(log2_exponent) +
                                " out of range");
  }
  for (std::int64_t i = 0; i < log2_exponent; ++i) u = (u * u).eval();
  return u;
}

}  // namespace

OperatorXcd fourier_matrix(int n, bool inverse) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  OperatorXcd f(dim, dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      // Reduce jk mod 2^n before converting to an angle to keep phases exact.
      const auto jk = static_cast<double>((j * k) % dim);
      f(j, k) = scale * unit_phase((inverse ? -jk : jk) / static_cast<double>(dim));
    }
  }
  return f;
}

bool is_std_gate(std::string_view name) {
  return std::find(kStdNames.begin(), kStdNames.end(), name) != kStdNames.end();
}

MeasurementFamily std_gate(std::string_view name, std::span<const std::int64_t> params) {
  const std::string shown = display_name(name, params);
  auto unitary = [&](OperatorXcd u) { return MeasurementFamily::unitary(shown, std::move(u)); };
  const Complex i1{0.0, 1.0};
  const double r = 1.0 / std::numbers::sqrt2;

  if (name == "I") {
    if (params.empty()) return unitary(OperatorXcd::Identity(2, 2));
    expect_params(name, params, 1);
    const int n = checked_qubits(name, params[0]);
    return unitary(OperatorXcd::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n));
  }
  if (name == "H" || name == "X" || name == "Y" || name == "Z") {
    expect_params(name, params, 0);
    OperatorXcd m(2, 2);
    if (name == "H") m << r, r, r, -r;
    if (name == "X") m << 0, 1, 1, 0;
    if (name == "Y") m << 0, -i1, i1, 0;
    if (name == "Z") m << 1, 0, 0, -1;
    return unitary(std::move(m));
  }
  if (name == "SWAP" || name == "CNOT") {
    expect_params(name, params, 0);
    OperatorXcd m = OperatorXcd::Zero(4, 4);
    if (name == "SWAP") {
      m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
    } else {
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    }
    return unitary(std::move(m));
  }
  if (name == "R") {
    expect_params(name, params, 1);
    if (params[0] < 1 || params[0] > 62) throw std::invalid_argument("R_k requires 1 <= k <= 62");
    OperatorXcd m = OperatorXcd::Identity(2, 2);
    m(1, 1) = unit_phase(std::ldexp(1.0, -static_cast<int>(params[0])));
    return unitary(std::move(m));
  }
  if (name == "Phase") {
    expect_params(name, params, 2);
    if (params[1] < 0 || params[1] > 62) throw std::invalid_argument("Phase_(j, n) requires 0 <= n <= 62");
    const std::int64_t den = std::int64_t{1} << params[1];
    const std::int64_t num = ((params[0] % den) + den) % den;
    OperatorXcd m = OperatorXcd::Identity(2, 2);
    m(1, 1) = unit_phase(static_cast<double>(num) / static_cast<double>(den));
    return unitary(std::move(m));
  }
  if (name == "QFT" || name == "QFTdg") {
    expect_params(name, params, 1);
    return unitary(fourier_matrix(checked_qubits(name, params[0]), name == "QFTdg"));
  }
  if (name == "V") {
    expect_params(name, params, 1);
    const Eigen::Index dim = Eigen::Index{1} << checked_qubits(name, params[0]);
    OperatorXcd m = -OperatorXcd::Identity(dim, dim);
    m(0, 0) = 1.0;
    return unitary(std::move(m));
  }
  if (name == "Oracle") {
    expect_params(name, params, 2);
    const int n = checked_qubits(name, params[0]);
    if (n > 11) throw std::invalid_argument("Oracle_(n, m) requires n <= 11");
    const std::int64_t marked = params[1];
    if (marked < 0 || marked >= (std::int64_t{1} << n)) {
      throw std::invalid_argument("Oracle_(n, m) requires 0 <= m < 2^n");
    }
    const Eigen::Index dim = Eigen::Index{1} << (n + 1);
    OperatorXcd m = OperatorXcd::Zero(dim, dim);
    for (Eigen::Index x = 0; x < (Eigen::Index{1} << n); ++x) {
      for (Eigen::Index y = 0; y < 2; ++y) {
        const Eigen::Index target = (x == marked) ? (y ^ 1) : y;
        m(2 * x + target, 2 * x + y) = 1.0;
      }
    }
    return unitary(std::move(m));
  }
  if (name == "SM") {
    expect_params(name, params, 0);
    return MeasurementFamily("SM", 1, {{0, projector({0}, 2)}, {1, projector({1}, 2)}});
  }
  if (name == "PM") {
    expect_params(name, params, 0);
    return MeasurementFamily("PM", 2, {{0, projector({0, 3}, 4)}, {1, projector({1, 2}, 4)}});
  }
  throw std::invalid_argument("unknown gate " + std::string(name));
}

std::optional<int> named_state_width(std::string_view name) {
  if (name == "plus" || name == "minus") return 1;
  if (name == "bell00" || name == "bell01" || name == "bell10" || name == "bell11") return 2;
  return std::nullopt;
}

QuantumState make_state(const StateDescriptor& spec, int width) {
  auto check_width = [&](int m) {
    if (m != width) {
      throw std::invalid_argument("state has " + std::to_string(m) + " qubit(s) but width " +
                                  std::to_string(width) + " was requested");
    }
  };
  if (const auto* ket = std::get_if<KetBits>(&spec)) {
    if (ket->bits.empty()) throw std::invalid_argument("empty basis ket");
    if (ket->bits.size() > static_cast<std::size_t>(kMaxWidth)) {
      throw std::invalid_argument("basis ket wider than the maximum width");
    }
    std::uint64_t index = 0;
    for (char b : ket->bits) {
      if (b != '0' && b != '1') throw std::invalid_argument("basis ket must be a bitstring");
      index = (index << 1) | static_cast<std::uint64_t>(b - '0');
    }
    check_width(static_cast<int>(ket->bits.size()));
    return QuantumState::basis(width, index);
  }
  if (const auto* named = std::get_if<NamedState>(&spec)) {
    const auto m = named_state_width(named->name);
    if (!m) throw std::invalid_argument("unknown state " + named->name);
    check_width(*m);
    const double r = 1.0 / std::numbers::sqrt2;
    KetXcd v = KetXcd::Zero(Eigen::Index{1} << *m);
    const std::string& n = named->name;
    if (n == "plus") v << r, r;
    if (n == "minus") v << r, -r;
    if (n == "bell00") v << r, 0, 0, r;
    if (n == "bell01") v << 0, r, r, 0;
    if (n == "bell10") v << r, 0, 0, -r;
    if (n == "bell11") v << 0, r, -r, 0;
    return QuantumState(width, std::move(v));
  }
  const auto& amps = std::get<AmplitudeList>(spec);
  if (!detail::is_power_of_two(static_cast<Eigen::Index>(amps.size())) || amps.size() < 2) {
    throw std::invalid_argument("amplitude list length " + std::to_string(amps.size()) +
                                " is not 2^m with m >= 1");
  }
  KetXcd v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v[static_cast<Eigen::Index>(i)] = amps[i];
  if (!detail::all_finite(v)) throw std::invalid_argument("non-finite amplitude");
  const double norm = v.norm();
  if (norm == 0.0) throw std::invalid_argument("zero vector is not a state");
  if (std::abs(norm - 1.0) > tolerance::kDescriptorNorm) {
    throw std::invalid_argument("amplitude list has norm " + std::to_string(norm) +
                                ", expected 1 within 1e-6");
  }
  check_width(detail::log2_exact(v.size()));
  return QuantumState::normalized(width, std::move(v));
}

void GateLibrary::add_family(MeasurementFamily f) {
  check_registry_name(f.name());
  if (is_std_gate(f.name())) {
    throw std::invalid_argument("cannot redefine library gate " + f.name());
  }
  if (const auto check = validate_family(f); !check) throw std::invalid_argument(check.message);
  const std::string key = f.name();
  families_.insert_or_assign(key, std::move(f));
}

void GateLibrary::add_state(std::string name, QuantumState s) {
  if (name.empty() || name == "ket" || named_state_width(name)) {
    throw std::invalid_argument("cannot register state under name '" + name + "'");
  }
  states_.insert_or_assign(std::move(name), std::move(s));
}

void GateLibrary::load_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("registry is not valid JSON: ") + e.what());
  }
  try {
    if (doc.is_array()) {
      for (const auto& f : doc) add_family(family_from(f));
      return;
    }
    if (doc.is_object() && doc.contains("outcomes")) {
      add_family(family_from(doc));
      return;
    }
    if (!doc.is_object()) throw std::invalid_argument("registry must be an object or array");
    if (doc.contains("families")) {
      for (const auto& f : doc.at("families")) add_family(family_from(f));
    }
    if (doc.contains("states")) {
      for (const auto& s : doc.at("states")) {
        AmplitudeList amps;
        for (const auto& a : s.at("amplitudes")) amps.push_back(parse_complex(a));
        const int width = detail::log2_exact(static_cast<Eigen::Index>(amps.size()));
        add_state(s.at("name").get<std::string>(), make_state(amps, width));
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed registry: ") + e.what());
  }
}

void GateLibrary::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read registry " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  load_json(buf.str());
}

bool GateLibrary::has_family(std::string_view name) const {
  return families_.find(name) != families_.end();
}

std::optional<int> GateLibrary::state_width(std::string_view name) const {
  if (auto w = named_state_width(name)) return w;
  if (auto it = states_.find(name); it != states_.end()) return it->second.width();
  return std::nullopt;
}

QuantumState GateLibrary::state(std::string_view name) const {
  if (auto w = named_state_width(name)) return make_state(NamedState{std::string(name)}, *w);
  if (auto it = states_.find(name); it != states_.end()) return it->second;
  throw std::invalid_argument("unknown state " + std::string(name));
}

MeasurementFamily GateLibrary::base_family(std::string_view name,
                                           std::span<const std::int64_t> params) const {
  if (auto it = families_.find(name); it != families_.end()) {
    if (!params.empty()) {
      throw std::invalid_argument("registered gate " + std::string(name) + " takes no parameters");
    }
    return it->second;
  }
  return std_gate(name, params);
}

MeasurementFamily GateLibrary::resolve(std::string_view name, std::span<const std::int64_t> params,
                                       std::optional<std::int64_t> power_log2, bool negate) const {
  std::size_t controls = 0;
  std::string_view core = name;
  while (!has_family(core) && !is_std_gate(core) && core.size() > 1 && core[0] == 'c') {
    core.remove_prefix(1);
    ++controls;
  }
  if (!has_family(core) && !is_std_gate(core)) {
    throw std::invalid_argument("unknown gate " + std::string(name));
  }
  MeasurementFamily f = base_family(core, params);
  std::string shown = display_name(name, params);
  if (power_log2 || controls > 0) {
    if (!f.is_unitary()) {
      throw std::invalid_argument("gate " + std::string(name) +
                                  ": powers and controls apply to unitaries only");
    }
    OperatorXcd u = f.outcomes().front().op;
    if (power_log2) {
      u = power_of_two_power(std::move(u), *power_log2);
      shown += "_pow(" + std::to_string(*power_log2) + ")";
    }
    for (std::size_t i = 0; i < controls; ++i) u = controlled(u);
    f = MeasurementFamily::unitary(shown, std::move(u));
  }
  return negate ? f.negated() : f;
}

MeasurementFamily family_from_json(std::string_view text) {
  try {
    return family_from(json::parse(text));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed family document: ") + e.what());
  }
}

}  // namespace qcasm
