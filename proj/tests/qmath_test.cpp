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

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace {

using namespace qcasm;
using namespace qcasm::testing;

constexpr double kTol = 1e-12;

MeasurementFamily gate(std::string_view name, std::vector<std::int64_t> params = {}) {
  return std_gate(name, params);
}

OperatorXcd op(std::string_view name, std::vector<std::int64_t> params = {}) {
  return gate(name, params).outcomes().front().op;
}

OperatorXcd random_unitary(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  const Eigen::Index d = Eigen::Index{1} << k;
  OperatorXcd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
  }
  Eigen::HouseholderQR<OperatorXcd> qr(m);
  return qr.householderQ();
}

TEST(State, BasisKetOrdersWireOneFirst) {
  const QuantumState s = make_state(KetBits{"011"}, 3);
  EXPECT_EQ(s.width(), 3);
  EXPECT_NEAR(std::abs(s[3] - Complex(1)), 0.0, kTol);
}

TEST(State, NamedStates) {
  const double r = 1 / std::sqrt(2.0);
  const QuantumState b = make_state(NamedState{"bell00"}, 2);
  EXPECT_NEAR(b[0].real(), r, kTol);
  EXPECT_NEAR(std::abs(b[1]), 0.0, kTol);
  EXPECT_NEAR(std::abs(b[2]), 0.0, kTol);
  EXPECT_NEAR(b[3].real(), r, kTol);
  const QuantumState m = make_state(NamedState{"minus"}, 1);
  EXPECT_NEAR(m[1].real(), -r, kTol);
  EXPECT_THROW(make_state(NamedState{"bell00"}, 3), std::invalid_argument);
  EXPECT_THROW(make_state(NamedState{"nope"}, 1), std::invalid_argument);
}

TEST(State, AmplitudeListsRenormalizeWithinDescriptorTolerance) {
  const QuantumState s = make_state(AmplitudeList{0.6, Complex(0, 0.8 + 5e-7)}, 1);
  EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-15);
  EXPECT_THROW(make_state(AmplitudeList{0.6, 0.81}, 1), std::invalid_argument);
  EXPECT_THROW(make_state(AmplitudeList{1, 0, 0}, 2), std::invalid_argument);
  EXPECT_THROW(make_state(AmplitudeList{1, 0}, 2), std::invalid_argument);
  EXPECT_THROW(make_state(KetBits{"012"}, 3), std::invalid_argument);
}

TEST(State, ConstructorRejectsBadInput) {
  EXPECT_THROW(QuantumState(1, KetXcd::Zero(2)), std::invalid_argument);
  EXPECT_THROW(QuantumState::basis(kMaxWidth + 1, 0), std::invalid_argument);
  EXPECT_THROW(QuantumState::basis(2, 4), std::out_of_range);
  EXPECT_THROW(QuantumState::normalized(1, KetXcd::Zero(2)), std::invalid_argument);
}

TEST(State, TensorPlacesOtherOnLaterWires) {
  const QuantumState s = QuantumState::basis(1, 1).tensor(QuantumState::basis(2, 2));
  EXPECT_EQ(s.width(), 3);
  EXPECT_NEAR(std::abs(s[6]), 1.0, kTol);
}

TEST(Measurement, StandardMeasurementProbabilities) {
  const std::vector<int> w1{1};
  const auto plus = apply_unitary(QuantumState::basis(1, 0), op("H"), w1);
  EXPECT_NEAR(outcome_probability(plus, gate("SM"), w1, 0), 0.5, kTol);
  EXPECT_NEAR(outcome_probability(QuantumState::basis(1, 1), gate("SM"), w1, 1), 1.0, kTol);
  EXPECT_THROW(measure_outcome(QuantumState::basis(1, 0), gate("SM"), w1, 1), ImpossibleBranch);
}

TEST(Measurement, ParityCollapseMatchesHandComputation) {
  // (|c,c,t> + |c,c^1,t>)/sqrt2 measured by PM on (1,2).
  for (int c = 0; c <= 1; ++c) {
    for (int t = 0; t <= 1; ++t) {
      KetXcd v = KetXcd::Zero(8);
      v[4 * c + 2 * c + t] = 1 / std::sqrt(2.0);
      v[4 * c + 2 * (c ^ 1) + t] = 1 / std::sqrt(2.0);
      const QuantumState s(3, v);
      const std::vector<int> w{1, 2};
      for (int p = 0; p <= 1; ++p) {
        auto [prob, after] = measure_outcome(s, gate("PM"), w, p);
        EXPECT_NEAR(prob, 0.5, kTol);
        EXPECT_NEAR(fidelity_up_to_phase(after, QuantumState::basis(3, 4 * c + 2 * (c ^ p) + t)), 1.0, kTol);
      }
    }
  }
  EXPECT_NEAR(outcome_probability(QuantumState::basis(2, 1), gate("PM"), std::vector<int>{1, 2}, 1), 1.0, kTol);
}

TEST(Measurement, ArityMismatchThrows) {
  EXPECT_THROW(outcome_probability(QuantumState::basis(2, 0), gate("PM"), std::vector<int>{1}, 0),
               std::invalid_argument);
}

TEST(Gates, ControlledMatchesDefinitions) {
  EXPECT_TRUE(controlled(op("X")).isApprox(op("CNOT")));
  OperatorXcd cz = OperatorXcd::Identity(4, 4);
  cz(3, 3) = -1;
  EXPECT_TRUE(controlled(op("Z")).isApprox(cz));
  OperatorXcd cr2 = OperatorXcd::Identity(4, 4);
  cr2(3, 3) = Complex(0, 1);
  EXPECT_LT((controlled(op("R", {2})) - cr2).cwiseAbs().maxCoeff(), kTol);
  EXPECT_THROW(controlled(OperatorXcd::Constant(2, 2, 1.0)), std::invalid_argument);
}

TEST(Gates, EveryLibraryGateIsAValidFamily) {
  const std::vector<std::pair<std::string, std::vector<std::int64_t>>> all = {
      {"I", {}},  {"I", {3}},      {"H", {}},      {"X", {}},          {"Y", {}},   {"Z", {}},
      {"SWAP", {}}, {"CNOT", {}}, {"R", {1}},     {"R", {5}},         {"QFT", {3}}, {"QFTdg", {2}},
      {"SM", {}}, {"PM", {}},      {"Phase", {3, 2}}, {"V", {3}},     {"Oracle", {2, 1}}};
  for (const auto& [name, params] : all) {
    const MeasurementFamily f = gate(name, params);
    EXPECT_TRUE(validate_family(f)) << name;
    if (f.is_unitary()) {
      EXPECT_TRUE(is_unitary(f.outcomes()[0].op)) << name;
    }
  }
}

TEST(Gates, ParameterErrors) {
  EXPECT_THROW(gate("H", {1}), std::invalid_argument);
  EXPECT_THROW(gate("R", {}), std::invalid_argument);
  EXPECT_THROW(gate("R", {0}), std::invalid_argument);
  EXPECT_THROW(gate("QFT", {0}), std::invalid_argument);
  EXPECT_THROW(gate("Oracle", {2, 4}), std::invalid_argument);
  EXPECT_THROW(gate("Nope"), std::invalid_argument);
}

TEST(Gates, FourierMatrixAgainstDirectDft) {
  for (int n = 1; n <= 4; ++n) {
    const Eigen::Index N = Eigen::Index{1} << n;
    const OperatorXcd f = op("QFT", {n});
    for (Eigen::Index j = 0; j < N; ++j) {
      for (Eigen::Index k = 0; k < N; ++k) {
        const Complex want = std::exp(Complex(0, 2 * std::numbers::pi * double(j * k) / double(N))) /
                             std::sqrt(double(N));
        EXPECT_NEAR(std::abs(f(j, k) - want), 0.0, 1e-12);
      }
    }
    EXPECT_TRUE((op("QFTdg", {n}) * f).isIdentity(1e-12));
  }
}

TEST(Gates, PhasePowersCompose) {
  // Phase_(1,2)^(2^1) = diag(1, i^2) = Z.
  GateLibrary lib;
  const auto f = lib.resolve("Phase", std::vector<std::int64_t>{1, 2}, 1);
  EXPECT_LT((f.outcomes()[0].op - op("Z")).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(lib.resolve("SM", {}, 1), std::invalid_argument);
}

TEST(Gates, GroverPieces) {
  const OperatorXcd v = op("V", {2});
  EXPECT_NEAR(v(0, 0).real(), 1.0, kTol);
  EXPECT_NEAR(v(3, 3).real(), -1.0, kTol);
  const OperatorXcd o = op("Oracle", {2, 3});
  // |11,0> -> |11,1>, |01,0> unchanged.
  EXPECT_NEAR(std::abs(o(7, 6)), 1.0, kTol);
  EXPECT_NEAR(std::abs(o(2, 2)), 1.0, kTol);
}

TEST(Embedding, StrideArithmeticMatchesPermutationOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int width = std::uniform_int_distribution<int>(1, 4)(rng);
    const int k = std::uniform_int_distribution<int>(1, width)(rng);
    std::vector<int> wires(width);
    std::iota(wires.begin(), wires.end(), 1);
    std::shuffle(wires.begin(), wires.end(), rng);
    wires.resize(k);
    const OperatorXcd u = random_unitary(k, rng);
    const QuantumState s = random_state(width, rng);
    const KetXcd got = apply_embedded<double>(s.amplitudes(), width, u, wires);
    const KetXcd want = embed_by_permutation(u, wires, width) * s.amplitudes();
    ASSERT_LT((got - want).cwiseAbs().maxCoeff(), 1e-12) << "width " << width << " k " << k;
  }
}

TEST(Embedding, RejectsBadWires) {
  const KetXcd v = QuantumState::basis(2, 0).amplitudes();
  EXPECT_THROW(apply_embedded<double>(v, 2, op("CNOT"), std::vector<int>{1, 1}), std::invalid_argument);
  EXPECT_THROW(apply_embedded<double>(v, 2, op("H"), std::vector<int>{3}), std::out_of_range);
  EXPECT_THROW(apply_embedded<double>(v, 2, op("H"), std::vector<int>{1, 2}), std::invalid_argument);
}

TEST(Family, CompletenessAndLabels) {
  OperatorXcd half = OperatorXcd::Identity(2, 2) * 0.5;
  const MeasurementFamily bad("Half", 1, {{0, half}});
  EXPECT_FALSE(validate_family(bad));
  EXPECT_THROW(MeasurementFamily("D", 1, {{0, half}, {0, half}}), std::invalid_argument);
  EXPECT_THROW(MeasurementFamily("N", 1, {{-1, half}}), std::invalid_argument);
  EXPECT_THROW(MeasurementFamily("W", 2, {{0, half}}), std::invalid_argument);
}

TEST(Family, NegationFlipsEveryOperator) {
  const auto f = gate("SM").negated();
  EXPECT_NEAR(f.outcome(0).op(0, 0).real(), -1.0, kTol);
  EXPECT_TRUE(validate_family(f));
}

TEST(Fidelity, InsensitiveToGlobalPhase) {
  std::mt19937_64 rng(3);
  const QuantumState s = random_state(3, rng);
  const QuantumState t(3, s.amplitudes() * std::polar(1.0, 0.7));
  EXPECT_NEAR(fidelity_up_to_phase(s, t), 1.0, 1e-12);
  EXPECT_NEAR(fidelity_up_to_phase(QuantumState::basis(1, 0), QuantumState::basis(1, 1)), 0.0, kTol);
}

TEST(Library, LoadsFamiliesAndStates) {
  GateLibrary lib;
  lib.load_json(R"({
    "families": [{"name": "Weak", "arity": 1, "outcomes": [
      {"label": 0, "matrix": [[1, 0], [0, 0.6]]},
      {"label": 1, "matrix": [[0, 0], [0, 0.8]]}]}],
    "states": [{"name": "psi", "amplitudes": [[0.6, 0], [0, 0.8]]}]
  })");
  EXPECT_TRUE(lib.has_family("Weak"));
  EXPECT_EQ(lib.state_width("psi"), 1);
  EXPECT_EQ(lib.state_width("bell11"), 2);
  EXPECT_FALSE(lib.state_width("zeta"));
  const auto w = lib.resolve("Weak", {});
  EXPECT_EQ(w.outcomes().size(), 2u);
  EXPECT_THROW(lib.resolve("cWeak", {}), std::invalid_argument);  // controls need a unitary
  EXPECT_THROW(lib.resolve("Weak", std::vector<std::int64_t>{1}), std::invalid_argument);
}

TEST(Library, RejectsBadRegistrations) {
  GateLibrary lib;
  EXPECT_THROW(lib.load_json("{"), std::invalid_argument);
  EXPECT_THROW(lib.load_json(R"({"name": "H", "arity": 1, "outcomes": [{"label": 0, "matrix": [[1,0],[0,1]]}]})"),
               std::invalid_argument);
  EXPECT_THROW(lib.load_json(R"({"name": "lower", "arity": 1, "outcomes": [{"label": 0, "matrix": [[1,0],[0,1]]}]})"),
               std::invalid_argument);
  EXPECT_THROW(lib.load_json(R"({"name": "Short", "arity": 1, "outcomes": [{"label": 0, "matrix": [[1,0]]}]})"),
               std::invalid_argument);
  EXPECT_THROW(lib.load_json(R"({"name": "Leaky", "arity": 1, "outcomes": [{"label": 0, "matrix": [[1,0],[0,0]]}]})"),
               std::invalid_argument);
  EXPECT_THROW(lib.add_state("bell00", QuantumState::basis(2, 0)), std::invalid_argument);
}

TEST(Library, ControlPrefixStacks) {
  GateLibrary lib;
  const auto ccx = lib.resolve("ccX", {});
  EXPECT_EQ(ccx.arity(), 3);
  EXPECT_NEAR(std::abs(ccx.outcomes()[0].op(7, 6)), 1.0, kTol);
  EXPECT_NEAR(std::abs(ccx.outcomes()[0].op(5, 5)), 1.0, kTol);
  EXPECT_THROW(lib.resolve("cc", {}), std::invalid_argument);
}

}  // namespace
