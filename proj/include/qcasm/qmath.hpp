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

// Dense complex linear algebra for qubit registers.
//
// Basis ordering: wire 1 is the most significant bit, so the basis index of
// |b1 b2 ... bw> is sum_i b_i * 2^(w-i). Wires are 1-based throughout.
//
// Every gate is a measurement family {A_i} with sum_i A_i^dagger A_i = I; a
// unitary is the single-outcome family with label 0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace qcasm {

namespace tolerance {
inline constexpr double kCompleteness = 1e-9;
inline constexpr double kUnitarity = 1e-9;
inline constexpr double kNormalization = 1e-9;
inline constexpr double kImpossibleBranch = 1e-12;
inline constexpr double kDescriptorNorm = 1e-6;
}  // namespace tolerance

inline constexpr int kMaxWidth = 24;

template <typename Scalar>
using Ket = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using Operator = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using Complex = std::complex<double>;
using KetXcd = Ket<double>;
using OperatorXcd = Operator<double>;

/// Wires a k-qubit operator acts on, in operator order (first entry is the
/// most significant qubit of the operator's local index).
using WireTuple = std::vector<int>;

/// A zero-probability outcome was selected for collapse.
class ImpossibleBranch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

inline int log2_exact(Eigen::Index n) {
  int k = 0;
  while ((Eigen::Index{1} << k) < n) ++k;
  return k;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const auto& z = m.derived().data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

// Bit offsets of each local basis index of the operator inside the global
// amplitude index, plus the mask of all touched bits.
inline std::pair<std::vector<std::uint64_t>, std::uint64_t> embedding_offsets(
    std::span<const int> wires, int width) {
  const int k = static_cast<int>(wires.size());
  std::uint64_t mask = 0;
  for (int w : wires) {
    if (w < 1 || w > width) {
      throw std::out_of_range("wire " + std::to_string(w) + " outside 1.." + std::to_string(width));
    }
    const std::uint64_t bit = std::uint64_t{1} << (width - w);
    if (mask & bit) throw std::invalid_argument("wire " + std::to_string(w) + " repeated in tuple");
    mask |= bit;
  }
  std::vector<std::uint64_t> offsets(std::size_t{1} << k, 0);
  for (std::size_t local = 0; local < offsets.size(); ++local) {
    std::uint64_t off = 0;
    for (int j = 0; j < k; ++j) {
      if ((local >> (k - 1 - j)) & 1U) off |= std::uint64_t{1} << (width - wires[j]);
    }
    offsets[local] = off;
  }
  return {std::move(offsets), mask};
}

}  // namespace detail

/// Applies `op` (2^k x 2^k) to the wires `wires` of a width-`width` amplitude
/// vector by stride arithmetic. The result is not renormalized.
template <typename Scalar, typename OpDerived>
Ket<Scalar> apply_embedded(const Ket<Scalar>& amplitudes, int width,
                           const Eigen::MatrixBase<OpDerived>& op, std::span<const int> wires) {
  const Eigen::Index dim = Eigen::Index{1} << wires.size();
  if (op.rows() != dim || op.cols() != dim) {
    throw std::invalid_argument("operator dimension " + std::to_string(op.rows()) + "x" +
                                std::to_string(op.cols()) + " does not match " +
                                std::to_string(wires.size()) + " wires");
  }
  if (amplitudes.size() != (Eigen::Index{1} << width)) {
    throw std::invalid_argument("amplitude vector length does not match width");
  }
  const auto [offsets, mask] = detail::embedding_offsets(wires, width);
  Ket<Scalar> out(amplitudes.size());
  Ket<Scalar> local(dim);
  Ket<Scalar> mapped(dim);
  const std::uint64_t total = std::uint64_t{1} << width;
  for (std::uint64_t base = 0; base < total; ++base) {
    if (base & mask) continue;
    for (Eigen::Index l = 0; l < dim; ++l) local[l] = amplitudes[base | offsets[l]];
    mapped.noalias() = op * local;
    for (Eigen::Index l = 0; l < dim; ++l) out[base | offsets[l]] = mapped[l];
  }
  return out;
}

/// Normalized pure state on `width` wires.
template <typename Scalar>
class BasicQuantumState {
 public:
  BasicQuantumState(int width, Ket<Scalar> amplitudes)
      : width_(width), amplitudes_(std::move(amplitudes)) {
    if (width < 1 || width > kMaxWidth) {
      throw std::invalid_argument("width " + std::to_string(width) + " outside 1.." +
                                  std::to_string(kMaxWidth));
    }
    if (amplitudes_.size() != (Eigen::Index{1} << width)) {
      throw std::invalid_argument("expected " + std::to_string(std::size_t{1} << width) +
                                  " amplitudes, got " + std::to_string(amplitudes_.size()));
    }
    if (!detail::all_finite(amplitudes_)) throw std::invalid_argument("non-finite amplitude");
    const Scalar norm2 = amplitudes_.squaredNorm();
    if (std::abs(norm2 - Scalar(1)) > Scalar(tolerance::kNormalization)) {
      throw std::invalid_argument("state is not normalized (norm^2 = " + std::to_string(norm2) +
                                  ")");
    }
  }

  static BasicQuantumState basis(int width, std::uint64_t index) {
    Ket<Scalar> v = Ket<Scalar>::Zero(Eigen::Index{1} << width);
    if (index >= static_cast<std::uint64_t>(v.size())) {
      throw std::out_of_range("basis index out of range");
    }
    v[static_cast<Eigen::Index>(index)] = 1;
    return BasicQuantumState(width, std::move(v));
  }

  /// Rescales a nonzero vector to unit norm.
  static BasicQuantumState normalized(int width, Ket<Scalar> v) {
    const Scalar n = v.norm();
    if (!(n > Scalar(0))) throw std::invalid_argument("zero vector cannot be normalized");
    v /= n;
    return BasicQuantumState(width, std::move(v));
  }

  int width() const { return width_; }
  const Ket<Scalar>& amplitudes() const { return amplitudes_; }
  std::complex<Scalar> operator[](Eigen::Index i) const { return amplitudes_[i]; }

  /// Tensor product with `other` placed on the following wires.
  BasicQuantumState tensor(const BasicQuantumState& other) const {
    Ket<Scalar> v(amplitudes_.size() * other.amplitudes_.size());
    for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) {
      v.segment(i * other.amplitudes_.size(), other.amplitudes_.size()) =
          amplitudes_[i] * other.amplitudes_;
    }
    return BasicQuantumState(width_ + other.width_, std::move(v));
  }

 private:
  int width_;
  Ket<Scalar> amplitudes_;
};

using QuantumState = BasicQuantumState<double>;

template <typename Scalar>
struct BasicOutcome {
  std::int64_t label = 0;
  Operator<Scalar> op;
};

/// Indexed operator family {A_i}. Construction checks labels and dimensions;
/// completeness is reported by validate_family.
template <typename Scalar>
class BasicMeasurementFamily {
 public:
  using Outcome = BasicOutcome<Scalar>;

  BasicMeasurementFamily(std::string name, int arity, std::vector<Outcome> outcomes)
      : name_(std::move(name)), arity_(arity), outcomes_(std::move(outcomes)) {
    if (arity_ < 1) throw std::invalid_argument("family arity must be positive");
    if (outcomes_.empty()) throw std::invalid_argument("family needs at least one outcome");
    const Eigen::Index dim = Eigen::Index{1} << arity_;
    for (std::size_t i = 0; i < outcomes_.size(); ++i) {
      const auto& o = outcomes_[i];
      if (o.op.rows() != dim || o.op.cols() != dim) {
        throw std::invalid_argument("outcome " + std::to_string(o.label) + " of " + name_ +
                                    " is " + std::to_string(o.op.rows()) + "x" +
                                    std::to_string(o.op.cols()) + ", expected " +
                                    std::to_string(dim) + "x" + std::to_string(dim));
      }
      if (!detail::all_finite(o.op)) throw std::invalid_argument("non-finite operator entry");
      if (o.label < 0) throw std::invalid_argument("outcome labels must be non-negative");
      for (std::size_t j = 0; j < i; ++j) {
        if (outcomes_[j].label == o.label) {
          throw std::invalid_argument("duplicate outcome label " + std::to_string(o.label));
        }
      }
    }
  }

  /// Degenerate family of a single unitary, labelled 0.
  static BasicMeasurementFamily unitary(std::string name, Operator<Scalar> u) {
    const int k = detail::log2_exact(u.rows());
    return BasicMeasurementFamily(std::move(name), k, {Outcome{0, std::move(u)}});
  }

  const std::string& name() const { return name_; }
  int arity() const { return arity_; }
  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  bool is_unitary() const { return outcomes_.size() == 1; }

  const Outcome& outcome(std::int64_t label) const {
    for (const auto& o : outcomes_) {
      if (o.label == label) return o;
    }
    throw std::out_of_range("family " + name_ + " has no outcome " + std::to_string(label));
  }

  /// The same family with every operator multiplied by -1.
  BasicMeasurementFamily negated() const {
    std::vector<Outcome> out = outcomes_;
    for (auto& o : out) o.op = -o.op;
    return BasicMeasurementFamily("-" + name_, arity_, std::move(out));
  }

 private:
  std::string name_;
  int arity_;
  std::vector<Outcome> outcomes_;
};

using MeasurementFamily = BasicMeasurementFamily<double>;

/// Result of checking sum_i A_i^dagger A_i against the identity.
struct FamilyCheck {
  bool ok = true;
  double max_deviation = 0.0;
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  std::string message;
  explicit operator bool() const { return ok; }
};

template <typename Scalar>
FamilyCheck validate_family(const BasicMeasurementFamily<Scalar>& f) {
  const Eigen::Index dim = Eigen::Index{1} << f.arity();
  Operator<Scalar> sum = Operator<Scalar>::Zero(dim, dim);
  for (const auto& o : f.outcomes()) sum.noalias() += o.op.adjoint() * o.op;
  sum -= Operator<Scalar>::Identity(dim, dim);
  FamilyCheck check;
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double d = static_cast<double>(std::abs(sum(r, c)));
      if (d > check.max_deviation) {
        check.max_deviation = d;
        check.row = r;
        check.col = c;
      }
    }
  }
  check.ok = check.max_deviation <= tolerance::kCompleteness;
  if (!check.ok) {
    check.message = "family " + f.name() + " is incomplete: sum A^dagger A deviates from identity by " +
                    std::to_string(check.max_deviation) + " at entry (" + std::to_string(check.row) +
                    "," + std::to_string(check.col) + ")";
  }
  return check;
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u, double tol = tolerance::kUnitarity) {
  if (u.rows() != u.cols()) return false;
  const auto deviation =
      (u.adjoint() * u - Derived::PlainObject::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  return static_cast<double>(deviation) <= tol;
}

/// ||A_i(u)|s>||^2, clamped to [0,1].
template <typename Scalar>
Scalar outcome_probability(const BasicQuantumState<Scalar>& s,
                           const BasicMeasurementFamily<Scalar>& f, std::span<const int> wires,
                           std::int64_t label) {
  if (static_cast<int>(wires.size()) != f.arity()) {
    throw std::invalid_argument("family " + f.name() + " has arity " + std::to_string(f.arity()) +
                                " but " + std::to_string(wires.size()) + " wires given");
  }
  const auto& o = f.outcome(label);
  const Scalar p = apply_embedded<Scalar>(s.amplitudes(), s.width(), o.op, wires).squaredNorm();
  return std::clamp(p, Scalar(0), Scalar(1));
}

/// Outcome probability together with the post-measurement state. Throws
/// ImpossibleBranch when the probability is below the pruning threshold.
template <typename Scalar>
std::pair<Scalar, BasicQuantumState<Scalar>> measure_outcome(
    const BasicQuantumState<Scalar>& s, const BasicMeasurementFamily<Scalar>& f,
    std::span<const int> wires, std::int64_t label) {
  if (static_cast<int>(wires.size()) != f.arity()) {
    throw std::invalid_argument("family " + f.name() + " has arity " + std::to_string(f.arity()) +
                                " but " + std::to_string(wires.size()) + " wires given");
  }
  Ket<Scalar> projected =
      apply_embedded<Scalar>(s.amplitudes(), s.width(), f.outcome(label).op, wires);
  const Scalar p = projected.squaredNorm();
  if (p < Scalar(tolerance::kImpossibleBranch)) {
    throw ImpossibleBranch("outcome " + std::to_string(label) + " of " + f.name() +
                           " has probability " + std::to_string(p));
  }
  projected /= std::sqrt(p);
  return {std::clamp(p, Scalar(0), Scalar(1)),
          BasicQuantumState<Scalar>(s.width(), std::move(projected))};
}

template <typename Scalar>
BasicQuantumState<Scalar> collapse(const BasicQuantumState<Scalar>& s,
                                   const BasicMeasurementFamily<Scalar>& f,
                                   std::span<const int> wires, std::int64_t label) {
  return measure_outcome(s, f, wires, label).second;
}

template <typename Scalar, typename Derived>
BasicQuantumState<Scalar> apply_unitary(const BasicQuantumState<Scalar>& s,
                                        const Eigen::MatrixBase<Derived>& u,
                                        std::span<const int> wires) {
  if (!is_unitary(u)) throw std::invalid_argument("matrix is not unitary");
  Ket<Scalar> v = apply_embedded<Scalar>(s.amplitudes(), s.width(), u, wires);
  v /= v.norm();
  return BasicQuantumState<Scalar>(s.width(), std::move(v));
}

/// Block-diagonal (I, U): the first (most significant) qubit controls.
template <typename Derived>
typename Derived::PlainObject controlled(const Eigen::MatrixBase<Derived>& u) {
  if (!is_unitary(u)) throw std::invalid_argument("controlled() requires a unitary");
  const Eigen::Index d = u.rows();
  typename Derived::PlainObject c = Derived::PlainObject::Identity(2 * d, 2 * d);
  c.bottomRightCorner(d, d) = u;
  return c;
}

/// |<a|b>|, insensitive to global phase.
template <typename Scalar>
Scalar fidelity_up_to_phase(const BasicQuantumState<Scalar>& a, const BasicQuantumState<Scalar>& b) {
  if (a.width() != b.width()) throw std::invalid_argument("fidelity of states of different widths");
  return std::min(Scalar(1), std::abs(a.amplitudes().dot(b.amplitudes())));
}

// ---------------------------------------------------------------------------
// Standard library and state descriptors (double precision only).

/// n-qubit Fourier matrix, entries w^{jk}/sqrt(2^n) with w = e^{2 pi i/2^n}.
OperatorXcd fourier_matrix(int n, bool inverse = false);

/// Library entries by name:
///   I (optional n), H, X, Y, Z, SWAP, CNOT, R_k, QFT_n, QFTdg_n, SM, PM,
///   Phase_(j, n) = diag(1, e^{2 pi i j / 2^n}),
///   V_n = 2|0^n><0^n| - I,
///   Oracle_(n, m): |x, y> -> |x, y xor [x = m]> on n+1 wires.
MeasurementFamily std_gate(std::string_view name, std::span<const std::int64_t> params = {});
bool is_std_gate(std::string_view name);

struct KetBits {
  std::string bits;
  friend bool operator==(const KetBits&, const KetBits&) = default;
};
struct NamedState {
  std::string name;
  friend bool operator==(const NamedState&, const NamedState&) = default;
};
using AmplitudeList = std::vector<Complex>;
using StateDescriptor = std::variant<KetBits, NamedState, AmplitudeList>;

/// Built-in states: basis kets, bell00/01/10/11, plus, minus; amplitude lists
/// within 1e-6 of unit norm are renormalized exactly.
QuantumState make_state(const StateDescriptor& spec, int width);
std::optional<int> named_state_width(std::string_view name);

/// Registry of user families and states layered over the standard library.
class GateLibrary {
 public:
  void add_family(MeasurementFamily f);
  void add_state(std::string name, QuantumState s);

  /// Accepts a single family document, {"families": [...], "states": [...]}
  /// or an array of family documents.
  void load_json(std::string_view text);
  void load_file(const std::string& path);

  bool has_family(std::string_view name) const;
  std::optional<int> state_width(std::string_view name) const;
  QuantumState state(std::string_view name) const;

  /// Resolves a gate reference. A leading 'c' not part of a known name means
  /// controlled; `power_log2` raises the unitary to the power 2^power_log2.
  MeasurementFamily resolve(std::string_view name, std::span<const std::int64_t> params,
                            std::optional<std::int64_t> power_log2 = std::nullopt,
                            bool negate = false) const;

 private:
  MeasurementFamily base_family(std::string_view name,
                                std::span<const std::int64_t> params) const;
  std::map<std::string, MeasurementFamily, std::less<>> families_;
  std::map<std::string, QuantumState, std::less<>> states_;
};

MeasurementFamily family_from_json(std::string_view text);

}  // namespace qcasm
