// Copyright 2026 The guoq Authors
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

// Dense unitary semantics of gates and circuits.
//
// Qubit 0 is the most significant bit of a basis-state index, so a gate on
// q1 of a two-qubit circuit embeds as (I ⊗ U). For a two-qubit gate the first
// operand is the more significant local bit (CX control first).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>

#include "guoq/circuit.hpp"
#include "guoq/noise_model.hpp"

namespace guoq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Default upper bound on qubits for dense simulation.
inline constexpr std::size_t kSimulationQubitCap = 12;
/// Slack on every "distance <= bound" comparison.
inline constexpr double kDistanceSlack = 1e-9;

class QubitCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Square unitary of dimension 2^n.
class UnitaryMatrix {
 public:
  UnitaryMatrix() = default;

  /// Wraps `m`, checking shape and unitarity.
  static UnitaryMatrix from_matrix(Matrix m, double tol = 1e-10) {
    UnitaryMatrix u(std::move(m));
    if (u.m_.rows() != u.m_.cols()) throw std::invalid_argument("unitary must be square");
    const auto dim = static_cast<std::size_t>(u.m_.rows());
    if (dim == 0 || (dim & (dim - 1)) != 0) throw std::invalid_argument("unitary dimension must be 2^n");
    if (u.unitarity_error() > tol) throw std::invalid_argument("matrix is not unitary");
    return u;
  }

  static UnitaryMatrix identity(std::size_t num_qubits) {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
    return UnitaryMatrix(Matrix::Identity(dim, dim));
  }

  /// Unchecked wrap, for values produced by composing unitaries.
  static UnitaryMatrix trusted(Matrix m) { return UnitaryMatrix(std::move(m)); }

  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t num_qubits() const {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < dim()) ++n;
    return n;
  }
  Complex operator()(std::size_t r, std::size_t c) const {
    return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  /// max |(U†U - I)_ij|
  double unitarity_error() const {
    const Matrix d = m_.adjoint() * m_ - Matrix::Identity(m_.rows(), m_.cols());
    return d.cwiseAbs().maxCoeff();
  }

 private:
  explicit UnitaryMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// 2x2 or 4x4 matrix of a gate kind at the given parameter values.
inline Matrix gate_matrix(GateKind kind, std::span<const double> p) {
  using namespace std::complex_literals;
  const double r2 = 1.0 / std::sqrt(2.0);
  Matrix m;
  switch (kind) {
    case GateKind::U1:
      m.resize(2, 2);
      m << 1, 0, 0, std::exp(1i * p[0]);
      break;
    case GateKind::U2:
      m.resize(2, 2);
      m << r2, -r2 * std::exp(1i * p[1]), r2 * std::exp(1i * p[0]), r2 * std::exp(1i * (p[0] + p[1]));
      break;
    case GateKind::U3: {
      const double c = std::cos(p[0] / 2), s = std::sin(p[0] / 2);
      m.resize(2, 2);
      m << c, -std::exp(1i * p[2]) * s, std::exp(1i * p[1]) * s, std::exp(1i * (p[1] + p[2])) * c;
      break;
    }
    case GateKind::CX:
      m = Matrix::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
      break;
    case GateKind::Rz:
      m.resize(2, 2);
      m << std::exp(-0.5i * p[0]), 0, 0, std::exp(0.5i * p[0]);
      break;
    case GateKind::SX:
      m.resize(2, 2);
      m << 0.5 + 0.5i, 0.5 - 0.5i, 0.5 - 0.5i, 0.5 + 0.5i;
      break;
    case GateKind::X:
      m.resize(2, 2);
      m << 0, 1, 1, 0;
      break;
    case GateKind::Rx: {
      const double c = std::cos(p[0] / 2), s = std::sin(p[0] / 2);
      m.resize(2, 2);
      m << c, -1i * s, -1i * s, c;
      break;
    }
    case GateKind::Ry: {
      const double c = std::cos(p[0] / 2), s = std::sin(p[0] / 2);
      m.resize(2, 2);
      m << c, -s, s, c;
      break;
    }
    case GateKind::Rxx: {
      const double c = std::cos(p[0] / 2), s = std::sin(p[0] / 2);
      m = Matrix::Zero(4, 4);
      for (int i = 0; i < 4; ++i) {
        m(i, i) = c;
        m(i, 3 - i) = -1i * s;
      }
      break;
    }
    case GateKind::H:
      m.resize(2, 2);
      m << r2, r2, r2, -r2;
      break;
    case GateKind::T:
      m.resize(2, 2);
      m << 1, 0, 0, std::exp(1i * (kPi / 4));
      break;
    case GateKind::Tdg:
      m.resize(2, 2);
      m << 1, 0, 0, std::exp(-1i * (kPi / 4));
      break;
    case GateKind::S:
      m.resize(2, 2);
      m << 1, 0, 0, 1i;
      break;
    case GateKind::Sdg:
      m.resize(2, 2);
      m << 1, 0, 0, -1i;
      break;
  }
  return m;
}

inline Matrix gate_matrix(const Gate& g) {
  double p[3] = {0, 0, 0};
  for (std::size_t i = 0; i < g.params().size(); ++i) p[i] = g.param(i).to_radians();
  return gate_matrix(g.kind(), std::span<const double>(p, g.params().size()));
}

/// Standard matrix of a single gate (over its own operands).
inline UnitaryMatrix gate_unitary(const Gate& g) { return UnitaryMatrix::trusted(gate_matrix(g)); }

/// m <- E * m, where E embeds the local 2x2/4x4 matrix `u` on `qubits` of an
/// n-qubit register.
inline void apply_local_left(Matrix& m, const Matrix& u, std::span<const Qubit> qubits,
                             std::size_t n) {
  const Eigen::Index cols = m.cols();
  const std::size_t dim = std::size_t{1} << n;
  if (qubits.size() == 1) {
    const std::size_t s = std::size_t{1} << (n - 1 - qubits[0]);
    const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (Eigen::Index c = 0; c < cols; ++c) {
      Complex* col = m.col(c).data();
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & s) continue;
        const Complex v0 = col[i], v1 = col[i | s];
        col[i] = u00 * v0 + u01 * v1;
        col[i | s] = u10 * v0 + u11 * v1;
      }
    }
    return;
  }
  const std::size_t sa = std::size_t{1} << (n - 1 - qubits[0]);
  const std::size_t sb = std::size_t{1} << (n - 1 - qubits[1]);
  Complex uu[4][4];
  for (int r = 0; r < 4; ++r)
    for (int k = 0; k < 4; ++k) uu[r][k] = u(r, k);
  for (Eigen::Index c = 0; c < cols; ++c) {
    Complex* col = m.col(c).data();
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & (sa | sb)) continue;
      const std::size_t idx[4] = {i, i | sb, i | sa, i | sa | sb};
      Complex v[4];
      for (int k = 0; k < 4; ++k) v[k] = col[idx[k]];
      for (int r = 0; r < 4; ++r) {
        col[idx[r]] = uu[r][0] * v[0] + uu[r][1] * v[1] + uu[r][2] * v[2] + uu[r][3] * v[3];
      }
    }
  }
}

/// m <- m * E (E embedded as in apply_local_left).
inline void apply_local_right(Matrix& m, const Matrix& u, std::span<const Qubit> qubits,
                              std::size_t n) {
  // m * E = (E^T * m^T)^T; act on columns directly instead.
  const std::size_t dim = std::size_t{1} << n;
  if (qubits.size() == 1) {
    const std::size_t s = std::size_t{1} << (n - 1 - qubits[0]);
    for (std::size_t j = 0; j < dim; ++j) {
      if (j & s) continue;
      auto c0 = m.col(static_cast<Eigen::Index>(j));
      auto c1 = m.col(static_cast<Eigen::Index>(j | s));
      const Eigen::VectorXcd a = c0, b = c1;
      c0 = a * u(0, 0) + b * u(1, 0);
      c1 = a * u(0, 1) + b * u(1, 1);
    }
    return;
  }
  const std::size_t sa = std::size_t{1} << (n - 1 - qubits[0]);
  const std::size_t sb = std::size_t{1} << (n - 1 - qubits[1]);
  for (std::size_t j = 0; j < dim; ++j) {
    if (j & (sa | sb)) continue;
    const std::size_t idx[4] = {j, j | sb, j | sa, j | sa | sb};
    Eigen::VectorXcd v[4];
    for (int k = 0; k < 4; ++k) v[k] = m.col(static_cast<Eigen::Index>(idx[k]));
    for (int c = 0; c < 4; ++c) {
      m.col(static_cast<Eigen::Index>(idx[c])) =
          v[0] * u(0, c) + v[1] * u(1, c) + v[2] * u(2, c) + v[3] * u(3, c);
    }
  }
}

/// m <- G * m (or G† * m) for a gate of an n-qubit circuit.
inline void apply_gate_left(Matrix& m, const Gate& g, std::size_t n, bool adjoint = false) {
  const Matrix u = gate_matrix(g);
  if (adjoint) {
    apply_local_left(m, u.adjoint(), g.qubits(), n);
  } else {
    apply_local_left(m, u, g.qubits(), n);
  }
}

inline void check_cap(std::size_t num_qubits, std::size_t cap) {
  if (num_qubits > cap) {
    throw QubitCapError(std::to_string(num_qubits) + "-qubit circuit exceeds the simulation cap of " +
                        std::to_string(cap));
  }
}

/// Product of the gate unitaries in time order, each embedded on the full
/// register.
inline UnitaryMatrix circuit_unitary(const Circuit& c, std::size_t cap = kSimulationQubitCap) {
  check_cap(c.num_qubits(), cap);
  auto u = UnitaryMatrix::identity(c.num_qubits());
  for (const auto& g : c) apply_gate_left(u.matrix(), g, c.num_qubits());
  return u;
}

namespace detail {

// sqrt(1 - t^2) with t = |Tr(A)|/N for A = U†V, evaluated as
// (1 - t)(1 + t) where 1 - t = ||V - e^{i arg Tr} U||_F^2 / 2N. The
// difference form does not cancel catastrophically when U ≈ e^{iφ}V.
inline double hs_from_parts(Complex trace, double residual_sq, double n) {
  const double t = std::min(1.0, std::abs(trace) / n);
  const double one_minus_t = std::clamp(residual_sq / (2.0 * n), 0.0, 1.0);
  return std::sqrt(std::clamp(one_minus_t * (1.0 + t), 0.0, 1.0));
}

}  // namespace detail

/// Hilbert–Schmidt distance sqrt(1 - |Tr(U†V)|²/N²).
inline double hs_distance(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw std::invalid_argument("hs_distance: dimension mismatch");
  }
  const double n = static_cast<double>(u.rows());
  const Complex tr = (u.conjugate().cwiseProduct(v)).sum();
  const double mag = std::abs(tr);
  if (mag == 0.0) return 1.0;
  const Complex phase = tr / mag;
  const double residual = (v - phase * u).squaredNorm();
  return detail::hs_from_parts(tr, residual, n);
}

inline double hs_distance(const UnitaryMatrix& u, const UnitaryMatrix& v) {
  return hs_distance(u.matrix(), v.matrix());
}

/// hs_distance(I, w).
inline double hs_distance_to_identity(const Matrix& w) {
  const double n = static_cast<double>(w.rows());
  const Complex tr = w.trace();
  const double mag = std::abs(tr);
  if (mag == 0.0) return 1.0;
  const Complex phase = tr / mag;
  Matrix d = w;
  d.diagonal().array() -= phase;
  return detail::hs_from_parts(tr, d.squaredNorm(), n);
}

/// hs_distance(U_a, U_b), computed from the single product U_a† U_b.
inline double circuit_distance(const Circuit& a, const Circuit& b,
                               std::size_t cap = kSimulationQubitCap) {
  if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument("circuits differ in width");
  check_cap(a.num_qubits(), cap);
  const std::size_t n = a.num_qubits();
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  Matrix w = Matrix::Identity(dim, dim);
  for (const auto& g : b) apply_gate_left(w, g, n);
  for (auto it = a.gates().rbegin(); it != a.gates().rend(); ++it) apply_gate_left(w, *it, n, true);
  return hs_distance_to_identity(w);
}

/// C ≡_ε C' (with kDistanceSlack).
inline bool approx_equiv(const Circuit& a, const Circuit& b, double epsilon,
                         std::size_t cap = kSimulationQubitCap) {
  return circuit_distance(a, b, cap) <= epsilon + kDistanceSlack;
}

/// Product of per-gate fidelities.
inline double fidelity_score(const Circuit& c, const NoiseModel& model) {
  double f = 1.0;
  for (const auto& g : c) f *= model.fidelity(g);
  return f;
}

/// 1 - optimized/original; negative when the circuit grew.
inline double gate_reduction(std::size_t original, std::size_t optimized) {
  if (original == 0) throw std::invalid_argument("gate_reduction: original count is zero");
  return 1.0 - static_cast<double>(optimized) / static_cast<double>(original);
}

}  // namespace guoq
