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

// Least-squares instantiation of parameterized circuit templates.
//
// A template is a gate list where some gates carry a free rotation angle.
// Fitting minimises ||U(theta) - e^{i phi} V||_F^2 over (theta, phi) with
// Levenberg–Marquardt; the Jacobian is exact, from prefix and suffix
// products of the gate sequence.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "guoq/rng.hpp"
#include "guoq/transformation.hpp"
#include "guoq/unitary.hpp"

namespace guoq {

struct TemplateOp {
  GateKind kind;
  std::array<Qubit, 2> qubits{};
  /// Index into the parameter vector, or -1 for a fixed gate.
  int param = -1;

  std::span<const Qubit> operands() const {
    return {qubits.data(), static_cast<std::size_t>(gate_info(kind).arity)};
  }
};

struct ParamTemplate {
  std::size_t num_qubits = 0;
  std::size_t num_params = 0;
  std::vector<TemplateOp> ops;

  void add_fixed(GateKind kind, std::initializer_list<Qubit> qs) {
    TemplateOp op{kind};
    std::copy(qs.begin(), qs.end(), op.qubits.begin());
    ops.push_back(op);
  }

  void add_rotation(GateKind kind, std::initializer_list<Qubit> qs) {
    TemplateOp op{kind};
    std::copy(qs.begin(), qs.end(), op.qubits.begin());
    op.param = static_cast<int>(num_params++);
    ops.push_back(op);
  }

  Matrix op_matrix(const TemplateOp& op, std::span<const double> theta) const {
    if (op.param < 0) return gate_matrix(op.kind, {});
    const double v = theta[static_cast<std::size_t>(op.param)];
    return gate_matrix(op.kind, std::span<const double>(&v, 1));
  }

  Matrix unitary(std::span<const double> theta) const {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
    Matrix m = Matrix::Identity(dim, dim);
    for (const auto& op : ops) apply_local_left(m, op_matrix(op, theta), op.operands(), num_qubits);
    return m;
  }

  Circuit instantiate(std::span<const double> theta) const {
    Circuit c(num_qubits);
    for (const auto& op : ops) {
      if (op.param < 0) {
        c.append(Gate(op.kind, op.operands()));
      } else {
        const Angle a = Angle::radians(theta[static_cast<std::size_t>(op.param)]);
        c.append(Gate(op.kind, op.operands(), std::span<const Angle>(&a, 1)));
      }
    }
    return c;
  }
};

namespace detail {

/// D with dG/dtheta = D * G for the one-parameter rotations.
inline Matrix rotation_generator(GateKind kind) {
  using namespace std::complex_literals;
  const Complex h = -0.5i;
  Matrix d;
  switch (kind) {
    case GateKind::Rz:
      d.resize(2, 2);
      d << h, 0, 0, -h;
      return d;
    case GateKind::Rx:
      d.resize(2, 2);
      d << 0, h, h, 0;
      return d;
    case GateKind::Ry:
      d.resize(2, 2);
      d << 0, -0.5, 0.5, 0;
      return d;
    case GateKind::U1:
      d.resize(2, 2);
      d << 0, 0, 0, 1i;
      return d;
    case GateKind::Rxx:
      d = Matrix::Zero(4, 4);
      d(0, 3) = d(1, 2) = d(2, 1) = d(3, 0) = h;
      return d;
    default:
      throw std::invalid_argument("no generator for " + std::string(gate_info(kind).qasm_name));
  }
}

}  // namespace detail

struct FitOptions {
  std::size_t max_iterations = 150;
  /// Stop as soon as the HS distance is at most this.
  double target_distance = 0.0;
  /// Abort a start whose residual is still above `stall_residual` after
  /// `stall_check` iterations.
  std::size_t stall_check = 60;
  double stall_residual = 1e-6;
};

struct FitResult {
  std::vector<double> theta;
  double distance = 1.0;
  std::size_t iterations = 0;
};

/// One Levenberg–Marquardt descent from `theta`.
inline FitResult fit_template(const ParamTemplate& t, const Matrix& target, std::vector<double> theta,
                              const FitOptions& opt) {
  using namespace std::complex_literals;
  const std::size_t n = t.num_qubits;
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  const std::size_t m = t.num_params;
  const std::size_t np = m + 1;  // plus global phase

  std::vector<Matrix> generators(t.ops.size());
  for (std::size_t j = 0; j < t.ops.size(); ++j) {
    if (t.ops[j].param >= 0) generators[j] = detail::rotation_generator(t.ops[j].kind);
  }

  FitResult out;
  auto evaluate = [&](const std::vector<double>& th, double phi, Matrix* u_out) {
    Matrix u = t.unitary(th);
    const double r = (u - std::exp(1i * phi) * target).squaredNorm();
    if (u_out) *u_out = std::move(u);
    return r;
  };

  Matrix u = t.unitary(theta);
  double phi = std::arg((target.adjoint() * u).trace());
  double cost = (u - std::exp(1i * phi) * target).squaredNorm();
  double lambda = 1e-3;
  std::vector<Matrix> prefix(t.ops.size() + 1);
  std::vector<Matrix> gates(t.ops.size());
  Eigen::MatrixXd a(np, np);
  Eigen::VectorXd g(np);
  std::vector<Matrix> jac(np);

  std::size_t it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (hs_distance(u, target) <= opt.target_distance) break;
    if (it == opt.stall_check && cost > opt.stall_residual) break;
    prefix[0] = Matrix::Identity(dim, dim);
    for (std::size_t j = 0; j < t.ops.size(); ++j) {
      gates[j] = t.op_matrix(t.ops[j], theta);
      prefix[j + 1] = prefix[j];
      apply_local_left(prefix[j + 1], gates[j], t.ops[j].operands(), n);
    }
    Matrix suffix = Matrix::Identity(dim, dim);
    for (std::size_t j = t.ops.size(); j-- > 0;) {
      const auto& op = t.ops[j];
      if (op.param >= 0) {
        Matrix inner = prefix[j + 1];
        apply_local_left(inner, generators[j], op.operands(), n);
        jac[static_cast<std::size_t>(op.param)] = suffix * inner;
      }
      apply_local_right(suffix, gates[j], op.operands(), n);
    }
    const Complex e = std::exp(1i * phi);
    jac[m] = -1i * e * target;
    const Matrix r = u - e * target;
    for (std::size_t p = 0; p < np; ++p) {
      g(static_cast<Eigen::Index>(p)) = (jac[p].conjugate().cwiseProduct(r)).sum().real();
      for (std::size_t q = p; q < np; ++q) {
        const double v = (jac[p].conjugate().cwiseProduct(jac[q])).sum().real();
        a(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = v;
        a(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(p)) = v;
      }
    }
    bool improved = false;
    for (int attempt = 0; attempt < 12 && !improved; ++attempt) {
      Eigen::MatrixXd damped = a;
      for (std::size_t p = 0; p < np; ++p) {
        const auto i = static_cast<Eigen::Index>(p);
        damped(i, i) += lambda * (a(i, i) + 1e-9);
      }
      const Eigen::VectorXd step = damped.ldlt().solve(-g);
      std::vector<double> trial = theta;
      for (std::size_t p = 0; p < m; ++p) trial[p] += step(static_cast<Eigen::Index>(p));
      const double trial_phi = phi + step(static_cast<Eigen::Index>(m));
      Matrix trial_u;
      const double trial_cost = evaluate(trial, trial_phi, &trial_u);
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        theta = std::move(trial);
        phi = trial_phi;
        u = std::move(trial_u);
        cost = trial_cost;
        lambda = std::max(lambda / 5.0, 1e-12);
        improved = true;
      } else {
        lambda *= 8.0;
      }
    }
    if (!improved) break;
  }
  out.theta = std::move(theta);
  out.distance = hs_distance(u, target);
  out.iterations = it + 1;
  return out;
}

/// Best of `starts` descents from uniformly random parameters; stops early
/// at the first start reaching `opt.target_distance`. `effort` counts
/// iterations and is decremented.
inline FitResult fit_multistart(const ParamTemplate& t, const Matrix& target, std::size_t starts, Rng& rng,
                                const FitOptions& opt, std::size_t* effort = nullptr,
                                const std::vector<double>* warm = nullptr) {
  FitResult best;
  for (std::size_t s = 0; s < starts; ++s) {
    if (effort && *effort == 0) break;
    std::vector<double> theta(t.num_params);
    if (s == 0 && warm) {
      theta = *warm;
    } else {
      for (auto& v : theta) v = rng.uniform(-kPi, kPi);
    }
    FitOptions o = opt;
    if (effort) o.max_iterations = std::min(o.max_iterations, *effort);
    auto r = fit_template(t, target, std::move(theta), o);
    if (effort) *effort -= std::min(*effort, r.iterations);
    if (r.distance < best.distance) best = std::move(r);
    if (best.distance <= opt.target_distance) break;
  }
  return best;
}

}  // namespace guoq
