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

// Built-in unitary synthesizers: numeric template fitting for gate sets with
// continuous rotations, and cost-ordered enumeration for Clifford+T.

#include <atomic>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "guoq/numeric_fit.hpp"
#include "guoq/transformation.hpp"
#include "guoq/unitary.hpp"

namespace guoq {

/// Largest target accepted by the synthesizers.
inline constexpr std::size_t kSynthesisQubitCap = 4;

/// Extra distance tolerated on top of a request's epsilon.
inline constexpr double kSynthesisSlack = 1e-12;

enum class SynthesizerTag { ExactSearch, TemplateFit, Plugin };

inline std::string to_string(SynthesizerTag tag) {
  switch (tag) {
    case SynthesizerTag::ExactSearch:
      return "exact-search";
    case SynthesizerTag::TemplateFit:
      return "template-fit";
    case SynthesizerTag::Plugin:
      return "plugin";
  }
  return {};
}

struct SynthesisRequest {
  Matrix target;
  GateSetDef gate_set = GateSetDef::nam();
  double epsilon = 0.0;
  CostFunction objective;
  /// Wall-clock safety net; results are reproducible only when `effort`
  /// runs out first.
  Clock::time_point deadline = Clock::time_point::max();
  /// Set from another thread to abandon the request.
  const std::atomic<bool>* cancel = nullptr;
  /// Deterministic work limit (fit iterations or expanded search states).
  std::size_t effort = 40000;
  std::uint64_t seed = 0;
  /// Only circuits whose cost is at most this are of interest.
  double cost_bound = std::numeric_limits<double>::infinity();
  /// Most entangling gates a template may use.
  std::size_t max_entanglers = 3;
  std::size_t starts = 8;
  std::size_t max_depth = 8;

  std::size_t num_qubits() const {
    std::size_t n = 0;
    while ((Eigen::Index{1} << n) < target.rows()) ++n;
    return n;
  }
};

struct SynthesisResult {
  Circuit circuit;
  double achieved_distance = 0.0;
  SynthesizerTag synthesizer = SynthesizerTag::TemplateFit;
};

class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool expired(const SynthesisRequest& req) {
  return (req.cancel && req.cancel->load(std::memory_order_relaxed)) || Clock::now() >= req.deadline;
}

inline void check_request(const SynthesisRequest& req) {
  if (req.target.rows() != req.target.cols() || req.target.rows() < 2 ||
      (req.target.rows() & (req.target.rows() - 1)) != 0) {
    throw SynthesisError("synthesis target must be a 2^k x 2^k matrix");
  }
  if (req.num_qubits() > kSynthesisQubitCap) {
    throw QubitCapError(std::to_string(req.num_qubits()) + "-qubit target exceeds the synthesis cap of " +
                        std::to_string(kSynthesisQubitCap));
  }
  if (!(req.epsilon >= 0.0)) throw SynthesisError("synthesis epsilon must be non-negative");
}

/// Universal single-qubit layer for the set, as rotations and fixed gates.
inline void add_layer(ParamTemplate& t, const GateSetDef& set, Qubit q) {
  const auto name = set.name();
  if (name == "nam") {
    t.add_rotation(GateKind::Rz, {q});
    t.add_fixed(GateKind::H, {q});
    t.add_rotation(GateKind::Rz, {q});
    t.add_fixed(GateKind::H, {q});
    t.add_rotation(GateKind::Rz, {q});
  } else if (name == "ibm-eagle") {
    t.add_rotation(GateKind::Rz, {q});
    t.add_fixed(GateKind::SX, {q});
    t.add_rotation(GateKind::Rz, {q});
    t.add_fixed(GateKind::SX, {q});
    t.add_rotation(GateKind::Rz, {q});
  } else {
    // ionq natively; ibmq20 is fitted as ZYZ and emitted as U1/U2/U3.
    t.add_rotation(GateKind::Rz, {q});
    t.add_rotation(GateKind::Ry, {q});
    t.add_rotation(GateKind::Rz, {q});
  }
}

struct Skeleton {
  std::size_t num_qubits;
  std::vector<std::pair<Qubit, Qubit>> entanglers;
  /// Slots: (qubit, position); slot i comes after entangler position-1.
  std::vector<std::pair<Qubit, std::size_t>> slots;
};

inline Skeleton full_skeleton(std::size_t k, const std::vector<std::pair<Qubit, Qubit>>& ent) {
  Skeleton s{k, ent, {}};
  for (Qubit q = 0; q < k; ++q) s.slots.emplace_back(q, 0);
  for (std::size_t e = 0; e < ent.size(); ++e) {
    s.slots.emplace_back(ent[e].first, e + 1);
    s.slots.emplace_back(ent[e].second, e + 1);
  }
  return s;
}

/// Template of a skeleton; `slot_params[i]` receives the parameter indices
/// of slot i.
inline ParamTemplate build_template(const Skeleton& s, const GateSetDef& set,
                                    std::vector<std::vector<int>>* slot_params = nullptr,
                                    std::vector<int>* entangler_params = nullptr) {
  ParamTemplate t;
  t.num_qubits = s.num_qubits;
  if (slot_params) slot_params->assign(s.slots.size(), {});
  if (entangler_params) entangler_params->clear();
  const GateKind ent = set.entangler();
  for (std::size_t pos = 0; pos <= s.entanglers.size(); ++pos) {
    if (pos > 0) {
      const auto [a, b] = s.entanglers[pos - 1];
      if (gate_info(ent).num_params > 0) {
        t.add_rotation(ent, {a, b});
        if (entangler_params) entangler_params->push_back(t.ops.back().param);
      } else {
        t.add_fixed(ent, {a, b});
      }
    }
    for (std::size_t i = 0; i < s.slots.size(); ++i) {
      if (s.slots[i].second != pos) continue;
      const std::size_t before = t.num_params;
      add_layer(t, set, s.slots[i].first);
      if (slot_params) {
        for (std::size_t p = before; p < t.num_params; ++p) (*slot_params)[i].push_back(static_cast<int>(p));
      }
    }
  }
  return t;
}

/// Analytic Z-Y-Z angles (theta, phi, lambda) with V ∝ Rz(phi) Ry(theta) Rz(lambda).
inline std::array<double, 3> zyz_angles(const Matrix& v) {
  const Complex det = v(0, 0) * v(1, 1) - v(0, 1) * v(1, 0);
  const Matrix w = v / std::sqrt(det);
  const double ca = std::abs(w(0, 0)), sb = std::abs(w(1, 0));
  const double theta = 2.0 * std::atan2(sb, ca);
  double sum = 0.0, diff = 0.0;  // phi + lambda, phi - lambda
  if (ca > 1e-12) sum = -2.0 * std::arg(w(0, 0));
  if (sb > 1e-12) diff = 2.0 * std::arg(w(1, 0));
  if (ca <= 1e-12) sum = 0.0;
  if (sb <= 1e-12) diff = 0.0;
  return {theta, (sum + diff) / 2.0, (sum - diff) / 2.0};
}

inline bool near_angle(double a, double b, double tol = 1e-12) {
  return Angle::radians(a).equivalent(Angle::radians(b), tol);
}

/// U1/U2/U3 spelling of a 2x2 unitary, shortest first.
inline std::vector<Gate> decompose_1q_ibm(const Matrix& v, Qubit q) {
  const auto [theta, phi, lambda] = zyz_angles(v);
  if (near_angle(theta, 0.0)) {
    if (near_angle(phi + lambda, 0.0)) return {};
    return {gates::u1(Angle::radians(phi + lambda), q)};
  }
  if (std::abs(theta - kPi / 2) < 1e-12) {
    return {Gate(GateKind::U2, {q}, {Angle::radians(phi), Angle::radians(lambda)})};
  }
  return {Gate(GateKind::U3, {q}, {Angle::radians(theta), Angle::radians(phi), Angle::radians(lambda)})};
}

/// Shortest sequence over the set's single-qubit gates reproducing `v` up to
/// phase, by enumeration of lengths 0..5 without immediate repeats.
inline std::optional<std::vector<Gate>> decompose_1q(const Matrix& v, const GateSetDef& set, Qubit q, Rng& rng,
                                                     double tol) {
  const Matrix id = Matrix::Identity(2, 2);
  if (hs_distance(id, v) <= tol) return std::vector<Gate>{};
  if (set.name() == "ibmq20") {
    auto gs = decompose_1q_ibm(v, 0);
    Circuit c(1, gs);
    if (hs_distance(circuit_unitary(c).matrix(), v) > tol) return std::nullopt;
    for (auto& g : gs) g = g.remapped(std::vector<Qubit>{q});
    return gs;
  }
  const auto kinds = set.single_qubit_kinds();
  std::vector<std::size_t> seq;
  FitOptions opt;
  opt.target_distance = tol;
  opt.max_iterations = 80;
  opt.stall_check = 40;
  for (std::size_t len = 1; len <= 5; ++len) {
    seq.assign(len, 0);
    for (;;) {
      bool repeat = false;
      for (std::size_t i = 1; i < len; ++i) repeat |= seq[i] == seq[i - 1];
      if (!repeat) {
        ParamTemplate t;
        t.num_qubits = 1;
        for (auto idx : seq) {
          const GateKind k = kinds[idx];
          if (gate_info(k).num_params == 0) {
            t.add_fixed(k, {0});
          } else {
            t.add_rotation(k, {0});
          }
        }
        const auto fit = t.num_params == 0 ? FitResult{{}, hs_distance(t.unitary({}), v), 0}
                                           : fit_multistart(t, v, 4, rng, opt);
        if (fit.distance <= tol) {
          std::vector<Gate> out;
          const Qubit map[1] = {q};
          for (const auto& g : t.instantiate(fit.theta)) out.push_back(g.remapped(map));
          return out;
        }
      }
      std::size_t i = 0;
      while (i < len && ++seq[i] == kinds.size()) seq[i++] = 0;
      if (i == len) break;
    }
  }
  return std::nullopt;
}

/// Snaps near-grid angles onto multiples of pi/1024.
inline Circuit snap_angles(const Circuit& c) {
  Circuit out(c.num_qubits());
  for (const auto& g : c) {
    std::vector<Angle> ps;
    for (const auto& p : g.params()) ps.push_back(p.snapped());
    out.append(Gate(g.kind(), g.qubits(), ps));
  }
  return out;
}

/// Turns a fitted skeleton into a native circuit.
inline std::optional<Circuit> emit_skeleton(const Skeleton& s, const GateSetDef& set, const std::vector<double>& theta,
                                            const Matrix& target, double budget, Rng& rng) {
  std::vector<std::vector<int>> slot_params;
  std::vector<int> ent_params;
  const ParamTemplate t = build_template(s, set, &slot_params, &ent_params);
  // Each slot is re-expressed within a small share of the budget.
  const double slot_tol = std::max(1e-14, budget / (4.0 * static_cast<double>(s.slots.size() + 1)));
  Circuit c(s.num_qubits);
  const GateKind ent = set.entangler();
  for (std::size_t pos = 0; pos <= s.entanglers.size(); ++pos) {
    if (pos > 0) {
      const auto [a, b] = s.entanglers[pos - 1];
      if (gate_info(ent).num_params > 0) {
        const Angle ang = Angle::radians(theta[static_cast<std::size_t>(ent_params[pos - 1])]);
        c.append(Gate(ent, {a, b}, {ang}));
      } else {
        c.append(Gate(ent, {a, b}));
      }
    }
    for (std::size_t i = 0; i < s.slots.size(); ++i) {
      if (s.slots[i].second != pos) continue;
      ParamTemplate layer;
      layer.num_qubits = 1;
      add_layer(layer, set, 0);
      std::vector<double> lt;
      for (int p : slot_params[i]) lt.push_back(theta[static_cast<std::size_t>(p)]);
      auto gs = decompose_1q(layer.unitary(lt), set, s.slots[i].first, rng, slot_tol);
      if (!gs) return std::nullopt;
      for (auto& g : *gs) c.append(g);
    }
  }
  for (const Circuit& candidate : {snap_angles(c), c}) {
    if (hs_distance(circuit_unitary(candidate).matrix(), target) <= budget) return candidate;
  }
  return std::nullopt;
}

}  // namespace detail

/// Numeric template search in order of increasing entangler count. Returns
/// the first template that reaches the request's epsilon, with unneeded
/// single-qubit layers pruned.
inline std::optional<SynthesisResult> template_fit_synthesize(const SynthesisRequest& req) {
  detail::check_request(req);
  if (!req.gate_set.has_parameterized_gates()) {
    throw SynthesisError("template fitting needs a gate set with rotations");
  }
  const std::size_t k = req.num_qubits();
  Rng rng(req.seed);
  std::size_t effort = req.effort;
  const double budget = req.epsilon + kSynthesisSlack;
  FitOptions opt;
  opt.target_distance = req.epsilon + kSynthesisSlack / 4;

  std::vector<std::pair<Qubit, Qubit>> pairs;
  for (Qubit a = 0; a < k; ++a)
    for (Qubit b = a + 1; b < k; ++b) pairs.emplace_back(a, b);

  for (std::size_t count = 0; count <= req.max_entanglers; ++count) {
    if (count > 0 && pairs.empty()) break;
    std::vector<std::size_t> idx(count, 0);
    for (;;) {
      if (effort == 0 || detail::expired(req)) return std::nullopt;
      std::vector<std::pair<Qubit, Qubit>> ent;
      for (auto i : idx) ent.push_back(pairs[i]);
      // Wires never reached by an entangler need one slot at most.
      detail::Skeleton s = detail::full_skeleton(k, ent);
      ParamTemplate t = detail::build_template(s, req.gate_set);
      auto fit = fit_multistart(t, req.target, req.starts, rng, opt, &effort);
      if (fit.distance <= opt.target_distance) {
        // Greedy pruning of single-qubit slots, last first.
        std::vector<double> theta = fit.theta;
        for (std::size_t i = s.slots.size(); i-- > 0;) {
          if (effort == 0 || detail::expired(req)) break;
          std::vector<std::vector<int>> slot_params;
          detail::build_template(s, req.gate_set, &slot_params);
          detail::Skeleton trial = s;
          trial.slots.erase(trial.slots.begin() + static_cast<std::ptrdiff_t>(i));
          std::vector<double> warm;
          for (std::size_t p = 0; p < theta.size(); ++p) {
            if (std::find(slot_params[i].begin(), slot_params[i].end(), static_cast<int>(p)) ==
                slot_params[i].end()) {
              warm.push_back(theta[p]);
            }
          }
          const ParamTemplate tt = detail::build_template(trial, req.gate_set);
          auto r = fit_multistart(tt, req.target, 2, rng, opt, &effort, &warm);
          if (r.distance <= opt.target_distance) {
            s = std::move(trial);
            theta = std::move(r.theta);
          }
        }
        auto circuit = detail::emit_skeleton(s, req.gate_set, theta, req.target, budget, rng);
        if (circuit) {
          const double d = hs_distance(circuit_unitary(*circuit).matrix(), req.target);
          return SynthesisResult{std::move(*circuit), d, SynthesizerTag::TemplateFit};
        }
      }
      std::size_t i = 0;
      while (i < count && ++idx[i] == pairs.size()) idx[i++] = 0;
      if (i == count) break;
    }
  }
  return std::nullopt;
}

namespace detail {

/// Phase-normalised, rounded fingerprint of a unitary.
inline std::uint64_t canonical_hash(const Matrix& m) {
  Complex phase{1.0, 0.0};
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (std::abs(z) > 1e-6) {
      phase = std::abs(z) / z;
      break;
    }
  }
  std::uint64_t h = 1469598103934665603ULL;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i] * phase;
    for (double part : {z.real(), z.imag()}) {
      auto v = static_cast<std::int64_t>(std::llround(part * 1e6));
      if (v == 0) v = 0;  // fold -0
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ULL;
      h ^= h >> 29;
    }
  }
  return h;
}

}  // namespace detail

/// Cost-ordered enumeration for gate sets without continuous parameters.
/// Circuits are expanded by (objective cost, gate count); the first within
/// epsilon of the target is therefore cost-minimal up to `max_depth` gates.
inline std::optional<SynthesisResult> exact_search_synthesize(const SynthesisRequest& req) {
  detail::check_request(req);
  if (req.gate_set.has_parameterized_gates()) {
    throw SynthesisError("exact search needs a finite gate set");
  }
  const std::size_t k = req.num_qubits();
  const double budget = req.epsilon + kSynthesisSlack;
  std::vector<Gate> moves;
  for (auto kind : req.gate_set.kinds()) {
    if (gate_info(kind).arity == 1) {
      for (Qubit q = 0; q < k; ++q) moves.push_back(Gate(kind, {q}));
    } else {
      for (Qubit a = 0; a < k; ++a)
        for (Qubit b = 0; b < k; ++b)
          if (a != b) moves.push_back(Gate(kind, {a, b}));
    }
  }
  struct Node {
    Matrix u;
    std::vector<std::uint16_t> path;
    double cost;
  };
  std::vector<Node> nodes;
  // Canonical hash -> best node reaching that unitary (up to phase).
  std::unordered_multimap<std::uint64_t, std::size_t> best;
  using Key = std::tuple<double, std::size_t, std::size_t>;  // cost, length, node
  std::priority_queue<Key, std::vector<Key>, std::greater<>> open;
  const auto dim = req.target.rows();

  auto lookup = [&](const Matrix& u, std::uint64_t h) -> std::optional<decltype(best)::iterator> {
    auto [lo, hi] = best.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      if (hs_distance(nodes[it->second].u, u) <= 1e-9) return it;
    }
    return std::nullopt;
  };

  nodes.push_back({Matrix::Identity(dim, dim), {}, 0.0});
  best.emplace(detail::canonical_hash(nodes[0].u), 0);
  open.emplace(0.0, 0, 0);
  std::size_t effort = req.effort;
  while (!open.empty()) {
    if (effort == 0 || detail::expired(req)) return std::nullopt;
    const auto [cost, len, id] = open.top();
    open.pop();
    if (auto it = lookup(nodes[id].u, detail::canonical_hash(nodes[id].u)); it && (*it)->second != id) continue;
    --effort;
    if (hs_distance(nodes[id].u, req.target) <= budget) {
      Circuit c(k);
      for (auto m : nodes[id].path) c.append(moves[m]);
      const double d = hs_distance(circuit_unitary(c).matrix(), req.target);
      if (d <= budget) return SynthesisResult{std::move(c), d, SynthesizerTag::ExactSearch};
    }
    if (len >= req.max_depth) continue;
    for (std::size_t m = 0; m < moves.size(); ++m) {
      const double c2 = cost + req.objective.gate_cost(moves[m]);
      if (c2 > req.cost_bound + 1e-12) continue;
      Matrix u = nodes[id].u;
      apply_gate_left(u, moves[m], k);
      const auto h = detail::canonical_hash(u);
      auto it = lookup(u, h);
      if (it) {
        const Node& other = nodes[(*it)->second];
        if (std::pair(other.cost, other.path.size()) <= std::pair(c2, len + 1)) continue;
      }
      auto path = nodes[id].path;
      path.push_back(static_cast<std::uint16_t>(m));
      nodes.push_back({std::move(u), std::move(path), c2});
      if (it) {
        (*it)->second = nodes.size() - 1;
      } else {
        best.emplace(h, nodes.size() - 1);
      }
      open.emplace(c2, len + 1, nodes.size() - 1);
    }
  }
  return std::nullopt;
}

/// The set's built-in synthesizer.
inline std::optional<SynthesisResult> builtin_synthesize(const SynthesisRequest& req) {
  return req.gate_set.has_parameterized_gates() ? template_fit_synthesize(req) : exact_search_synthesize(req);
}

}  // namespace guoq
