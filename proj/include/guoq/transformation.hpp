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

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "guoq/circuit.hpp"
#include "guoq/noise_model.hpp"
#include "guoq/rng.hpp"

namespace guoq {

using Clock = std::chrono::steady_clock;

/// Per-call inputs of a transformation.
struct TransformContext {
  Rng rng;
  std::size_t iteration = 0;
  Clock::time_point deadline = Clock::time_point::max();
  const std::atomic<bool>* cancel = nullptr;

  bool expired() const {
    return (cancel && cancel->load(std::memory_order_relaxed)) || Clock::now() >= deadline;
  }
};

enum class TransformationKind { Rewrite, Resynthesis };

/// A circuit-to-circuit move whose output is always epsilon-equivalent to its
/// input. `action` returns nullopt when it leaves the circuit unchanged.
struct Transformation {
  std::string name;
  double epsilon = 0.0;
  TransformationKind kind = TransformationKind::Rewrite;
  std::function<std::optional<Circuit>(const Circuit&, TransformContext&)> action;
};

enum class Objective { TwoQubitCount, WeightedTCx, NegLogFidelity };

/// Minimisation objective over circuits.
class CostFunction {
 public:
  CostFunction() : CostFunction(Objective::TwoQubitCount) {}
  explicit CostFunction(Objective id, NoiseModel noise = {})
      : id_(id), noise_(std::move(noise)) {}

  static CostFunction from_name(std::string_view name, NoiseModel noise = {}) {
    if (name == "two-qubit-count") return CostFunction(Objective::TwoQubitCount, std::move(noise));
    if (name == "weighted-t-cx") return CostFunction(Objective::WeightedTCx, std::move(noise));
    if (name == "neg-log-fidelity") return CostFunction(Objective::NegLogFidelity, std::move(noise));
    throw std::invalid_argument("unknown objective '" + std::string(name) + "'");
  }

  Objective id() const { return id_; }
  const NoiseModel& noise() const { return noise_; }

  std::string name() const {
    switch (id_) {
      case Objective::TwoQubitCount:
        return "two-qubit-count";
      case Objective::WeightedTCx:
        return "weighted-t-cx";
      case Objective::NegLogFidelity:
        return "neg-log-fidelity";
    }
    return {};
  }

  double gate_cost(const Gate& g) const {
    switch (id_) {
      case Objective::TwoQubitCount:
        return is_two_qubit(g) ? 1.0 : 0.0;
      case Objective::WeightedTCx:
        return is_t_like(g) ? 2.0 : (is_two_qubit(g) ? 1.0 : 0.0);
      case Objective::NegLogFidelity:
        return -std::log(noise_.fidelity(g));
    }
    return 0.0;
  }

  double operator()(const Circuit& c) const {
    double total = 0.0;
    for (const auto& g : c) total += gate_cost(g);
    return total;
  }

 private:
  Objective id_;
  NoiseModel noise_;
};

inline double cost_eval(const CostFunction& cost, const Circuit& c) { return cost(c); }

}  // namespace guoq
