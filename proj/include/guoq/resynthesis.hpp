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
#include <memory>
#include <optional>
#include <string>

#include "guoq/dag.hpp"
#include "guoq/plugin.hpp"
#include "guoq/synthesis.hpp"

namespace guoq {

struct ResynthesisConfig {
  GateSetDef gate_set = GateSetDef::nam();
  CostFunction objective;
  double epsilon = 0.0;
  std::size_t max_subcircuit_qubits = 3;
  /// Shell command of an external synthesizer; built-in when empty.
  std::string plugin_command;
  std::chrono::milliseconds budget{5000};
  std::size_t effort = 10000;
  std::size_t max_entanglers = 3;
};

/// Counters shared by every copy of a resynthesis transformation.
struct ResynthesisStats {
  std::atomic<std::size_t> calls{0};
  std::atomic<std::size_t> improved{0};
  std::atomic<std::size_t> plugin_failures{0};
  std::atomic<std::size_t> contract_violations{0};
  std::atomic<std::size_t> timeouts{0};
};

/// Resynthesizes the subcircuit's unitary. Returns a result only when it
/// verifies within epsilon and is cheaper (or as cheap with fewer gates).
inline std::optional<SynthesisResult> resynthesize(const Subcircuit& sub, const ResynthesisConfig& cfg,
                                                   std::uint64_t seed,
                                                   Clock::time_point deadline = Clock::time_point::max(),
                                                   const std::atomic<bool>* cancel = nullptr) {
  if (sub.num_qubits() > kSynthesisQubitCap) {
    throw QubitCapError(std::to_string(sub.num_qubits()) + "-qubit subcircuit exceeds the synthesis cap of " +
                        std::to_string(kSynthesisQubitCap));
  }
  const Circuit& local = sub.local_circuit();
  SynthesisRequest req;
  req.target = circuit_unitary(local).matrix();
  req.gate_set = cfg.gate_set;
  req.epsilon = cfg.epsilon;
  req.objective = cfg.objective;
  req.deadline = deadline;
  req.cancel = cancel;
  req.effort = cfg.effort;
  req.seed = seed;
  const double cost = cfg.objective(local);
  req.cost_bound = cost;
  req.max_entanglers = std::min(cfg.max_entanglers, count_gates(local, is_two_qubit));

  std::optional<SynthesisResult> res =
      cfg.plugin_command.empty() ? builtin_synthesize(req) : plugin_synthesize(req, cfg.plugin_command);
  if (!res) return std::nullopt;
  // Never trust the synthesizer: re-simulate.
  res->achieved_distance = hs_distance(circuit_unitary(res->circuit).matrix(), req.target);
  if (res->achieved_distance > cfg.epsilon + kSynthesisSlack) return std::nullopt;
  const double new_cost = cfg.objective(res->circuit);
  const bool better = new_cost < cost - 1e-12 || (new_cost <= cost + 1e-12 && res->circuit.size() < local.size());
  if (!better) return std::nullopt;
  return res;
}

/// Resynthesis of one greedily grown subcircuit around a uniformly random
/// node, as an epsilon-transformation.
inline Transformation make_resynthesis_transformation(ResynthesisConfig cfg,
                                                      std::shared_ptr<ResynthesisStats> stats = nullptr) {
  if (!stats) stats = std::make_shared<ResynthesisStats>();
  Transformation t;
  t.name = cfg.epsilon > 0 ? "resynth-approx" : "resynth";
  t.epsilon = cfg.epsilon;
  t.kind = TransformationKind::Resynthesis;
  t.action = [cfg = std::move(cfg), stats](const Circuit& c, TransformContext& ctx) -> std::optional<Circuit> {
    if (c.empty()) return std::nullopt;
    const CircuitDag dag(c);
    const NodeId seed = static_cast<NodeId>(ctx.rng.below(c.size()));
    const std::size_t width = std::min(cfg.max_subcircuit_qubits, kSynthesisQubitCap);
    if (dag.gate(seed).arity() > width) return std::nullopt;
    const Subcircuit sub = extract_subcircuit_greedy(dag, seed, width, ctx.rng);
    if (sub.size() < 2) return std::nullopt;
    const auto deadline = std::min(ctx.deadline, Clock::now() + cfg.budget);
    stats->calls.fetch_add(1, std::memory_order_relaxed);
    std::optional<SynthesisResult> res;
    try {
      res = resynthesize(sub, cfg, ctx.rng.next(), deadline, ctx.cancel);
    } catch (const PluginError& e) {
      switch (e.kind()) {
        case PluginError::Kind::ContractViolation:
          stats->contract_violations.fetch_add(1, std::memory_order_relaxed);
          break;
        case PluginError::Kind::Timeout:
          stats->timeouts.fetch_add(1, std::memory_order_relaxed);
          break;
        default:
          stats->plugin_failures.fetch_add(1, std::memory_order_relaxed);
      }
      return std::nullopt;
    }
    if (!res) return std::nullopt;
    stats->improved.fetch_add(1, std::memory_order_relaxed);
    return replace_subcircuit(c, sub, res->circuit);
  };
  return t;
}

}  // namespace guoq
