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

// Randomised search over epsilon-transformations with annealing-style
// acceptance and a global approximation budget.

#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "guoq/transformation.hpp"

namespace guoq {

struct SearchConfig {
  double epsilon_f = 1e-8;
  double temperature = 10.0;
  double resynth_probability = 0.015;
  std::size_t max_subcircuit_qubits = 3;
  std::chrono::milliseconds time_limit{60000};
  std::size_t max_iterations = std::numeric_limits<std::size_t>::max();
  std::uint64_t seed = 0;
  bool async_resynthesis = false;
  /// Every n-th trace record is kept, plus every best update.
  std::size_t trace_stride = 100;

  void validate() const {
    if (!(epsilon_f >= 0.0)) throw std::invalid_argument("epsilon_f must be non-negative");
    if (!(temperature >= 0.0)) throw std::invalid_argument("temperature must be non-negative");
    if (!(resynth_probability >= 0.0 && resynth_probability <= 1.0)) {
      throw std::invalid_argument("resynth_probability must lie in [0, 1]");
    }
    if (max_subcircuit_qubits == 0) throw std::invalid_argument("max_subcircuit_qubits must be positive");
    if (trace_stride == 0) throw std::invalid_argument("trace_stride must be positive");
  }
};

struct ErrorBudget {
  double spent = 0.0;
  double limit = 0.0;

  bool affords(double epsilon) const { return spent + epsilon <= limit; }
};

struct TraceRecord {
  std::size_t iteration = 0;
  double cost_current = 0.0;
  double cost_best = 0.0;
  double error_current = 0.0;
  bool operator==(const TraceRecord&) const = default;
};

/// A candidate update: which transformation produced it and the budget
/// afterwards.
struct AcceptedEvent {
  std::size_t iteration = 0;
  std::string transformation;
  double epsilon = 0.0;
  double error_after = 0.0;
  double cost_after = 0.0;
  /// Hand-off from an asynchronous resynthesis (interim rewrites dropped).
  bool async = false;
  bool operator==(const AcceptedEvent&) const = default;
};

struct SearchStats {
  std::size_t iterations = 0;
  std::size_t budget_skips = 0;
  std::size_t no_change = 0;
  std::size_t rejected = 0;
  std::size_t accepted = 0;
  std::size_t async_launched = 0;
  std::size_t async_integrated = 0;
  std::size_t async_dropped = 0;
  bool timed_out = false;
};

struct SearchResult {
  Circuit best;
  double cost_best = 0.0;
  /// spent = error of the best circuit.
  ErrorBudget budget;
  std::vector<TraceRecord> trace;
  std::vector<AcceptedEvent> events;
  /// Index one past the event that produced `best` (0: the input).
  std::size_t best_event_count = 0;
  SearchStats stats;
};

/// Metropolis-style test: non-worsening moves always pass; worse ones pass
/// with probability exp(-t * new / cur), or exp(-t * new) when cur is 0.
inline bool accept(double cost_new, double cost_cur, double t, Rng& rng) {
  if (cost_new <= cost_cur) return true;
  if (t == 0.0) return true;
  const double p = cost_cur > 0.0 ? std::exp(-t * cost_new / cost_cur) : std::exp(-t * cost_new);
  return rng.uniform() < p;
}

/// Resynthesis with probability resynth_probability (uniform among the
/// resynthesis entries), otherwise a uniform rewrite. Sets holding only one
/// kind always draw from that kind.
inline const Transformation& sample_transformation(const std::vector<Transformation>& ts, const SearchConfig& cfg,
                                                   Rng& rng) {
  if (ts.empty()) throw std::invalid_argument("empty transformation set");
  std::vector<std::size_t> rewrites, resynth;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    (ts[i].kind == TransformationKind::Rewrite ? rewrites : resynth).push_back(i);
  }
  bool pick_resynth;
  if (resynth.empty()) {
    pick_resynth = false;
  } else if (rewrites.empty()) {
    pick_resynth = true;
  } else {
    pick_resynth = rng.uniform() < cfg.resynth_probability;
  }
  const auto& pool = pick_resynth ? resynth : rewrites;
  return ts[pool[pool.size() == 1 ? 0 : rng.below(pool.size())]];
}

/// The part of the search state touched by an asynchronous hand-off.
struct SearchState {
  Circuit current;
  double cost_current = 0.0;
  double error_current = 0.0;
  Circuit best;
  double cost_best = 0.0;
  double error_best = 0.0;
  /// Bumped whenever an asynchronous result is integrated.
  std::uint64_t generation = 0;
};

struct AsyncHandoff {
  Circuit snapshot;
  double snapshot_error = 0.0;
  std::optional<Circuit> result;
  double epsilon = 0.0;
  std::uint64_t generation = 0;
  std::string transformation;
};

enum class HandoffOutcome { Accepted, Rejected, Stale, Empty };

/// Applies a finished asynchronous resynthesis. On acceptance the candidate
/// becomes the snapshot's replacement, dropping rewrites made meanwhile.
inline HandoffOutcome integrate_async_result(SearchState& state, const AsyncHandoff& h, const CostFunction& cost,
                                             const SearchConfig& cfg, Rng& rng) {
  if (h.generation != state.generation) return HandoffOutcome::Stale;
  if (!h.result) return HandoffOutcome::Empty;
  if (h.snapshot_error + h.epsilon > cfg.epsilon_f) return HandoffOutcome::Rejected;
  const double c_new = cost(*h.result);
  if (!accept(c_new, cost(h.snapshot), cfg.temperature, rng)) return HandoffOutcome::Rejected;
  state.current = *h.result;
  state.cost_current = c_new;
  state.error_current = h.snapshot_error + h.epsilon;
  ++state.generation;
  if (c_new < state.cost_best) {
    state.best = state.current;
    state.cost_best = c_new;
    state.error_best = state.error_current;
  }
  return HandoffOutcome::Accepted;
}

namespace detail {

enum Stream : std::uint64_t { kSampleStream = 1, kAcceptStream = 2, kActionStream = 3, kAsyncStream = 4 };

}  // namespace detail

/// Runs the search from `input`, whose approximation error so far is
/// `initial_error` (non-zero when chaining phases). Returns the best circuit
/// seen; its error never exceeds cfg.epsilon_f.
inline SearchResult guoq(const Circuit& input, const std::vector<Transformation>& transformations,
                         const SearchConfig& cfg, const CostFunction& cost, double initial_error = 0.0) {
  cfg.validate();
  if (initial_error > cfg.epsilon_f) throw std::invalid_argument("initial error already exceeds epsilon_f");
  const Rng master(cfg.seed);
  Rng sample_rng = master.split(detail::kSampleStream);
  Rng accept_rng = master.split(detail::kAcceptStream);
  const Rng action_base = master.split(detail::kActionStream);
  const Rng async_base = master.split(detail::kAsyncStream);
  const auto start = Clock::now();
  const auto deadline = cfg.time_limit.count() >= std::chrono::duration_cast<std::chrono::milliseconds>(
                                                      Clock::time_point::max() - start)
                                                      .count()
                            ? Clock::time_point::max()
                            : start + cfg.time_limit;

  SearchState st;
  st.current = input;
  st.cost_current = cost(input);
  st.error_current = initial_error;
  st.best = input;
  st.cost_best = st.cost_current;
  st.error_best = initial_error;

  SearchResult out;
  out.budget.limit = cfg.epsilon_f;
  std::vector<AcceptedEvent> events;
  std::size_t best_events = 0;

  auto record = [&](std::size_t it, bool best_update) {
    if (it % cfg.trace_stride == 0 || best_update) {
      out.trace.push_back({it, st.cost_current, st.cost_best, st.error_current});
    }
  };
  auto note_update = [&](std::size_t it, const std::string& name, double eps, bool async) {
    events.push_back({it, name, eps, st.error_current, st.cost_current, async});
    if (st.cost_current < st.cost_best) {
      st.best = st.current;
      st.cost_best = st.cost_current;
      st.error_best = st.error_current;
      best_events = events.size();
      return true;
    }
    return false;
  };

  std::atomic<bool> cancel{false};
  std::future<std::optional<Circuit>> worker;
  AsyncHandoff pending;
  bool in_flight = false;

  // Returns true when an integrated hand-off improved the best circuit.
  auto collect = [&](std::size_t it, bool block) -> bool {
    if (!in_flight) return false;
    if (!block && worker.wait_for(std::chrono::seconds(0)) != std::future_status::ready) return false;
    pending.result = worker.get();
    in_flight = false;
    const double best_before = st.cost_best;
    const auto outcome = integrate_async_result(st, pending, cost, cfg, accept_rng);
    if (outcome == HandoffOutcome::Stale) ++out.stats.async_dropped;
    if (outcome != HandoffOutcome::Accepted) return false;
    ++out.stats.async_integrated;
    ++out.stats.accepted;
    events.push_back({it, pending.transformation, pending.epsilon, st.error_current, st.cost_current, true});
    if (st.cost_best < best_before) {
      best_events = events.size();
      return true;
    }
    return false;
  };

  std::size_t it = 0;
  record(0, false);
  for (; it < cfg.max_iterations; ++it) {
    if (Clock::now() >= deadline) {
      out.stats.timed_out = true;
      break;
    }
    bool best_update = collect(it, false);
    const Transformation& tau = sample_transformation(transformations, cfg, sample_rng);
    if (st.error_current + tau.epsilon > cfg.epsilon_f) {
      ++out.stats.budget_skips;
      record(it + 1, best_update);
      continue;
    }
    TransformContext ctx{action_base.split(it), it, deadline, &cancel};
    if (cfg.async_resynthesis && tau.kind == TransformationKind::Resynthesis) {
      if (!in_flight && !st.current.empty()) {
        pending = AsyncHandoff{st.current, st.error_current, std::nullopt, tau.epsilon, st.generation, tau.name};
        ctx.rng = async_base.split(it);
        worker = std::async(std::launch::async,
                            [action = tau.action, snap = st.current, ctx]() mutable { return action(snap, ctx); });
        in_flight = true;
        ++out.stats.async_launched;
      }
      record(it + 1, best_update);
      continue;
    }
    std::optional<Circuit> candidate = tau.action(st.current, ctx);
    if (!candidate) {
      ++out.stats.no_change;
      record(it + 1, best_update);
      continue;
    }
    const double c_new = cost(*candidate);
    if (accept(c_new, st.cost_current, cfg.temperature, accept_rng)) {
      st.current = std::move(*candidate);
      st.cost_current = c_new;
      st.error_current += tau.epsilon;
      ++out.stats.accepted;
      best_update |= note_update(it, tau.name, tau.epsilon, false);
    } else {
      ++out.stats.rejected;
    }
    record(it + 1, best_update);
  }
  if (in_flight) {
    cancel.store(true);
    worker.wait();
    in_flight = false;
  }
  out.stats.iterations = it;
  if (out.trace.empty() || out.trace.back().iteration != it) {
    out.trace.push_back({it, st.cost_current, st.cost_best, st.error_current});
  }
  out.best = std::move(st.best);
  out.cost_best = st.cost_best;
  out.budget.spent = st.error_best;
  out.events = std::move(events);
  out.best_event_count = best_events;
  return out;
}

/// Convenience overload with the budget given separately.
inline SearchResult guoq(const Circuit& input, double epsilon_f, const std::vector<Transformation>& transformations,
                         SearchConfig cfg, const CostFunction& cost) {
  cfg.epsilon_f = epsilon_f;
  return guoq(input, transformations, cfg, cost);
}

}  // namespace guoq
