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

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "guoq/builtin_rules.hpp"
#include "guoq/resynthesis.hpp"
#include "guoq/search.hpp"
#include "test_util.hpp"

using namespace guoq;
using namespace guoq::gates;

namespace {

const Circuit kRzMerge(2, {rz(pi(1, 2), 0), h(1), cx(0, 1), rz(pi(1, 2), 0)});
const Circuit kCxChain(5, {cx(1, 0), cx(2, 0), cx(3, 0), cx(4, 0), cx(1, 0)});

std::vector<Transformation> rules(const std::vector<std::string>& names) {
  std::vector<Transformation> ts;
  for (auto& r : builtin_rules_named(names)) ts.push_back(as_transformation(r));
  return ts;
}

std::vector<Transformation> nam_rules() {
  std::vector<Transformation> ts;
  for (auto& r : builtin_rules(GateSetDef::nam())) ts.push_back(as_transformation(r));
  return ts;
}

/// Moves a random <= 3-qubit subcircuit to distance exactly eps (appends a
/// small Rz), marked as resynthesis so it competes with the rules.
Transformation perturbation(double eps) {
  Transformation t;
  t.name = "perturb";
  t.epsilon = eps;
  t.kind = TransformationKind::Resynthesis;
  t.action = [eps](const Circuit& c, TransformContext& ctx) -> std::optional<Circuit> {
    if (c.empty()) return std::nullopt;
    const CircuitDag dag(c);
    const auto seed = static_cast<NodeId>(ctx.rng.below(c.size()));
    const auto sub = extract_subcircuit_greedy(dag, seed, 3, ctx.rng);
    Circuit rep = sub.local_circuit();
    rep.append(rz(Angle::radians(2 * std::asin(eps)), 0));
    return replace_subcircuit(c, sub, rep);
  };
  return t;
}

}  // namespace

TEST(Accept, NonWorseningAlwaysAccepted) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_TRUE(accept(5, 5, 10, rng));
    EXPECT_TRUE(accept(4, 5, 10, rng));
  }
}

TEST(Accept, ZeroTemperatureAlwaysAccepts) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(accept(100, 1, 0.0, rng));
}

TEST(Accept, MonteCarloFrequency) {
  Rng rng(3);
  const int n = 1000000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += accept(11, 10, 10, rng);
  const double p = std::exp(-11.0);
  const double sigma = std::sqrt(n * p * (1 - p));
  EXPECT_NEAR(hits, n * p, 3 * sigma);
}

TEST(Accept, ZeroCurrentCostExtension) {
  Rng rng(4);
  const int n = 200000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += accept(0.5, 0, 2, rng);
  const double p = std::exp(-1.0);
  EXPECT_NEAR(hits, n * p, 3 * std::sqrt(n * p * (1 - p)));
  EXPECT_TRUE(accept(0, 0, 10, rng));
}

TEST(SampleTransformation, ZeroProbabilityNeverResynthesizes) {
  auto ts = rules({"cx-cancel", "h-cancel"});
  ts.push_back(perturbation(0.0));
  SearchConfig cfg;
  cfg.resynth_probability = 0.0;
  Rng rng(5);
  for (int i = 0; i < 100000; ++i) EXPECT_NE(sample_transformation(ts, cfg, rng).kind, TransformationKind::Resynthesis);
}

TEST(SampleTransformation, ResynthesisFraction) {
  auto ts = rules({"cx-cancel", "h-cancel", "x-cancel"});
  ts.push_back(perturbation(0.0));
  SearchConfig cfg;
  Rng rng(6);
  const int n = 1000000;
  int resynth = 0;
  std::map<std::string, int> per_rule;
  for (int i = 0; i < n; ++i) {
    const auto& t = sample_transformation(ts, cfg, rng);
    if (t.kind == TransformationKind::Resynthesis) {
      ++resynth;
    } else {
      ++per_rule[t.name];
    }
  }
  const double frac = static_cast<double>(resynth) / n;
  EXPECT_GE(frac, 0.014);
  EXPECT_LE(frac, 0.016);
  const double expect = (n - resynth) / 3.0;
  for (const auto& [name, count] : per_rule) EXPECT_NEAR(count, expect, 4 * std::sqrt(expect)) << name;
}

TEST(SampleTransformation, SingleRule) {
  const auto ts = rules({"cx-cancel"});
  SearchConfig cfg;
  Rng rng(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_transformation(ts, cfg, rng).name, "cx-cancel");
  EXPECT_THROW(sample_transformation({}, cfg, rng), std::invalid_argument);
}

TEST(CostEval, Objectives) {
  const Circuit c(2, {t(0), t(1), tdg(0), cx(0, 1), cx(1, 0), h(0)});
  EXPECT_DOUBLE_EQ(cost_eval(CostFunction(Objective::WeightedTCx), c), 8.0);
  EXPECT_DOUBLE_EQ(cost_eval(CostFunction(Objective::TwoQubitCount), Circuit(3)), 0.0);
  EXPECT_DOUBLE_EQ(cost_eval(CostFunction(Objective::TwoQubitCount), c), 2.0);
  EXPECT_DOUBLE_EQ(cost_eval(CostFunction(Objective::WeightedTCx), Circuit(1, {rz(pi(3, 4), 0), rz(pi(1, 2), 0)})),
                   2.0);
  NoiseModel m;
  m.set("two_qubit", 0.99);
  m.set("single_qubit", 0.999);
  const CostFunction f(Objective::NegLogFidelity, m);
  std::mt19937_64 gen(1);
  for (int i = 0; i < 50; ++i) {
    const Circuit a = oracle::random_circuit(GateSetDef::nam(), 3, 1 + i % 9, gen);
    const Circuit b = oracle::random_circuit(GateSetDef::nam(), 3, 1 + (i * 7) % 11, gen);
    EXPECT_EQ(f(a) < f(b), fidelity_score(a, m) > fidelity_score(b, m));
    EXPECT_GE(f(a), 0.0);
  }
  EXPECT_THROW(CostFunction::from_name("depth"), std::invalid_argument);
}

TEST(SearchConfig, Validation) {
  SearchConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.resynth_probability = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.epsilon_f = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.temperature = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_EQ(SearchConfig{}.resynth_probability, 0.015);
  EXPECT_EQ(SearchConfig{}.max_subcircuit_qubits, 3u);
  EXPECT_EQ(SearchConfig{}.temperature, 10.0);
}

TEST(Guoq, NoMatchesLeavesInput) {
  const Circuit c(2, {h(0), cx(0, 1)});
  SearchConfig cfg;
  cfg.max_iterations = 500;
  const auto r = guoq::guoq(c, rules({"cx-cancel", "x-cancel"}), cfg, CostFunction());
  EXPECT_EQ(r.best, c);
  EXPECT_EQ(r.budget.spent, 0.0);
  EXPECT_TRUE(r.events.empty());
}

TEST(Guoq, RzMergeReachesThreeGates) {
  NoiseModel m;
  m.set("two_qubit", 0.99);
  m.set("single_qubit", 0.999);
  SearchConfig cfg;
  cfg.epsilon_f = 0;
  cfg.max_iterations = 2000;
  const auto ts = rules({"cx-cancel", "cx-commute", "rz-commute-cx-control", "rz-merge"});
  const auto r = guoq::guoq(kRzMerge, ts, cfg, CostFunction(Objective::NegLogFidelity, m));
  EXPECT_EQ(r.best.size(), 3u);
  EXPECT_EQ(count_gates(r.best, [](const Gate& g) { return g.kind() == GateKind::Rz && g.param(0) == pi(); }), 1u);
  EXPECT_LE(oracle::distance(r.best, kRzMerge), 1e-9);
}

TEST(Guoq, CxChainReachesThreeCx) {
  SearchConfig cfg;
  cfg.epsilon_f = 0;
  cfg.max_iterations = 10000;
  const auto r = guoq::guoq(kCxChain, rules({"cx-cancel", "cx-commute"}), cfg, CostFunction());
  EXPECT_EQ(r.cost_best, 3.0);
  EXPECT_LE(oracle::distance(r.best, kCxChain), 1e-9);
}

TEST(Guoq, BudgetNeverExceeded) {
  std::mt19937_64 gen(13);
  for (double eps_f : {0.0, 0.015, 0.05}) {
    for (int trial = 0; trial < 4; ++trial) {
      const Circuit c = oracle::random_circuit(GateSetDef::nam(), 4, 30, gen);
      auto ts = nam_rules();
      ts.push_back(perturbation(0.01));
      SearchConfig cfg;
      cfg.epsilon_f = eps_f;
      cfg.resynth_probability = 0.2;
      cfg.temperature = 0.0;  // accept everything, so perturbations are taken
      cfg.max_iterations = 400;
      cfg.seed = trial;
      const auto r = guoq::guoq(c, ts, cfg, CostFunction());
      EXPECT_LE(r.budget.spent, eps_f);
      EXPECT_LE(oracle::distance(r.best, c), eps_f + 1e-9);
      // Replay: spent is the sum of epsilons of the updates leading to best.
      double sum = 0;
      for (std::size_t i = 0; i < r.best_event_count; ++i) sum += r.events[i].epsilon;
      EXPECT_NEAR(sum, r.budget.spent, 1e-15);
      for (const auto& e : r.events) EXPECT_LE(e.error_after, eps_f);
      if (eps_f == 0.05) EXPECT_GT(r.stats.budget_skips, 0u);
    }
  }
}

TEST(Guoq, BestCostTraceNonIncreasing) {
  std::mt19937_64 gen(19);
  const Circuit c = oracle::random_circuit(GateSetDef::nam(), 4, 60, gen);
  SearchConfig cfg;
  cfg.max_iterations = 3000;
  cfg.trace_stride = 7;
  const auto r = guoq::guoq(c, nam_rules(), cfg, CostFunction());
  ASSERT_GE(r.trace.size(), 2u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_LE(r.trace[i].cost_best, r.trace[i - 1].cost_best);
    EXPECT_GT(r.trace[i].iteration, r.trace[i - 1].iteration);
  }
  EXPECT_EQ(r.trace.back().cost_best, r.cost_best);
  EXPECT_LE(r.cost_best, CostFunction()(c));
}

TEST(Guoq, Deterministic) {
  std::mt19937_64 gen(23);
  const Circuit c = oracle::random_circuit(GateSetDef::nam(), 3, 40, gen);
  auto ts = nam_rules();
  ResynthesisConfig rc;
  rc.effort = 1000;
  ts.push_back(make_resynthesis_transformation(rc));
  SearchConfig cfg;
  cfg.max_iterations = 600;
  cfg.time_limit = std::chrono::hours(1);
  cfg.resynth_probability = 0.05;
  cfg.seed = 99;
  const auto a = guoq::guoq(c, ts, cfg, CostFunction());
  const auto b = guoq::guoq(c, ts, cfg, CostFunction());
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.events, b.events);
  EXPECT_FALSE(a.stats.timed_out);
  cfg.seed = 100;
  const auto other = guoq::guoq(c, ts, cfg, CostFunction());
  EXPECT_NE(a.events, other.events);
}

TEST(Guoq, InitialErrorCountsAgainstBudget) {
  SearchConfig cfg;
  cfg.epsilon_f = 0.01;
  cfg.max_iterations = 50;
  cfg.temperature = 0;
  auto ts = std::vector<Transformation>{perturbation(0.004)};
  const auto r = guoq::guoq(kRzMerge, ts, cfg, CostFunction(), 0.005);
  EXPECT_LE(r.budget.spent, 0.01);
  EXPECT_THROW(guoq::guoq(kRzMerge, ts, cfg, CostFunction(), 0.02), std::invalid_argument);
}

TEST(Guoq, TimeLimitStopsTheLoop) {
  SearchConfig cfg;
  cfg.time_limit = std::chrono::milliseconds(100);
  const auto t0 = Clock::now();
  const auto r = guoq::guoq(kCxChain, rules({"cx-commute"}), cfg, CostFunction());
  EXPECT_TRUE(r.stats.timed_out);
  EXPECT_LT(Clock::now() - t0, std::chrono::seconds(2));
}

TEST(IntegrateAsync, RejectedKeepsInterimRewrites) {
  SearchState st;
  st.current = Circuit(2, {h(0)});
  st.cost_current = 0;
  st.best = st.current;
  AsyncHandoff ho;
  ho.snapshot = Circuit(2, {h(0), h(0), h(0)});
  ho.result = Circuit(2, {cx(0, 1), cx(1, 0), cx(0, 1)});
  ho.epsilon = 0;
  SearchConfig cfg;
  cfg.temperature = 1e9;  // worse results are always rejected
  Rng rng(1);
  EXPECT_EQ(integrate_async_result(st, ho, CostFunction(), cfg, rng), HandoffOutcome::Rejected);
  EXPECT_EQ(st.current, Circuit(2, {h(0)}));
}

TEST(IntegrateAsync, AcceptedReplacesSnapshot) {
  SearchState st;
  st.current = Circuit(2, {cx(0, 1), h(1)});
  st.cost_current = 1;
  st.error_current = 0.002;
  st.best = Circuit(2, {cx(0, 1), cx(0, 1), cx(0, 1)});
  st.cost_best = 3;
  AsyncHandoff ho;
  ho.snapshot = Circuit(2, {cx(0, 1), cx(0, 1), cx(0, 1)});
  ho.snapshot_error = 0.001;
  ho.result = Circuit(2, {cx(0, 1)});
  ho.epsilon = 0.003;
  SearchConfig cfg;
  cfg.epsilon_f = 0.01;
  Rng rng(1);
  EXPECT_EQ(integrate_async_result(st, ho, CostFunction(), cfg, rng), HandoffOutcome::Accepted);
  EXPECT_EQ(st.current, *ho.result);
  EXPECT_DOUBLE_EQ(st.error_current, 0.004);
  EXPECT_EQ(st.generation, 1u);
  // A second hand-off launched before the first was integrated is stale.
  EXPECT_EQ(integrate_async_result(st, ho, CostFunction(), cfg, rng), HandoffOutcome::Stale);
}

TEST(IntegrateAsync, BudgetCheck) {
  SearchState st;
  st.current = Circuit(1);
  AsyncHandoff ho;
  ho.snapshot = Circuit(1);
  ho.snapshot_error = 0.008;
  ho.result = Circuit(1);
  ho.epsilon = 0.005;
  SearchConfig cfg;
  cfg.epsilon_f = 0.01;
  Rng rng(1);
  EXPECT_EQ(integrate_async_result(st, ho, CostFunction(), cfg, rng), HandoffOutcome::Rejected);
  ho.result.reset();
  EXPECT_EQ(integrate_async_result(st, ho, CostFunction(), cfg, rng), HandoffOutcome::Empty);
}

TEST(Guoq, AsyncResynthesisKeepsGuarantees) {
  std::mt19937_64 gen(29);
  const Circuit c = oracle::random_circuit(GateSetDef::nam(), 3, 40, gen);
  auto ts = nam_rules();
  ts.push_back(make_resynthesis_transformation(ResynthesisConfig{}));
  SearchConfig cfg;
  cfg.async_resynthesis = true;
  cfg.resynth_probability = 0.2;
  cfg.max_iterations = 3000;
  const auto r = guoq::guoq(c, ts, cfg, CostFunction());
  EXPECT_GT(r.stats.async_launched, 0u);
  EXPECT_LE(oracle::distance(r.best, c), 1e-9);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i].cost_best, r.trace[i - 1].cost_best);
}
