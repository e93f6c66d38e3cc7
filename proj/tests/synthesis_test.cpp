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

#include <fstream>
#include <map>

#include "guoq/resynthesis.hpp"
#include "test_util.hpp"

using namespace guoq;
using namespace guoq::gates;

namespace {

const Circuit kRzMergeIn(2, {rz(pi(1, 2), 0), h(1), cx(0, 1), rz(pi(1, 2), 0)});
const Circuit kRzMergeOut(2, {rz(pi(), 0), h(1), cx(0, 1)});

Circuit rz_ladder() {
  return Circuit(3, {cx(0, 1), rz(pi(1, 4), 0), cx(0, 2), rz(pi(1, 4), 0), cx(0, 2), rz(pi(1, 4), 0), cx(0, 2),
                     rz(pi(1, 4), 0), cx(0, 1)});
}

SynthesisRequest request(const Circuit& c, const GateSetDef& set) {
  SynthesisRequest r;
  r.target = oracle::unitary(c);
  r.gate_set = set;
  return r;
}

Subcircuit whole(const CircuitDag& dag) {
  std::vector<NodeId> all(dag.size());
  for (NodeId i = 0; i < dag.size(); ++i) all[i] = i;
  return Subcircuit(dag, all);
}

std::string plugin(const std::string& args) { return std::string(FAKE_PLUGIN_PATH) + " " + args; }

}  // namespace

TEST(TemplateFit, SingleRotation) {
  auto req = request(Circuit(1, {rz(Angle::radians(0.7), 0)}), GateSetDef::ibm_eagle());
  const auto r = template_fit_synthesize(req);
  ASSERT_TRUE(r);
  EXPECT_EQ(count_gates(r->circuit, is_two_qubit), 0u);
  EXPECT_LE(oracle::distance(oracle::unitary(r->circuit), req.target), 1e-9);
  EXPECT_EQ(r->synthesizer, SynthesizerTag::TemplateFit);
  EXPECT_TRUE(r->circuit.valid_for(GateSetDef::ibm_eagle()));
}

TEST(TemplateFit, CxWithOneRxx) {
  auto req = request(Circuit(2, {cx(0, 1)}), GateSetDef::ionq());
  const auto r = template_fit_synthesize(req);
  ASSERT_TRUE(r);
  EXPECT_EQ(count_gates(r->circuit, is_two_qubit), 1u);
  EXPECT_TRUE(r->circuit.valid_for(GateSetDef::ionq()));
  EXPECT_LE(oracle::distance(oracle::unitary(r->circuit), req.target), 1e-9);
}

TEST(TemplateFit, IdentityNeedsNoGates) {
  for (const auto& set : {GateSetDef::nam(), GateSetDef::ibmq20(), GateSetDef::ionq(), GateSetDef::ibm_eagle()}) {
    auto req = request(Circuit(2), set);
    const auto r = template_fit_synthesize(req);
    ASSERT_TRUE(r) << set.name();
    EXPECT_EQ(count_gates(r->circuit, is_two_qubit), 0u);
    EXPECT_LE(r->achieved_distance, 1e-9);
  }
}

TEST(TemplateFit, RandomTwoQubitUnitariesEveryParameterisedSet) {
  std::mt19937_64 gen(12);
  for (const auto& set : {GateSetDef::nam(), GateSetDef::ibmq20(), GateSetDef::ionq(), GateSetDef::ibm_eagle()}) {
    for (int trial = 0; trial < 2; ++trial) {
      auto req = request(oracle::random_circuit(set, 2, 12, gen), set);
      req.seed = trial;
      const auto r = template_fit_synthesize(req);
      ASSERT_TRUE(r) << set.name();
      EXPECT_TRUE(r->circuit.valid_for(set));
      EXPECT_LE(count_gates(r->circuit, is_two_qubit), 3u);
      EXPECT_LE(oracle::distance(oracle::unitary(r->circuit), req.target), 1e-9);
    }
  }
}

TEST(TemplateFit, ApproximateTargetWithinEpsilon) {
  auto req = request(Circuit(1, {rz(Angle::radians(1e-4), 0)}), GateSetDef::nam());
  req.epsilon = 1e-3;
  const auto r = template_fit_synthesize(req);
  ASSERT_TRUE(r);
  EXPECT_TRUE(r->circuit.empty());
  EXPECT_LE(r->achieved_distance, 1e-3);
}

TEST(TemplateFit, DeterministicUnderSeed) {
  auto req = request(rz_ladder(), GateSetDef::nam());
  req.seed = 4;
  const auto a = template_fit_synthesize(req), b = template_fit_synthesize(req);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->circuit, b->circuit);
}

TEST(ExactSearch, SingleT) {
  auto req = request(Circuit(1, {t(0)}), GateSetDef::clifford_t());
  const auto r = exact_search_synthesize(req);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->circuit, Circuit(1, {t(0)}));
  EXPECT_EQ(r->synthesizer, SynthesizerTag::ExactSearch);
}

TEST(ExactSearch, PrefersSOverTT) {
  auto req = request(Circuit(1, {s(0)}), GateSetDef::clifford_t());
  req.objective = CostFunction(Objective::WeightedTCx);
  EXPECT_EQ(exact_search_synthesize(req)->circuit, Circuit(1, {s(0)}));
  req.objective = CostFunction(Objective::TwoQubitCount);
  EXPECT_EQ(exact_search_synthesize(req)->circuit, Circuit(1, {s(0)}));
}

TEST(ExactSearch, IdentityIsEmpty) {
  const auto r = exact_search_synthesize(request(Circuit(1), GateSetDef::clifford_t()));
  ASSERT_TRUE(r);
  EXPECT_TRUE(r->circuit.empty());
}

TEST(ExactSearch, RejectsParameterisedSets) {
  EXPECT_THROW(exact_search_synthesize(request(Circuit(1), GateSetDef::nam())), SynthesisError);
}

TEST(ExactSearch, MinimalAgainstBruteForce) {
  // Every single-qubit Clifford+T circuit of at most four gates; keep the
  // least (cost, length) per unitary up to phase.
  const CostFunction cost(Objective::WeightedTCx);
  const std::vector<Gate> alphabet{t(0), tdg(0), s(0), sdg(0), h(0), x(0)};
  std::vector<std::pair<oracle::M, std::pair<double, std::size_t>>> classes;
  std::vector<std::size_t> word;
  auto visit = [&](const std::vector<std::size_t>& w) {
    Circuit c(1);
    for (auto i : w) c.append(alphabet[i]);
    const oracle::M u = oracle::unitary(c);
    const std::pair<double, std::size_t> key{cost(c), c.size()};
    for (auto& [v, best] : classes) {
      if (oracle::distance(u, v) < 1e-9) {
        best = std::min(best, key);
        return;
      }
    }
    classes.emplace_back(u, key);
  };
  for (std::size_t len = 0; len <= 4; ++len) {
    std::vector<std::size_t> w(len, 0);
    for (;;) {
      visit(w);
      std::size_t i = 0;
      while (i < len && ++w[i] == alphabet.size()) w[i++] = 0;
      if (i == len) break;
    }
  }
  EXPECT_GT(classes.size(), 50u);
  for (const auto& [u, best] : classes) {
    SynthesisRequest req;
    req.target = u;
    req.gate_set = GateSetDef::clifford_t();
    req.objective = cost;
    req.max_depth = 4;
    const auto r = exact_search_synthesize(req);
    ASSERT_TRUE(r);
    EXPECT_LE(oracle::distance(oracle::unitary(r->circuit), u), 1e-9);
    EXPECT_EQ(std::make_pair(cost(r->circuit), r->circuit.size()), best);
  }
}

TEST(ExactSearch, TwoQubitCliffordT) {
  auto req = request(Circuit(2, {t(0), cx(0, 1), t(0), cx(0, 1), tdg(0)}), GateSetDef::clifford_t());
  req.objective = CostFunction(Objective::WeightedTCx);
  const auto r = exact_search_synthesize(req);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->circuit, Circuit(2, {t(0)}));
}

TEST(Synthesis, QubitCap) {
  SynthesisRequest req;
  req.target = Matrix::Identity(32, 32);
  EXPECT_THROW(builtin_synthesize(req), QubitCapError);
  const Circuit c(5, {cx(0, 1), cx(1, 2), cx(2, 3), cx(3, 4)});
  const CircuitDag dag(c);
  EXPECT_THROW(resynthesize(whole(dag), ResynthesisConfig{}, 0), QubitCapError);
}

TEST(Resynthesize, RzMerge) {
  const CircuitDag dag(kRzMergeIn);
  const auto r = resynthesize(whole(dag), ResynthesisConfig{}, 0);
  ASSERT_TRUE(r);
  EXPECT_LE(r->circuit.size(), 3u);
  EXPECT_LE(oracle::distance(r->circuit, kRzMergeOut), 1e-9);
  EXPECT_LE(r->achieved_distance, 1e-9);
}

TEST(Resynthesize, CancellingPairBecomesEmpty) {
  const CircuitDag dag(Circuit(2, {cx(0, 1), cx(0, 1)}));
  const auto r = resynthesize(whole(dag), ResynthesisConfig{}, 0);
  ASSERT_TRUE(r);
  EXPECT_TRUE(r->circuit.empty());
}

TEST(Resynthesize, RzLadder) {
  const Circuit c = rz_ladder();
  const CircuitDag dag(c);
  const auto r = resynthesize(whole(dag), ResynthesisConfig{}, 0);
  ASSERT_TRUE(r);
  EXPECT_LE(r->circuit.size(), 2u);
  EXPECT_LE(oracle::distance(r->circuit, c), 1e-9);
  EXPECT_LE(oracle::distance(r->circuit, Circuit(3, {rz(pi(), 0), cx(0, 2)})), 1e-9);
}

TEST(Resynthesize, NoImprovementIsNoResult) {
  const CircuitDag dag(Circuit(2, {h(1), cx(0, 1)}));
  EXPECT_FALSE(resynthesize(whole(dag), ResynthesisConfig{}, 0));
}

TEST(Resynthesize, ReplacementKeepsWholeCircuitEquivalent) {
  std::mt19937_64 gen(8);
  ResynthesisConfig cfg;
  std::size_t improved = 0;
  for (int trial = 0; trial < 8; ++trial) {
    const Circuit c = oracle::random_circuit(GateSetDef::nam(), 5, 30, gen);
    const CircuitDag dag(c);
    Rng rng(trial);
    const auto sub = extract_subcircuit_greedy(dag, static_cast<NodeId>(rng.below(c.size())), 2, rng);
    const auto r = resynthesize(sub, cfg, trial);
    if (!r) continue;
    ++improved;
    EXPECT_LE(cfg.objective(r->circuit), cfg.objective(sub.local_circuit()));
    EXPECT_LE(oracle::distance(replace_subcircuit(c, sub, r->circuit), c), 1e-9);
  }
  EXPECT_GT(improved, 0u);
}

TEST(ResynthesisTransformation, ShapeAndStats) {
  ResynthesisConfig cfg;
  auto stats = std::make_shared<ResynthesisStats>();
  const auto t = make_resynthesis_transformation(cfg, stats);
  EXPECT_EQ(t.kind, TransformationKind::Resynthesis);
  EXPECT_EQ(t.epsilon, 0.0);
  TransformContext ctx{Rng(3)};
  const auto out = t.action(kRzMergeIn, ctx);
  ASSERT_TRUE(out);
  EXPECT_EQ(out->size(), 3u);
  EXPECT_LE(oracle::distance(*out, kRzMergeIn), 1e-9);
  EXPECT_EQ(stats->calls.load(), 1u);
  EXPECT_EQ(stats->improved.load(), 1u);
  cfg.epsilon = 1e-4;
  EXPECT_EQ(make_resynthesis_transformation(cfg).epsilon, 1e-4);
}

TEST(Plugin, RequestWireFormat) {
  auto req = request(Circuit(1, {h(0)}), GateSetDef::nam());
  const auto j = plugin_request_json(req);
  EXPECT_EQ(j["version"], 1);
  EXPECT_EQ(j["gate_set"], "nam");
  EXPECT_EQ(j["objective"], "two-qubit-count");
  ASSERT_EQ(j["unitary"].size(), 2u);
  EXPECT_NEAR(j["unitary"][1][1][0].get<double>(), -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(j["unitary"][1][1][1].get<double>(), 0.0);
}

TEST(Plugin, EchoIsAcceptedButNotAnImprovement) {
  const auto path = std::filesystem::temp_directory_path() / "guoq_echo_circuit.json";
  std::ofstream(path) << R"([{"name":"rz","qubits":[0],"params":[1.5707963267948966]},{"name":"h","qubits":[1]},
    {"name":"cx","qubits":[0,1]},{"name":"rz","qubits":[0],"params":[1.5707963267948966]}])";
  auto req = request(kRzMergeIn, GateSetDef::nam());
  const auto r = plugin_synthesize(req, plugin("circuit " + path.string()));
  ASSERT_TRUE(r);
  EXPECT_LE(r->achieved_distance, 1e-12);
  EXPECT_EQ(r->synthesizer, SynthesizerTag::Plugin);
  EXPECT_EQ(r->circuit, kRzMergeIn);
  ResynthesisConfig cfg;
  cfg.plugin_command = plugin("circuit " + path.string());
  const CircuitDag dag(kRzMergeIn);
  EXPECT_FALSE(resynthesize(whole(dag), cfg, 0));
  std::filesystem::remove(path);
}

TEST(Plugin, RzMergeAnswer) {
  ResynthesisConfig cfg;
  cfg.plugin_command = plugin("merged");
  const CircuitDag dag(kRzMergeIn);
  const auto r = resynthesize(whole(dag), cfg, 0);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->circuit, kRzMergeOut);
  EXPECT_EQ(r->synthesizer, SynthesizerTag::Plugin);
}

TEST(Plugin, ContractViolation) {
  auto req = request(kRzMergeIn, GateSetDef::nam());
  try {
    plugin_synthesize(req, plugin("bad"));
    FAIL();
  } catch (const PluginError& e) {
    EXPECT_EQ(e.kind(), PluginError::Kind::ContractViolation);
  }
  try {
    plugin_synthesize(req, plugin("foreign"));
    FAIL();
  } catch (const PluginError& e) {
    EXPECT_EQ(e.kind(), PluginError::Kind::ContractViolation);
  }
}

TEST(Plugin, FailureKinds) {
  auto req = request(kRzMergeIn, GateSetDef::nam());
  EXPECT_FALSE(plugin_synthesize(req, plugin("decline")));
  auto kind_of = [&](const std::string& cmd) {
    try {
      plugin_synthesize(req, cmd);
    } catch (const PluginError& e) {
      return e.kind();
    }
    ADD_FAILURE() << cmd;
    return PluginError::Kind::ProcessFailure;
  };
  EXPECT_EQ(kind_of(plugin("crash")), PluginError::Kind::ProcessFailure);
  EXPECT_EQ(kind_of("/nonexistent/synthesizer"), PluginError::Kind::ProcessFailure);
  EXPECT_EQ(kind_of(plugin("garbage")), PluginError::Kind::MalformedResponse);
  req.deadline = Clock::now() + std::chrono::milliseconds(300);
  const auto t0 = Clock::now();
  EXPECT_EQ(kind_of(plugin("sleep")), PluginError::Kind::Timeout);
  EXPECT_LT(Clock::now() - t0, std::chrono::seconds(5));
}

TEST(Plugin, TransformationSurvivesFailures) {
  for (const char* mode : {"bad", "crash", "garbage", "foreign"}) {
    ResynthesisConfig cfg;
    cfg.plugin_command = plugin(mode);
    auto stats = std::make_shared<ResynthesisStats>();
    const auto t = make_resynthesis_transformation(cfg, stats);
    TransformContext ctx{Rng(1)};
    EXPECT_FALSE(t.action(kRzMergeIn, ctx)) << mode;
    EXPECT_EQ(stats->contract_violations + stats->plugin_failures + stats->timeouts, 1u) << mode;
  }
}
