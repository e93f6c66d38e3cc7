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
#include <numeric>

#include "guoq/builtin_rules.hpp"
#include "test_util.hpp"

using namespace guoq;
using namespace guoq::gates;

namespace {

RewriteRule rule(const std::string& name) { return builtin_rules_named({name}).at(0); }

bool has_rule(const std::vector<RewriteRule>& rules, const std::string& name) {
  return std::any_of(rules.begin(), rules.end(), [&](const RewriteRule& r) { return r.name() == name; });
}

Circuit instantiate(const RulePattern& p, const std::vector<Angle>& binding, std::size_t k) {
  std::vector<Qubit> id(k);
  for (std::size_t i = 0; i < k; ++i) id[i] = static_cast<Qubit>(i);
  return p.instantiate(binding, id, k);
}

}  // namespace

TEST(BuiltinRules, SoundUnderIndependentSimulator) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> ang(-2 * kTwoPi, 2 * kTwoPi);
  for (const auto& r : all_builtin_rules()) {
    for (int s = 0; s < 100; ++s) {
      std::vector<Angle> b;
      for (std::size_t v = 0; v < r.num_vars(); ++v) b.push_back(Angle::radians(ang(gen)));
      const double d =
          oracle::distance(instantiate(r.lhs(), b, r.num_qubits()), instantiate(r.rhs(), b, r.num_qubits()));
      ASSERT_LE(d, 1e-9) << r.name();
    }
  }
}

TEST(BuiltinRules, LibraryVerifierAgrees) {
  Rng rng(3);
  for (const auto& r : all_builtin_rules()) EXPECT_TRUE(rule_is_sound(r, rng)) << r.name();
}

TEST(BuiltinRules, NeverGrowCircuits) {
  for (const auto& r : all_builtin_rules()) EXPECT_LE(r.rhs().size(), r.lhs().size()) << r.name();
}

TEST(BuiltinRules, PerGateSetContents) {
  const auto nam = builtin_rules(GateSetDef::nam());
  for (const char* n : {"cx-cancel", "cx-commute", "rz-commute-cx-control", "rz-merge"}) EXPECT_TRUE(has_rule(nam, n)) << n;
  const auto ct = builtin_rules(GateSetDef::clifford_t());
  for (const char* n : {"t-tdg-cancel", "tdg-t-cancel", "h-cancel", "x-cancel", "s-sdg-cancel", "t-t", "s-s-s",
                        "t-commute-cx-control", "s-commute-cx-control"}) {
    EXPECT_TRUE(has_rule(ct, n)) << n;
  }
  const auto ionq = builtin_rules(GateSetDef::ionq());
  EXPECT_TRUE(has_rule(ionq, "rx-merge"));
  EXPECT_TRUE(has_rule(ionq, "ry-merge"));
  EXPECT_TRUE(has_rule(ionq, "rz-merge"));
  EXPECT_FALSE(has_rule(ionq, "cx-cancel"));
  for (const auto& set : GateSetDef::all()) {
    for (const auto& r : builtin_rules(set)) EXPECT_TRUE(r.expressible_in(set)) << r.name() << " " << set.name();
  }
}

TEST(BuiltinRules, IonqMergeMatchesRandomInstantiation) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> ang(-7, 7);
  for (int s = 0; s < 50; ++s) {
    const Angle a = Angle::radians(ang(gen)), b = Angle::radians(ang(gen));
    EXPECT_LT(oracle::distance(Circuit(1, {rx(a, 0), rx(b, 0)}), Circuit(1, {rx(a + b, 0)})), 1e-9);
    EXPECT_LT(oracle::distance(Circuit(1, {ry(a, 0), ry(b, 0)}), Circuit(1, {ry(a + b, 0)})), 1e-9);
  }
}

TEST(RuleParsing, RejectsMalformedRules) {
  EXPECT_THROW(RewriteRule("grow", "h 0", "h 0; h 0; h 0"), RuleError);
  EXPECT_THROW(RewriteRule("unbound", "rz(a) 0", "rz(b) 0"), RuleError);
  EXPECT_THROW(RewriteRule("empty", "", ""), RuleError);
  EXPECT_THROW(RewriteRule("disconnected", "h 0; h 1", ""), RuleError);
  EXPECT_THROW(RewriteRule("sparse", "h 0; cx 0 2", "h 0; cx 0 2"), RuleError);
  EXPECT_THROW(RewriteRule("bad-gate", "foo 0", ""), RuleError);
}

TEST(RuleParsing, SymbolicSums) {
  const RewriteRule r("merge3", "rz(a) 0; rz(b) 0; rz(c) 0", "rz(a+b+c) 0");
  EXPECT_EQ(r.num_vars(), 3u);
  const RewriteRule k("shift", "rz(a) 0; rz(pi/2) 0", "rz(a+pi/2) 0");
  Rng rng(1);
  EXPECT_TRUE(rule_is_sound(k, rng));
}

TEST(RuleParsing, JsonFile) {
  const auto path = std::filesystem::temp_directory_path() / "guoq_rules_test.json";
  std::ofstream(path) << R"([
    {"name": "hh", "lhs": "h 0; h 0", "rhs": ""},
    {"name": "merge", "lhs": [{"gate": "rz", "qubits": [0], "params": ["a"]},
                             {"gate": "rz", "qubits": [0], "params": ["b"]}],
                      "rhs": [{"gate": "rz", "qubits": [0], "params": ["a+b"]}]}
  ])";
  const auto rules = load_rules(path);
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[0].name(), "hh");
  EXPECT_EQ(rules[1].num_vars(), 2u);
  const auto res = apply_rule_pass(Circuit(1, {rz(pi(1, 4), 0), rz(pi(1, 4), 0)}), rules[1]);
  EXPECT_EQ(res.circuit, Circuit(1, {rz(pi(1, 2), 0)}));
  std::ofstream(path) << R"([{"name": "x"}])";
  EXPECT_THROW(load_rules(path), std::exception);
  std::filesystem::remove(path);
}

TEST(RuleParsing, ShippedExampleFileIsSound) {
  const auto rules = load_rules(oracle::benchmark_dir().parent_path() / "rules" / "example.json");
  ASSERT_EQ(rules.size(), 4u);
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> ang(-7.0, 7.0);
  for (const auto& r : rules) {
    EXPECT_TRUE(r.expressible_in(GateSetDef::nam())) << r.name();
    for (int s = 0; s < 20; ++s) {
      std::vector<Angle> binding;
      for (std::size_t v = 0; v < r.num_vars(); ++v) binding.push_back(Angle::radians(ang(gen)));
      std::vector<Qubit> qmap(r.num_qubits());
      std::iota(qmap.begin(), qmap.end(), Qubit{0});
      const Circuit lhs = r.lhs().instantiate(binding, qmap, r.num_qubits());
      const Circuit rhs = r.rhs().instantiate(binding, qmap, r.num_qubits());
      EXPECT_LT(oracle::distance(lhs, rhs), 1e-9) << r.name();
    }
  }
}

TEST(FindMatch, CxCancel) {
  const CircuitDag dag(Circuit(2, {cx(0, 1), cx(0, 1)}));
  const auto m = find_match(rule("cx-cancel"), dag, 0);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->nodes, (std::vector<NodeId>{0, 1}));
}

TEST(FindMatch, InterveningGateBlocks) {
  const CircuitDag dag(Circuit(2, {cx(0, 1), h(0), cx(0, 1)}));
  EXPECT_FALSE(find_match(rule("cx-cancel"), dag, 0));
}

TEST(FindMatch, ReversedCxDoesNotCancel) {
  const CircuitDag dag(Circuit(2, {cx(0, 1), cx(1, 0)}));
  EXPECT_FALSE(find_match(rule("cx-cancel"), dag, 0));
}

TEST(FindMatch, RzMergeBindsAngles) {
  const CircuitDag dag(Circuit(1, {rz(pi(1, 2), 0), rz(pi(1, 2), 0)}));
  const auto m = find_match(rule("rz-merge"), dag, 0);
  ASSERT_TRUE(m);
  ASSERT_EQ(m->angles.size(), 2u);
  EXPECT_EQ(m->angles[0], pi(1, 2));
  EXPECT_EQ(m->angles[1], pi(1, 2));
}

TEST(FindMatch, ConstantsMustAgree) {
  const RewriteRule r = rule("h-rz-pi-h");
  EXPECT_TRUE(find_match(r, CircuitDag(Circuit(1, {h(0), rz(pi(), 0), h(0)})), 0));
  EXPECT_FALSE(find_match(r, CircuitDag(Circuit(1, {h(0), rz(pi(1, 2), 0), h(0)})), 0));
  EXPECT_TRUE(find_match(r, CircuitDag(Circuit(1, {h(0), rz(Angle::radians(kPi), 0), h(0)})), 0));
  EXPECT_FALSE(find_match(r, CircuitDag(Circuit(1, {h(0), rz(Angle::radians(kPi + 1e-9), 0), h(0)})), 0));
}

TEST(FindMatch, MatchesAreConvexAndInjective) {
  std::mt19937_64 gen(31);
  const auto rules = builtin_rules(GateSetDef::nam());
  std::size_t found = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Circuit c = oracle::random_circuit(GateSetDef::nam(), 3, 14, gen);
    const CircuitDag dag(c);
    for (const auto& r : rules) {
      for (NodeId a = 0; a < c.size(); ++a) {
        const auto m = find_match(r, dag, a);
        if (!m) continue;
        ++found;
        EXPECT_EQ(m->nodes.front(), a);
        EXPECT_TRUE(oracle::convex(dag, m->nodes)) << r.name();
        std::set<Qubit> qs(m->qubits.begin(), m->qubits.end());
        EXPECT_EQ(qs.size(), m->qubits.size());
        // The bound gates instantiate the pattern.
        const Circuit lhs = r.lhs().instantiate(m->angles, m->qubits, c.num_qubits());
        for (std::size_t i = 0; i < lhs.size(); ++i) {
          EXPECT_EQ(lhs[i].kind(), c[m->nodes[i]].kind());
          for (std::size_t p = 0; p < lhs[i].params().size(); ++p) {
            EXPECT_TRUE(lhs[i].param(p).equivalent(c[m->nodes[i]].param(p), 1e-9));
          }
        }
      }
    }
  }
  EXPECT_GT(found, 50u);
}

TEST(ApplyRulePass, NoMatch) {
  const Circuit c(2, {h(0), cx(0, 1)});
  const auto r = apply_rule_pass(c, rule("cx-cancel"));
  EXPECT_EQ(r.applied, 0u);
  EXPECT_EQ(r.circuit, c);
}

TEST(ApplyRulePass, DisjointMatches) {
  const Circuit c(2, {cx(0, 1), cx(0, 1), cx(0, 1)});
  const auto r = apply_rule_pass(c, rule("cx-cancel"));
  EXPECT_EQ(r.applied, 1u);
  EXPECT_EQ(r.circuit.size(), 1u);
  const Circuit four(2, {cx(0, 1), cx(0, 1), cx(0, 1), cx(0, 1)});
  EXPECT_EQ(apply_rule_pass(four, rule("cx-cancel")).applied, 2u);
}

TEST(ApplyRulePass, WrapsAroundFromStart) {
  const Circuit c(2, {h(0), h(0), x(1), x(1)});
  const auto r = apply_rule_pass(c, rule("x-cancel"), 3);
  EXPECT_EQ(r.applied, 1u);
  EXPECT_EQ(r.circuit, Circuit(2, {h(0), h(0)}));
  EXPECT_THROW(apply_rule_pass(c, rule("x-cancel"), 4), std::out_of_range);
}

TEST(ApplyRulePass, RzMergeSequence) {
  const Circuit f5(2, {rz(pi(1, 2), 0), h(1), cx(0, 1), rz(pi(1, 2), 0)});
  const auto a = apply_rule_pass(f5, rule("rz-commute-cx-control"));
  EXPECT_EQ(a.applied, 1u);
  const auto b = apply_rule_pass(a.circuit, rule("rz-merge"));
  EXPECT_EQ(b.applied, 1u);
  EXPECT_EQ(b.circuit.size(), 3u);
  EXPECT_LT(oracle::distance(b.circuit, Circuit(2, {h(1), cx(0, 1), rz(pi(), 0)})), 1e-9);
  EXPECT_EQ(count_gates(b.circuit, [](const Gate& g) { return g.kind() == GateKind::Rz && g.param(0) == pi(); }), 1u);
}

TEST(ApplyRulePass, CxChainFixpoint) {
  const Circuit start(5, {cx(1, 0), cx(2, 0), cx(3, 0), cx(4, 0), cx(1, 0)});
  const RewriteRule commute = rule("cx-commute"), cancel = rule("cx-cancel");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    Circuit c = start;
    for (int round = 0; round < 200 && c.size() > 3; ++round) {
      c = apply_rule_pass(c, commute, rng.below(c.size())).circuit;
      c = apply_rule_pass(c, cancel, rng.below(c.size())).circuit;
    }
    EXPECT_EQ(c.size(), 3u);
    EXPECT_LT(oracle::distance(c, start), 1e-9);
  }
}

TEST(ApplyRulePass, SoundAndNonGrowingOnRandomCircuits) {
  std::mt19937_64 gen(41);
  for (const auto& set : GateSetDef::all()) {
    const auto rules = builtin_rules(set);
    for (int trial = 0; trial < 15; ++trial) {
      Circuit c = oracle::random_circuit(set, 4, 40, gen);
      const Circuit input = c;
      Rng rng(trial);
      for (int step = 0; step < 40 && !c.empty(); ++step) {
        const auto& r = rules[rng.below(rules.size())];
        const auto res = apply_rule_pass(c, r, rng.below(c.size()));
        EXPECT_LE(res.circuit.size(), c.size());
        c = res.circuit;
      }
      EXPECT_LT(oracle::distance(c, input), 1e-9) << set.name();
    }
  }
}

TEST(AsTransformation, CxCancelRemovesTwoGates) {
  const auto t = as_transformation(rule("cx-cancel"));
  EXPECT_EQ(t.epsilon, 0.0);
  EXPECT_EQ(t.kind, TransformationKind::Rewrite);
  TransformContext ctx{Rng(1)};
  const auto out = t.action(Circuit(2, {h(0), cx(0, 1), cx(0, 1)}), ctx);
  ASSERT_TRUE(out);
  EXPECT_EQ(out->size(), 1u);
}

TEST(AsTransformation, IdentityWithoutMatch) {
  const auto t = as_transformation(rule("cx-cancel"));
  TransformContext ctx{Rng(1)};
  EXPECT_FALSE(t.action(Circuit(2, {h(0), cx(0, 1)}), ctx));
  EXPECT_FALSE(t.action(Circuit(2), ctx));
}

TEST(AsTransformation, RzMergeComposition) {
  const Circuit f5(2, {rz(pi(1, 2), 0), h(1), cx(0, 1), rz(pi(1, 2), 0)});
  const auto commute = as_transformation(rule("rz-commute-cx-control"));
  const auto merge = as_transformation(rule("rz-merge"));
  TransformContext ctx{Rng(5)};
  const auto a = commute.action(f5, ctx);
  ASSERT_TRUE(a);
  const auto b = merge.action(*a, ctx);
  ASSERT_TRUE(b);
  EXPECT_EQ(f5.size(), 4u);
  EXPECT_EQ(b->size(), 3u);
  EXPECT_LT(oracle::distance(*b, f5), 1e-9);
}
