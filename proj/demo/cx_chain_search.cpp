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

// Searches a five-CX circuit with two rewrite rules plus exact resynthesis
// and prints the best circuit as QASM.

#include <iostream>

#include "guoq/builtin_rules.hpp"
#include "guoq/qasm.hpp"
#include "guoq/resynthesis.hpp"
#include "guoq/search.hpp"

int main() {
  using namespace guoq::gates;
  const guoq::Circuit input(5, {cx(1, 0), cx(2, 0), cx(3, 0), cx(4, 0), cx(1, 0)});

  std::vector<guoq::Transformation> moves;
  for (auto& r : guoq::builtin_rules_named({"cx-cancel", "cx-commute"})) moves.push_back(guoq::as_transformation(r));
  moves.push_back(guoq::make_resynthesis_transformation(guoq::ResynthesisConfig{}));

  guoq::SearchConfig cfg;
  cfg.epsilon_f = 0;
  cfg.max_iterations = 5000;
  cfg.seed = 1;
  const auto result = guoq::guoq(input, moves, cfg, guoq::CostFunction());

  std::cerr << "two-qubit gates: " << guoq::cost_eval(guoq::CostFunction(), input) << " -> " << result.cost_best
            << " after " << result.stats.iterations << " iterations\n";
  std::cout << guoq::emit_qasm(result.best, guoq::GateSetDef::nam());
}
