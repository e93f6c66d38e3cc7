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

// Command-line driver: optimize, run, compare, rules.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "guoq/bench.hpp"

namespace {

struct Options {
  std::string gate_set = "nam";
  std::string objective = "two-qubit-count";
  double epsilon = 1e-8;
  double resynth_epsilon = -1.0;
  double time_limit = 60.0;
  std::size_t max_iterations = 0;
  std::uint64_t seed = 0;
  std::size_t seeds = 1;
  std::string mode = "guoq";
  std::string rules;
  bool no_builtin_rules = false;
  std::string resynth = "builtin";
  std::string noise_model;
  std::size_t max_subcircuit_qubits = 3;
  double temperature = 10.0;
  double resynth_probability = 0.015;
  bool async = false;
  std::size_t synthesis_effort = 10000;
  double synthesis_budget = 5.0;
};

void add_search_options(CLI::App& app, Options& o) {
  app.add_option("--gate-set", o.gate_set, "ibmq20 | ibm-eagle | ionq | nam | clifford-t")->capture_default_str();
  app.add_option("--objective", o.objective, "two-qubit-count | weighted-t-cx | neg-log-fidelity")
      ->capture_default_str();
  app.add_option("--epsilon", o.epsilon, "total approximation budget")->capture_default_str();
  app.add_option("--resynth-epsilon", o.resynth_epsilon, "epsilon of approximate resynthesis (default epsilon/10)");
  app.add_option("--time-limit", o.time_limit, "seconds per benchmark")->capture_default_str();
  app.add_option("--max-iterations", o.max_iterations, "iteration cap (0: none)");
  app.add_option("--seed", o.seed, "master seed")->capture_default_str();
  app.add_option("--mode", o.mode, "guoq | rewrite-only | resynth-only | seq-rewrite-resynth | seq-resynth-rewrite")
      ->capture_default_str();
  app.add_option("--rules", o.rules, "JSON rule file added to the built-in rules");
  app.add_flag("--no-builtin-rules", o.no_builtin_rules, "use only the rules of --rules");
  app.add_option("--resynth", o.resynth, "builtin | plugin:CMD")->capture_default_str();
  app.add_option("--noise-model", o.noise_model, "JSON noise model");
  app.add_option("--max-subcircuit-qubits", o.max_subcircuit_qubits)->capture_default_str();
  app.add_option("--temperature", o.temperature)->capture_default_str();
  app.add_option("--resynth-probability", o.resynth_probability)->capture_default_str();
  app.add_flag("--async", o.async, "run resynthesis on a worker thread");
  app.add_option("--synthesis-effort", o.synthesis_effort, "work limit per synthesis call")->capture_default_str();
  app.add_option("--synthesis-budget", o.synthesis_budget, "seconds per synthesis call")->capture_default_str();
}

std::chrono::milliseconds to_ms(double seconds) {
  if (!(seconds >= 0.0)) throw std::invalid_argument("durations must be non-negative");
  return std::chrono::milliseconds(static_cast<std::int64_t>(seconds * 1000.0));
}

guoq::BenchConfig make_config(const Options& o) {
  guoq::BenchConfig cfg;
  cfg.gate_set = guoq::GateSetDef::from_name(o.gate_set);
  guoq::NoiseModel noise;
  if (!o.noise_model.empty()) noise = guoq::load_noise_model(o.noise_model);
  cfg.objective = guoq::CostFunction::from_name(o.objective, noise);
  cfg.search.epsilon_f = o.epsilon;
  cfg.search.temperature = o.temperature;
  cfg.search.resynth_probability = o.resynth_probability;
  cfg.search.max_subcircuit_qubits = o.max_subcircuit_qubits;
  cfg.search.time_limit = to_ms(o.time_limit);
  if (o.max_iterations > 0) cfg.search.max_iterations = o.max_iterations;
  cfg.search.async_resynthesis = o.async;
  cfg.search.validate();
  cfg.resynth_epsilon = o.resynth_epsilon;
  cfg.mode = guoq::mode_from_name(o.mode);
  if (!o.rules.empty()) cfg.extra_rules = guoq::load_rules(o.rules);
  cfg.use_builtin_rules = !o.no_builtin_rules;
  if (o.resynth.rfind("plugin:", 0) == 0) {
    cfg.plugin_command = o.resynth.substr(7);
    if (cfg.plugin_command.empty()) throw std::invalid_argument("--resynth plugin: needs a command");
  } else if (o.resynth != "builtin") {
    throw std::invalid_argument("--resynth must be 'builtin' or 'plugin:CMD'");
  }
  cfg.synthesis_effort = o.synthesis_effort;
  cfg.synthesis_budget = to_ms(o.synthesis_budget);
  cfg.seeds.clear();
  for (std::size_t i = 0; i < std::max<std::size_t>(o.seeds, 1); ++i) cfg.seeds.push_back(o.seed + i);
  return cfg;
}

int cmd_optimize(const Options& o, const std::string& input, const std::string& output) {
  const auto cfg = make_config(o);
  const auto circuit = guoq::load_qasm(input, cfg.gate_set);
  const auto res = guoq::optimize(circuit, cfg, o.seed);
  const auto in = guoq::GateCounts::of(circuit), out = guoq::GateCounts::of(res.best);
  const std::string text = guoq::emit_qasm(res.best, cfg.gate_set);
  if (output.empty() || output == "-") {
    std::cout << text;
  } else {
    std::ofstream(output) << text;
  }
  std::cerr << "gates " << in.total << " -> " << out.total << ", two-qubit " << in.two_qubit << " -> "
            << out.two_qubit << ", cost " << cfg.objective(circuit) << " -> " << res.cost_best << ", error "
            << res.budget.spent << ", iterations " << res.stats.iterations << "\n";
  return 0;
}

int cmd_run(const Options& o, const std::string& corpus, const std::string& out_dir) {
  auto cfg = make_config(o);
  cfg.out_dir = out_dir;
  const auto rep = guoq::run(corpus, cfg);
  std::size_t failed = 0;
  for (const auto& r : rep.records) {
    std::cerr << r.benchmark << " seed " << r.seed << ": " << r.status;
    if (r.status == "ok") {
      std::cerr << " two-qubit " << r.input.two_qubit << " -> " << r.output.two_qubit << ", gates "
                << r.input.total << " -> " << r.output.total;
    } else {
      std::cerr << " (" << r.error << ")";
      ++failed;
    }
    std::cerr << "\n";
  }
  if (out_dir.empty()) std::cout << guoq::report_json(rep).dump(2) << "\n";
  std::cerr << rep.records.size() << " records, " << failed << " not ok\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& files, std::vector<std::string> labels, const std::string& metric,
                const std::string& out_dir) {
  if (files.size() < 2) throw std::invalid_argument("compare needs at least two reports");
  if (labels.empty()) {
    for (const auto& f : files) labels.push_back(std::filesystem::path(f).parent_path().filename().string());
    std::set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() != labels.size() || unique.count("")) labels = files;
  }
  std::vector<guoq::RunReport> reports;
  for (const auto& f : files) reports.push_back(guoq::load_report(f));
  const auto c = guoq::compare(reports, labels, metric);
  const auto j = guoq::comparison_json(c);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / "comparison.json") << j.dump(2) << "\n";
    std::ofstream(std::filesystem::path(out_dir) / "comparison.csv") << guoq::comparison_csv(c);
  }
  for (const auto& p : c.pairs) {
    std::cout << c.labels[p.a] << " vs " << c.labels[p.b] << ": outperform " << p.outperform << ", match "
              << p.match << ", underperform " << p.underperform << "\n";
  }
  for (const auto& b : c.excluded) std::cout << "excluded: " << b << "\n";
  return 0;
}

int cmd_rules(const std::string& gate_set, bool verify, std::uint64_t seed) {
  const auto set = guoq::GateSetDef::from_name(gate_set);
  guoq::Rng rng(seed);
  int bad = 0;
  for (const auto& r : guoq::builtin_rules(set)) {
    std::cout << r.name();
    if (verify) {
      const double d = guoq::verify_rule(r, rng);
      std::cout << "  max distance " << d;
      if (d > guoq::kRuleTolerance) {
        std::cout << "  UNSOUND";
        ++bad;
      }
    }
    std::cout << "\n";
  }
  return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum circuit optimizer combining rewrite rules and resynthesis"};
  app.require_subcommand(1);
  Options o;

  auto* opt = app.add_subcommand("optimize", "optimize one QASM file");
  std::string input, output;
  opt->add_option("input", input, "QASM file")->required()->check(CLI::ExistingFile);
  opt->add_option("-o,--output", output, "output QASM file (default stdout)");
  add_search_options(*opt, o);

  auto* run = app.add_subcommand("run", "optimize a corpus and write a report");
  std::string corpus, out_dir;
  run->add_option("corpus", corpus, "directory of QASM files, or one file")->required();
  run->add_option("--out", out_dir, "report directory (default: JSON on stdout)");
  run->add_option("--seeds", o.seeds, "number of seeds, starting at --seed")->capture_default_str();
  add_search_options(*run, o);

  auto* cmp = app.add_subcommand("compare", "compare reports");
  std::vector<std::string> reports, labels;
  std::string metric = "two_qubit", cmp_out;
  cmp->add_option("reports", reports, "report.json files")->required()->check(CLI::ExistingFile);
  cmp->add_option("--labels", labels, "one label per report, comma separated")->delimiter(',');
  cmp->add_option("--metric", metric, "two_qubit | total | t | cost | fidelity")->capture_default_str();
  cmp->add_option("--out", cmp_out, "directory for comparison.json and comparison.csv");

  auto* rules = app.add_subcommand("rules", "list built-in rules");
  std::string rules_set = "nam";
  bool verify = false;
  std::uint64_t rules_seed = 0;
  rules->add_option("--gate-set", rules_set)->capture_default_str();
  rules->add_flag("--verify", verify, "check each rule on random angles");
  rules->add_option("--seed", rules_seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*opt) return cmd_optimize(o, input, output);
    if (*run) return cmd_run(o, corpus, out_dir);
    if (*cmp) return cmd_compare(reports, labels, metric, cmp_out);
    if (*rules) return cmd_rules(rules_set, verify, rules_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
