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

// Corpus driver: optimisation modes, metrics, and JSON/CSV reports.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "guoq/builtin_rules.hpp"
#include "guoq/qasm.hpp"
#include "guoq/resynthesis.hpp"
#include "guoq/search.hpp"
#include "json.hpp"

namespace guoq {

enum class Mode { Guoq, RewriteOnly, ResynthOnly, SeqRewriteResynth, SeqResynthRewrite };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::Guoq:
      return "guoq";
    case Mode::RewriteOnly:
      return "rewrite-only";
    case Mode::ResynthOnly:
      return "resynth-only";
    case Mode::SeqRewriteResynth:
      return "seq-rewrite-resynth";
    case Mode::SeqResynthRewrite:
      return "seq-resynth-rewrite";
  }
  return {};
}

inline Mode mode_from_name(std::string_view name) {
  for (Mode m : {Mode::Guoq, Mode::RewriteOnly, Mode::ResynthOnly, Mode::SeqRewriteResynth, Mode::SeqResynthRewrite}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

/// Everything a run needs besides the corpus.
struct BenchConfig {
  GateSetDef gate_set = GateSetDef::nam();
  CostFunction objective;
  SearchConfig search;
  /// Epsilon of the approximate resynthesis move; negative means epsilon_f / 10.
  double resynth_epsilon = -1.0;
  std::vector<std::uint64_t> seeds{0};
  Mode mode = Mode::Guoq;
  /// Rules on top of (or, with use_builtin_rules = false, instead of) the
  /// built-in set for the gate set.
  std::vector<RewriteRule> extra_rules;
  bool use_builtin_rules = true;
  std::string plugin_command;
  std::size_t synthesis_effort = 10000;
  std::chrono::milliseconds synthesis_budget{5000};
  /// Circuits up to this width are re-checked by full simulation.
  std::size_t verify_qubit_cap = 8;
  std::filesystem::path out_dir;
};

struct GateCounts {
  std::size_t total = 0;
  std::size_t two_qubit = 0;
  std::size_t t = 0;
  std::size_t single_qubit = 0;

  static GateCounts of(const Circuit& c) {
    return {c.size(), count_gates(c, is_two_qubit), count_gates(c, is_t_like),
            count_gates(c, [](const Gate& g) { return g.arity() == 1; })};
  }
  bool operator==(const GateCounts&) const = default;
};

inline void to_json(nlohmann::json& j, const GateCounts& c) {
  j = {{"total", c.total}, {"two_qubit", c.two_qubit}, {"t", c.t}, {"single_qubit", c.single_qubit}};
}
inline void from_json(const nlohmann::json& j, GateCounts& c) {
  c.total = j.at("total").get<std::size_t>();
  c.two_qubit = j.at("two_qubit").get<std::size_t>();
  c.t = j.at("t").get<std::size_t>();
  c.single_qubit = j.at("single_qubit").get<std::size_t>();
}

/// One (benchmark, seed) optimisation.
struct BenchmarkRecord {
  std::string benchmark;
  std::uint64_t seed = 0;
  std::string mode;
  std::string status = "ok";  // ok | failed | invalid
  std::string error;
  std::size_t num_qubits = 0;
  GateCounts input;
  GateCounts output;
  double cost_before = 0.0;
  double cost_after = 0.0;
  std::optional<double> gate_reduction;
  std::optional<double> two_qubit_reduction;
  double fidelity_before = 1.0;
  double fidelity_after = 1.0;
  double epsilon_f = 0.0;
  double error_spent = 0.0;
  /// Full-simulation distance input to output, when within the cap.
  std::optional<double> verified_distance;
  std::size_t iterations = 0;
  std::string output_qasm;
  std::string trace_file;
  double wall_time_s = 0.0;
};

/// Record as JSON; `with_timing` false drops wall-clock fields.
inline nlohmann::json record_json(const BenchmarkRecord& r, bool with_timing = true) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json j = {{"benchmark", r.benchmark},
                      {"seed", r.seed},
                      {"mode", r.mode},
                      {"status", r.status},
                      {"error", r.error},
                      {"num_qubits", r.num_qubits},
                      {"input", r.input},
                      {"output", r.output},
                      {"cost_before", r.cost_before},
                      {"cost_after", r.cost_after},
                      {"gate_reduction", opt(r.gate_reduction)},
                      {"two_qubit_reduction", opt(r.two_qubit_reduction)},
                      {"fidelity_before", r.fidelity_before},
                      {"fidelity_after", r.fidelity_after},
                      {"epsilon_f", r.epsilon_f},
                      {"error_spent", r.error_spent},
                      {"verified_distance", opt(r.verified_distance)},
                      {"iterations", r.iterations},
                      {"output_qasm", r.output_qasm},
                      {"trace_file", r.trace_file}};
  if (with_timing) j["wall_time_s"] = r.wall_time_s;
  return j;
}

inline BenchmarkRecord record_from_json(const nlohmann::json& j) {
  auto opt = [&](const char* k) -> std::optional<double> {
    if (!j.contains(k) || j.at(k).is_null()) return std::nullopt;
    return j.at(k).get<double>();
  };
  BenchmarkRecord r;
  r.benchmark = j.at("benchmark").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.mode = j.at("mode").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.error = j.value("error", "");
  r.num_qubits = j.value("num_qubits", std::size_t{0});
  r.input = j.at("input").get<GateCounts>();
  r.output = j.at("output").get<GateCounts>();
  r.cost_before = j.at("cost_before").get<double>();
  r.cost_after = j.at("cost_after").get<double>();
  r.gate_reduction = opt("gate_reduction");
  r.two_qubit_reduction = opt("two_qubit_reduction");
  r.fidelity_before = j.value("fidelity_before", 1.0);
  r.fidelity_after = j.value("fidelity_after", 1.0);
  r.epsilon_f = j.at("epsilon_f").get<double>();
  r.error_spent = j.at("error_spent").get<double>();
  r.verified_distance = opt("verified_distance");
  r.iterations = j.value("iterations", std::size_t{0});
  r.output_qasm = j.value("output_qasm", "");
  r.trace_file = j.value("trace_file", "");
  r.wall_time_s = j.value("wall_time_s", 0.0);
  return r;
}

struct RunReport {
  std::string mode;
  std::string gate_set;
  std::string objective;
  double epsilon_f = 0.0;
  std::vector<BenchmarkRecord> records;
};

inline nlohmann::json report_json(const RunReport& rep, bool with_timing = true) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : rep.records) records.push_back(record_json(r, with_timing));
  return {{"format", "guoq-report"},
          {"version", 1},
          {"mode", rep.mode},
          {"gate_set", rep.gate_set},
          {"objective", rep.objective},
          {"epsilon_f", rep.epsilon_f},
          {"records", std::move(records)}};
}

inline RunReport report_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "guoq-report") throw std::invalid_argument("not a guoq report");
  RunReport rep;
  rep.mode = j.value("mode", "");
  rep.gate_set = j.value("gate_set", "");
  rep.objective = j.value("objective", "");
  rep.epsilon_f = j.value("epsilon_f", 0.0);
  for (const auto& r : j.at("records")) rep.records.push_back(record_from_json(r));
  return rep;
}

inline RunReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report " + path.string());
  return report_from_json(nlohmann::json::parse(in));
}

inline const char* kReportCsvHeader =
    "benchmark,seed,mode,status,num_qubits,input_total,input_two_qubit,input_t,output_total,output_two_qubit,"
    "output_t,cost_before,cost_after,gate_reduction,two_qubit_reduction,fidelity_before,fidelity_after,"
    "epsilon_f,error_spent,verified_distance,iterations,wall_time_s";

inline std::string report_csv(const RunReport& rep) {
  std::ostringstream out;
  out.precision(17);
  auto opt = [&](const std::optional<double>& v) {
    if (v) out << *v;
  };
  out << kReportCsvHeader << "\n";
  for (const auto& r : rep.records) {
    out << r.benchmark << "," << r.seed << "," << r.mode << "," << r.status << "," << r.num_qubits << ","
        << r.input.total << "," << r.input.two_qubit << "," << r.input.t << "," << r.output.total << ","
        << r.output.two_qubit << "," << r.output.t << "," << r.cost_before << "," << r.cost_after << ",";
    opt(r.gate_reduction);
    out << ",";
    opt(r.two_qubit_reduction);
    out << "," << r.fidelity_before << "," << r.fidelity_after << "," << r.epsilon_f << "," << r.error_spent << ",";
    opt(r.verified_distance);
    out << "," << r.iterations << "," << r.wall_time_s << "\n";
  }
  return out.str();
}

inline std::string trace_csv(const std::vector<TraceRecord>& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,cost_current,cost_best,error_current\n";
  for (const auto& t : trace) {
    out << t.iteration << "," << t.cost_current << "," << t.cost_best << "," << t.error_current << "\n";
  }
  return out.str();
}

/// Transformations of a mode. Rewrite modes get every rule; resynthesis
/// modes an exact (epsilon 0) move plus, when epsilon_f > 0, an approximate
/// one.
inline std::vector<Transformation> make_transformations(const BenchConfig& cfg, bool rewrites, bool resynth,
                                                        std::shared_ptr<ResynthesisStats> stats = nullptr) {
  std::vector<Transformation> ts;
  if (rewrites) {
    std::vector<RewriteRule> rules;
    if (cfg.use_builtin_rules) rules = builtin_rules(cfg.gate_set);
    for (const auto& r : cfg.extra_rules) {
      if (!r.expressible_in(cfg.gate_set)) {
        throw std::invalid_argument("rule " + r.name() + " uses gates outside " + cfg.gate_set.name());
      }
      rules.push_back(r);
    }
    for (auto& r : rules) ts.push_back(as_transformation(std::move(r)));
  }
  if (resynth) {
    if (!stats) stats = std::make_shared<ResynthesisStats>();
    ResynthesisConfig rc;
    rc.gate_set = cfg.gate_set;
    rc.objective = cfg.objective;
    rc.max_subcircuit_qubits = cfg.search.max_subcircuit_qubits;
    rc.plugin_command = cfg.plugin_command;
    rc.budget = cfg.synthesis_budget;
    rc.effort = cfg.synthesis_effort;
    ts.push_back(make_resynthesis_transformation(rc, stats));
    const double approx = cfg.resynth_epsilon >= 0.0 ? cfg.resynth_epsilon : cfg.search.epsilon_f / 10.0;
    if (cfg.search.epsilon_f > 0.0 && approx > 0.0) {
      rc.epsilon = std::min(approx, cfg.search.epsilon_f);
      ts.push_back(make_resynthesis_transformation(rc, stats));
    }
  }
  if (ts.empty()) throw std::invalid_argument("mode leaves no transformations for gate set " + cfg.gate_set.name());
  return ts;
}

/// Runs the configured mode on one circuit and seed.
inline SearchResult optimize(const Circuit& input, const BenchConfig& cfg, std::uint64_t seed) {
  SearchConfig sc = cfg.search;
  sc.seed = seed;
  auto single = [&](bool rw, bool rs, const Circuit& c, const SearchConfig& s, double err) {
    return guoq(c, make_transformations(cfg, rw, rs), s, cfg.objective, err);
  };
  switch (cfg.mode) {
    case Mode::Guoq:
      return single(true, true, input, sc, 0.0);
    case Mode::RewriteOnly:
      return single(true, false, input, sc, 0.0);
    case Mode::ResynthOnly:
      return single(false, true, input, sc, 0.0);
    case Mode::SeqRewriteResynth:
    case Mode::SeqResynthRewrite:
      break;
  }
  // Sequential ablations switch phase at half the time (and iteration) budget;
  // the second phase inherits the first phase's spent error.
  const bool rewrite_first = cfg.mode == Mode::SeqRewriteResynth;
  SearchConfig first = sc, second = sc;
  first.time_limit = sc.time_limit / 2;
  second.time_limit = sc.time_limit - first.time_limit;
  if (sc.max_iterations != std::numeric_limits<std::size_t>::max()) {
    first.max_iterations = sc.max_iterations / 2;
    second.max_iterations = sc.max_iterations - first.max_iterations;
  }
  second.seed = Rng(seed).split(0x5e9).next();
  auto a = single(rewrite_first, !rewrite_first, input, first, 0.0);
  auto b = single(!rewrite_first, rewrite_first, a.best, second, a.budget.spent);
  SearchResult out = std::move(b);
  const std::size_t offset = a.stats.iterations;
  for (auto& t : out.trace) t.iteration += offset;
  for (auto& e : out.events) e.iteration += offset;
  auto trace = std::move(a.trace);
  trace.insert(trace.end(), out.trace.begin(), out.trace.end());
  out.trace = std::move(trace);
  auto events = std::move(a.events);
  const std::size_t first_events = events.size();
  events.insert(events.end(), out.events.begin(), out.events.end());
  out.best_event_count = out.best_event_count == 0 ? a.best_event_count : first_events + out.best_event_count;
  out.events = std::move(events);
  out.stats.iterations += offset;
  return out;
}

/// The QASM files of a corpus directory (sorted), or the single file given.
inline std::vector<std::filesystem::path> list_corpus(const std::filesystem::path& corpus) {
  namespace fs = std::filesystem;
  if (!fs::exists(corpus)) throw std::invalid_argument("corpus " + corpus.string() + " does not exist");
  if (fs::is_regular_file(corpus)) return {corpus};
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(corpus)) {
    if (e.is_regular_file() && e.path().extension() == ".qasm") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

inline BenchmarkRecord run_one(const std::filesystem::path& file, const BenchConfig& cfg, std::uint64_t seed) {
  BenchmarkRecord r;
  r.benchmark = file.stem().string();
  r.seed = seed;
  r.mode = to_string(cfg.mode);
  r.epsilon_f = cfg.search.epsilon_f;
  Circuit input;
  try {
    input = load_qasm(file, cfg.gate_set);
  } catch (const std::exception& e) {
    r.status = "failed";
    r.error = e.what();
    return r;
  }
  r.num_qubits = input.num_qubits();
  r.input = GateCounts::of(input);
  r.cost_before = cfg.objective(input);
  r.fidelity_before = fidelity_score(input, cfg.objective.noise());
  const auto t0 = Clock::now();
  SearchResult res;
  try {
    res = optimize(input, cfg, seed);
  } catch (const std::exception& e) {
    r.status = "failed";
    r.error = e.what();
    return r;
  }
  r.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  const Circuit& out = res.best;
  r.output = GateCounts::of(out);
  r.cost_after = cfg.objective(out);
  r.fidelity_after = fidelity_score(out, cfg.objective.noise());
  if (r.input.total > 0) r.gate_reduction = gate_reduction(r.input.total, r.output.total);
  if (r.input.two_qubit > 0) r.two_qubit_reduction = gate_reduction(r.input.two_qubit, r.output.two_qubit);
  r.error_spent = res.budget.spent;
  r.iterations = res.stats.iterations;
  // Re-validate everything that leaves the optimiser.
  try {
    r.output_qasm = emit_qasm(out, cfg.gate_set);
    if (!(parse_qasm(r.output_qasm, cfg.gate_set) == out)) throw std::runtime_error("output does not round-trip");
    if (out.num_qubits() <= cfg.verify_qubit_cap) {
      r.verified_distance = circuit_distance(input, out);
      if (*r.verified_distance > cfg.search.epsilon_f + kDistanceSlack) {
        throw std::runtime_error("output is at distance " + std::to_string(*r.verified_distance) +
                                 " from the input, above epsilon_f");
      }
    }
    if (r.error_spent > cfg.search.epsilon_f) throw std::runtime_error("error budget exceeded");
  } catch (const std::exception& e) {
    r.status = "invalid";
    r.error = e.what();
  }
  if (!cfg.out_dir.empty()) {
    namespace fs = std::filesystem;
    const fs::path dir = cfg.out_dir / "traces";
    fs::create_directories(dir);
    const std::string name = r.benchmark + "_" + r.mode + "_" + std::to_string(seed) + ".csv";
    std::ofstream(dir / name) << trace_csv(res.trace);
    r.trace_file = (fs::path("traces") / name).string();
  }
  return r;
}

inline void write_report(const RunReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "report.json") << report_json(rep).dump(2) << "\n";
  std::ofstream(dir / "report.csv") << report_csv(rep);
}

/// Optimises every corpus file under every seed. Unparseable files become
/// failed records. Writes report.json, report.csv and traces/ when
/// cfg.out_dir is set.
inline RunReport run(const std::filesystem::path& corpus, const BenchConfig& cfg) {
  RunReport rep;
  rep.mode = to_string(cfg.mode);
  rep.gate_set = cfg.gate_set.name();
  rep.objective = cfg.objective.name();
  rep.epsilon_f = cfg.search.epsilon_f;
  for (const auto& file : list_corpus(corpus)) {
    for (auto seed : cfg.seeds) rep.records.push_back(run_one(file, cfg, seed));
  }
  if (!cfg.out_dir.empty()) write_report(rep, cfg.out_dir);
  return rep;
}

/// Per-benchmark metric of a record; lower is better except for fidelity.
inline double record_metric(const BenchmarkRecord& r, std::string_view metric) {
  if (metric == "two_qubit") return static_cast<double>(r.output.two_qubit);
  if (metric == "total") return static_cast<double>(r.output.total);
  if (metric == "t") return static_cast<double>(r.output.t);
  if (metric == "cost") return r.cost_after;
  if (metric == "fidelity") return r.fidelity_after;
  throw std::invalid_argument("unknown metric '" + std::string(metric) + "'");
}

inline bool metric_higher_is_better(std::string_view metric) { return metric == "fidelity"; }

/// Mean of the metric over a report's ok records, per benchmark.
inline std::map<std::string, double> benchmark_means(const RunReport& rep, std::string_view metric) {
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& r : rep.records) {
    if (r.status != "ok") continue;
    auto& [sum, n] = acc[r.benchmark];
    sum += record_metric(r, metric);
    ++n;
  }
  std::map<std::string, double> out;
  for (const auto& [k, v] : acc) out[k] = v.first / static_cast<double>(v.second);
  return out;
}

struct PairSummary {
  std::size_t a = 0, b = 0;  // report indices
  std::size_t outperform = 0, match = 0, underperform = 0;
};

struct Comparison {
  std::string metric;
  std::vector<std::string> labels;
  std::vector<std::string> benchmarks;  // shared by all reports
  std::vector<std::string> excluded;    // missing from some report
  /// series[i][k]: mean metric of report i on benchmarks[k].
  std::vector<std::vector<double>> series;
  std::vector<PairSummary> pairs;
};

/// Outperform / match / underperform counts between every ordered pair of
/// reports, on seed means. "Match" is exact equality of means.
inline Comparison compare(const std::vector<RunReport>& reports, const std::vector<std::string>& labels,
                          std::string_view metric = "two_qubit") {
  if (labels.size() != reports.size()) throw std::invalid_argument("one label per report is needed");
  Comparison c;
  c.metric = std::string(metric);
  c.labels = labels;
  std::vector<std::map<std::string, double>> means;
  std::set<std::string> all;
  for (const auto& rep : reports) {
    means.push_back(benchmark_means(rep, metric));
    for (const auto& [k, v] : means.back()) all.insert(k);
  }
  for (const auto& b : all) {
    const bool everywhere = std::all_of(means.begin(), means.end(), [&](const auto& m) { return m.count(b) > 0; });
    (everywhere ? c.benchmarks : c.excluded).push_back(b);
  }
  for (const auto& m : means) {
    std::vector<double> s;
    for (const auto& b : c.benchmarks) s.push_back(m.at(b));
    c.series.push_back(std::move(s));
  }
  const bool higher = metric_higher_is_better(metric);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (std::size_t j = 0; j < reports.size(); ++j) {
      if (i == j) continue;
      PairSummary p{i, j};
      for (std::size_t k = 0; k < c.benchmarks.size(); ++k) {
        const double x = c.series[i][k], y = c.series[j][k];
        if (x == y) {
          ++p.match;
        } else if (higher ? x > y : x < y) {
          ++p.outperform;
        } else {
          ++p.underperform;
        }
      }
      c.pairs.push_back(p);
    }
  }
  return c;
}

inline nlohmann::json comparison_json(const Comparison& c) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : c.pairs) {
    pairs.push_back({{"a", c.labels[p.a]},
                     {"b", c.labels[p.b]},
                     {"outperform", p.outperform},
                     {"match", p.match},
                     {"underperform", p.underperform}});
  }
  nlohmann::json series = nlohmann::json::object();
  for (std::size_t i = 0; i < c.labels.size(); ++i) series[c.labels[i]] = c.series[i];
  return {{"metric", c.metric},
          {"benchmarks", c.benchmarks},
          {"excluded", c.excluded},
          {"series", std::move(series)},
          {"pairs", std::move(pairs)}};
}

inline std::string comparison_csv(const Comparison& c) {
  std::ostringstream out;
  out.precision(17);
  out << "benchmark";
  for (const auto& l : c.labels) out << "," << l;
  out << "\n";
  for (std::size_t k = 0; k < c.benchmarks.size(); ++k) {
    out << c.benchmarks[k];
    for (const auto& s : c.series) out << "," << s[k];
    out << "\n";
  }
  return out.str();
}

}  // namespace guoq
