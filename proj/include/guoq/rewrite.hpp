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

// Rewrite rules with symbolic angles.
//
// Patterns are written in a small statement language, one gate per `;`:
//
//     rz(a) 0; cx 0 1        ->  cx 0 1; rz(a) 0
//     rz(a) 0; rz(b) 0       ->  rz(a+b) 0
//
// Integers are pattern qubits, identifiers other than `pi` are angle
// variables, and every angle term is a signed sum of variables and
// constants in the QASM angle grammar.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "guoq/dag.hpp"
#include "guoq/qasm.hpp"
#include "guoq/transformation.hpp"
#include "guoq/unitary.hpp"
#include "json.hpp"

namespace guoq {

class RuleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Signed sum of angle variables plus a constant.
struct AngleTerm {
  std::vector<std::pair<std::size_t, int>> vars;  // (variable, +1 | -1)
  Angle constant;

  bool is_constant() const { return vars.empty(); }
  /// A lone variable with coefficient +1 or -1, possibly offset.
  bool is_solvable() const { return vars.size() == 1; }

  Angle evaluate(std::span<const Angle> binding) const {
    Angle v = constant;
    for (auto [var, sign] : vars) v = sign > 0 ? v + binding[var] : v - binding[var];
    return v;
  }
};

struct GateTemplate {
  GateKind kind;
  std::vector<std::size_t> qubits;
  std::vector<AngleTerm> params;
};

/// A gate list over pattern qubits 0..k-1.
struct RulePattern {
  std::vector<GateTemplate> gates;

  std::size_t size() const { return gates.size(); }
  bool empty() const { return gates.empty(); }

  std::size_t num_qubits() const {
    std::size_t k = 0;
    for (const auto& g : gates) {
      for (auto q : g.qubits) k = std::max(k, q + 1);
    }
    return k;
  }

  Circuit instantiate(std::span<const Angle> binding, std::span<const Qubit> qubit_map,
                      std::size_t width) const {
    Circuit c(width);
    for (const auto& t : gates) {
      std::vector<Qubit> qs;
      for (auto q : t.qubits) qs.push_back(qubit_map[q]);
      std::vector<Angle> ps;
      for (const auto& p : t.params) ps.push_back(p.evaluate(binding));
      c.append(Gate(t.kind, qs, ps));
    }
    return c;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

inline std::size_t variable_index(std::vector<std::string>& names, std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  names.emplace_back(name);
  return names.size() - 1;
}

inline AngleTerm parse_term(std::string_view text, std::vector<std::string>& names) {
  text = trim(text);
  if (text.empty()) throw RuleError("empty angle term");
  AngleTerm term;
  std::size_t pos = 0;
  while (pos < text.size()) {
    int sign = 1;
    if (text[pos] == '+' || text[pos] == '-') {
      sign = text[pos] == '-' ? -1 : 1;
      ++pos;
    }
    std::size_t end = pos;
    // Split at the next top-level sign, skipping exponent signs like 1e-5.
    while (end < text.size()) {
      const char c = text[end];
      if ((c == '+' || c == '-') && end > pos &&
          !((text[end - 1] == 'e' || text[end - 1] == 'E') && end >= 2 &&
            std::isdigit(static_cast<unsigned char>(text[end - 2])))) {
        break;
      }
      ++end;
    }
    const auto atom = trim(text.substr(pos, end - pos));
    if (atom.empty()) throw RuleError("malformed angle term '" + std::string(text) + "'");
    if (is_identifier(atom) && atom != "pi") {
      term.vars.emplace_back(variable_index(names, atom), sign);
    } else {
      Angle a;
      try {
        a = parse_angle(atom);
      } catch (const ParseError& e) {
        throw RuleError("bad angle constant '" + std::string(atom) + "': " + e.what());
      }
      term.constant = sign > 0 ? term.constant + a : term.constant - a;
    }
    pos = end;
  }
  for (std::size_t i = 0; i < term.vars.size(); ++i) {
    for (std::size_t j = i + 1; j < term.vars.size(); ++j) {
      if (term.vars[i].first == term.vars[j].first) {
        throw RuleError("variable repeated in angle term '" + std::string(text) + "'");
      }
    }
  }
  return term;
}

inline GateTemplate make_template(std::string_view name, std::vector<std::size_t> qubits,
                                  std::vector<AngleTerm> params) {
  const auto kind = gate_kind_from_qasm(name);
  if (!kind) throw RuleError("unknown gate '" + std::string(name) + "' in rule");
  const auto& info = gate_info(*kind);
  if (static_cast<int>(qubits.size()) != info.arity) {
    throw RuleError(std::string(name) + " takes " + std::to_string(info.arity) + " qubit(s)");
  }
  if (static_cast<int>(params.size()) != info.num_params) {
    throw RuleError(std::string(name) + " takes " + std::to_string(info.num_params) +
                    " parameter(s)");
  }
  if (qubits.size() == 2 && qubits[0] == qubits[1]) {
    throw RuleError(std::string(name) + " operands must be distinct");
  }
  return {*kind, std::move(qubits), std::move(params)};
}

inline RulePattern parse_pattern(std::string_view text, std::vector<std::string>& names) {
  RulePattern pattern;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto stmt = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (stmt.empty()) continue;
    std::size_t i = 0;
    while (i < stmt.size() && (std::isalnum(static_cast<unsigned char>(stmt[i])) || stmt[i] == '_')) ++i;
    const auto name = stmt.substr(0, i);
    std::vector<AngleTerm> params;
    auto rest = trim(stmt.substr(i));
    if (!rest.empty() && rest.front() == '(') {
      const auto close = rest.find(')');
      if (close == std::string_view::npos) throw RuleError("unbalanced '(' in '" + std::string(stmt) + "'");
      auto inner = rest.substr(1, close - 1);
      std::size_t p = 0;
      while (p <= inner.size()) {
        std::size_t comma = inner.find(',', p);
        if (comma == std::string_view::npos) comma = inner.size();
        params.push_back(parse_term(inner.substr(p, comma - p), names));
        p = comma + 1;
      }
      rest = trim(rest.substr(close + 1));
    }
    std::vector<std::size_t> qubits;
    std::istringstream in{std::string(rest)};
    std::string tok;
    while (in >> tok) {
      if (tok.find_first_not_of("0123456789") != std::string::npos) {
        throw RuleError("bad qubit '" + tok + "' in '" + std::string(stmt) + "'");
      }
      qubits.push_back(std::stoul(tok));
    }
    pattern.gates.push_back(make_template(name, std::move(qubits), std::move(params)));
  }
  return pattern;
}

}  // namespace detail

/// A verified-equivalent pattern/replacement pair.
class RewriteRule {
 public:
  /// Builds a rule from two patterns in the statement language.
  RewriteRule(std::string name, std::string_view lhs, std::string_view rhs) : name_(std::move(name)) {
    lhs_ = detail::parse_pattern(lhs, var_names_);
    const std::size_t lhs_vars = var_names_.size();
    rhs_ = detail::parse_pattern(rhs, var_names_);
    if (var_names_.size() != lhs_vars) {
      throw RuleError("rule " + name_ + ": replacement uses variable '" + var_names_.back() +
                      "' absent from the pattern");
    }
    check();
  }

  RewriteRule(std::string name, RulePattern lhs, RulePattern rhs, std::vector<std::string> var_names)
      : name_(std::move(name)), lhs_(std::move(lhs)), rhs_(std::move(rhs)), var_names_(std::move(var_names)) {
    check();
  }

  const std::string& name() const { return name_; }
  const RulePattern& lhs() const { return lhs_; }
  const RulePattern& rhs() const { return rhs_; }
  std::size_t num_qubits() const { return lhs_.num_qubits(); }
  std::size_t num_vars() const { return var_names_.size(); }
  const std::vector<std::string>& var_names() const { return var_names_; }

  /// Wire edges of the pattern: (from gate, from slot, to gate, to slot).
  struct PatternEdge {
    std::size_t from, from_slot, to, to_slot;
  };
  const std::vector<PatternEdge>& pattern_edges() const { return edges_; }

  bool expressible_in(const GateSetDef& set) const {
    auto ok = [&](const RulePattern& p) {
      return std::all_of(p.gates.begin(), p.gates.end(), [&](const auto& t) { return set.contains(t.kind); });
    };
    return ok(lhs_) && ok(rhs_);
  }

 private:
  void check() {
    if (lhs_.empty()) throw RuleError("rule " + name_ + ": empty pattern");
    if (rhs_.size() > lhs_.size()) throw RuleError("rule " + name_ + ": replacement is larger than pattern");
    const std::size_t k = lhs_.num_qubits();
    if (rhs_.num_qubits() > k) throw RuleError("rule " + name_ + ": replacement uses extra qubits");
    std::vector<char> touched(k, 0);
    std::vector<char> bound(var_names_.size(), 0);
    std::vector<std::ptrdiff_t> last(k, -1);
    for (std::size_t i = 0; i < lhs_.size(); ++i) {
      const auto& t = lhs_.gates[i];
      for (std::size_t s = 0; s < t.qubits.size(); ++s) {
        const auto q = t.qubits[s];
        touched[q] = 1;
        if (last[q] >= 0) {
          const auto& prev = lhs_.gates[static_cast<std::size_t>(last[q])];
          const auto ps = static_cast<std::size_t>(
              std::find(prev.qubits.begin(), prev.qubits.end(), q) - prev.qubits.begin());
          edges_.push_back({static_cast<std::size_t>(last[q]), ps, i, s});
        }
        last[q] = static_cast<std::ptrdiff_t>(i);
      }
      for (const auto& p : t.params) {
        if (p.is_solvable()) bound[p.vars[0].first] = 1;
      }
    }
    if (std::find(touched.begin(), touched.end(), 0) != touched.end()) {
      throw RuleError("rule " + name_ + ": pattern qubits must be numbered densely from 0");
    }
    if (std::find(bound.begin(), bound.end(), 0) != bound.end()) {
      throw RuleError("rule " + name_ + ": every variable needs a single-variable pattern term");
    }
    // Connectivity along wires, so an anchored walk reaches every gate.
    std::vector<char> seen(lhs_.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const auto g = stack.back();
      stack.pop_back();
      for (const auto& e : edges_) {
        for (auto [a, b] : {std::pair{e.from, e.to}, std::pair{e.to, e.from}}) {
          if (a == g && !seen[b]) {
            seen[b] = 1;
            stack.push_back(b);
          }
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
      throw RuleError("rule " + name_ + ": pattern is not connected");
    }
  }

  std::string name_;
  RulePattern lhs_;
  RulePattern rhs_;
  std::vector<std::string> var_names_;
  std::vector<PatternEdge> edges_;
};

/// An occurrence of a rule's pattern in a DAG.
struct Match {
  std::vector<NodeId> nodes;    // pattern gate -> node
  std::vector<Qubit> qubits;    // pattern qubit -> circuit qubit
  std::vector<Angle> angles;    // variable -> value
};

namespace detail {

inline constexpr double kAngleMatchTolerance = 1e-12;

inline bool unify_angles(const RewriteRule& rule, const CircuitDag& dag, Match& m) {
  std::vector<char> bound(rule.num_vars(), 0);
  m.angles.assign(rule.num_vars(), Angle{});
  const auto& gates = rule.lhs().gates;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < gates.size(); ++i) {
      const Gate& g = dag.gate(m.nodes[i]);
      for (std::size_t p = 0; p < gates[i].params.size(); ++p) {
        const auto& term = gates[i].params[p];
        const Angle& actual = g.param(p);
        if (pass == 0 && term.is_solvable()) {
          auto [var, sign] = term.vars[0];
          const Angle value = sign > 0 ? actual - term.constant : term.constant - actual;
          if (!bound[var]) {
            m.angles[var] = value;
            bound[var] = 1;
          } else if (!m.angles[var].equivalent(value, kAngleMatchTolerance)) {
            return false;
          }
        } else if (pass == 1 && !term.is_solvable()) {
          if (!term.evaluate(m.angles).equivalent(actual, kAngleMatchTolerance)) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace detail

/// Matches `rule`'s pattern with its first gate at `anchor`. Pattern wire
/// edges must map onto DAG wire edges; nothing commutes implicitly.
inline std::optional<Match> find_match(const RewriteRule& rule, const CircuitDag& dag, NodeId anchor) {
  const auto& pattern = rule.lhs().gates;
  if (anchor >= dag.size() || dag.gate(anchor).kind() != pattern[0].kind) return std::nullopt;
  constexpr Qubit kFree = std::numeric_limits<Qubit>::max();
  Match m;
  m.nodes.assign(pattern.size(), kNoNode);
  m.qubits.assign(rule.num_qubits(), kFree);

  auto bind = [&](std::size_t p, NodeId n) {
    const Gate& g = dag.gate(n);
    if (g.kind() != pattern[p].kind) return false;
    if (m.nodes[p] != kNoNode) return m.nodes[p] == n;
    if (std::find(m.nodes.begin(), m.nodes.end(), n) != m.nodes.end()) return false;
    for (std::size_t s = 0; s < g.arity(); ++s) {
      const auto var = pattern[p].qubits[s];
      if (m.qubits[var] == kFree) {
        if (std::find(m.qubits.begin(), m.qubits.end(), g.qubit(s)) != m.qubits.end()) return false;
        m.qubits[var] = g.qubit(s);
      } else if (m.qubits[var] != g.qubit(s)) {
        return false;
      }
    }
    m.nodes[p] = n;
    return true;
  };

  if (!bind(0, anchor)) return std::nullopt;
  // Edges are checked repeatedly until every gate is bound; the pattern is
  // connected so this converges in at most |pattern| sweeps.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : rule.pattern_edges()) {
      const NodeId a = m.nodes[e.from], b = m.nodes[e.to];
      if (a != kNoNode && b == kNoNode) {
        const NodeId n = dag.next(a, e.from_slot);
        if (n == kNoNode || dag.slot_of(n, dag.gate(a).qubit(e.from_slot)) != e.to_slot) return std::nullopt;
        if (!bind(e.to, n)) return std::nullopt;
        changed = true;
      } else if (a == kNoNode && b != kNoNode) {
        const NodeId n = dag.prev(b, e.to_slot);
        if (n == kNoNode || dag.slot_of(n, dag.gate(b).qubit(e.to_slot)) != e.from_slot) return std::nullopt;
        if (!bind(e.from, n)) return std::nullopt;
        changed = true;
      }
    }
  }
  for (const auto& e : rule.pattern_edges()) {
    if (dag.next(m.nodes[e.from], e.from_slot) != m.nodes[e.to]) return std::nullopt;
  }
  if (!detail::unify_angles(rule, dag, m)) return std::nullopt;
  if (!is_convex(dag, m.nodes)) return std::nullopt;
  return m;
}

struct PassResult {
  Circuit circuit;
  std::size_t applied = 0;
};

/// One pass over the gates in order start, start+1, ... (wrapping), replacing
/// every match that does not overlap an earlier replacement.
inline PassResult apply_rule_pass(const Circuit& circuit, const RewriteRule& rule, std::size_t start = 0) {
  PassResult out{circuit, 0};
  const std::size_t n = circuit.size();
  if (n == 0) return out;
  if (start >= n) throw std::out_of_range("pass start node out of range");
  // origin[i]: original index of the i-th current gate, -1 for inserted gates.
  std::vector<std::int64_t> origin(n);
  std::vector<std::int64_t> where(n);
  for (std::size_t i = 0; i < n; ++i) origin[i] = where[i] = static_cast<std::int64_t>(i);
  std::optional<CircuitDag> dag;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t o = (start + step) % n;
    if (where[o] < 0) continue;
    if (!dag) dag.emplace(out.circuit);
    const auto match = find_match(rule, *dag, static_cast<NodeId>(where[o]));
    if (!match) continue;
    if (std::any_of(match->nodes.begin(), match->nodes.end(), [&](NodeId id) { return origin[id] < 0; })) {
      continue;
    }
    std::vector<char> removed(out.circuit.size(), 0);
    for (NodeId id : match->nodes) removed[id] = 1;
    const Circuit repl = rule.rhs().instantiate(match->angles, match->qubits, out.circuit.num_qubits());
    auto spliced = splice(out.circuit, removed, repl.gates());
    std::vector<std::int64_t> next_origin(spliced.circuit.size(), -1);
    for (std::size_t i = 0; i < origin.size(); ++i) {
      const auto ni = spliced.new_index[i];
      if (origin[i] >= 0) where[static_cast<std::size_t>(origin[i])] = ni;
      if (ni >= 0) next_origin[static_cast<std::size_t>(ni)] = origin[i];
    }
    origin = std::move(next_origin);
    out.circuit = std::move(spliced.circuit);
    ++out.applied;
    dag.reset();
  }
  return out;
}

/// The rule as an epsilon = 0 transformation: one pass from a uniformly
/// random start node.
inline Transformation as_transformation(RewriteRule rule) {
  Transformation t;
  t.name = rule.name();
  t.epsilon = 0.0;
  t.kind = TransformationKind::Rewrite;
  t.action = [rule = std::move(rule)](const Circuit& c, TransformContext& ctx) -> std::optional<Circuit> {
    if (c.empty()) return std::nullopt;
    auto r = apply_rule_pass(c, rule, ctx.rng.below(c.size()));
    if (r.applied == 0) return std::nullopt;
    return std::move(r.circuit);
  };
  return t;
}

/// Largest lhs/rhs distance over `samples` random angle instantiations.
inline double verify_rule(const RewriteRule& rule, Rng& rng, std::size_t samples = 100) {
  const std::size_t k = rule.num_qubits();
  std::vector<Qubit> identity(k);
  for (std::size_t i = 0; i < k; ++i) identity[i] = static_cast<Qubit>(i);
  double worst = 0.0;
  const std::size_t rounds = rule.num_vars() == 0 ? 1 : samples;
  for (std::size_t s = 0; s < rounds; ++s) {
    std::vector<Angle> binding;
    for (std::size_t v = 0; v < rule.num_vars(); ++v) binding.push_back(Angle::radians(rng.uniform(-kTwoPi, kTwoPi)));
    const auto a = rule.lhs().instantiate(binding, identity, k);
    const auto b = rule.rhs().instantiate(binding, identity, k);
    worst = std::max(worst, circuit_distance(a, b));
  }
  return worst;
}

inline constexpr double kRuleTolerance = 1e-9;

inline bool rule_is_sound(const RewriteRule& rule, Rng& rng, std::size_t samples = 100) {
  return verify_rule(rule, rng, samples) <= kRuleTolerance;
}

namespace detail {

inline RulePattern pattern_from_json(const nlohmann::json& j, std::vector<std::string>& names) {
  if (j.is_string()) return parse_pattern(j.get<std::string>(), names);
  if (!j.is_array()) throw RuleError("pattern must be a string or an array of gates");
  RulePattern p;
  for (const auto& g : j) {
    if (!g.is_object() || !g.contains("gate") || !g.contains("qubits")) {
      throw RuleError("gate entries need 'gate' and 'qubits'");
    }
    std::vector<AngleTerm> params;
    if (g.contains("params")) {
      for (const auto& t : g.at("params")) {
        if (t.is_number()) {
          params.push_back(AngleTerm{{}, Angle::radians(t.get<double>())});
        } else {
          params.push_back(parse_term(t.get<std::string>(), names));
        }
      }
    }
    p.gates.push_back(make_template(g.at("gate").get<std::string>(),
                                    g.at("qubits").get<std::vector<std::size_t>>(), std::move(params)));
  }
  return p;
}

}  // namespace detail

/// Rules from a JSON array of {"name", "lhs", "rhs"}; patterns are either
/// statement strings or arrays of {"gate", "qubits", "params"}.
inline std::vector<RewriteRule> parse_rules(const nlohmann::json& j) {
  if (!j.is_array()) throw RuleError("rule file must hold a JSON array");
  std::vector<RewriteRule> rules;
  for (const auto& r : j) {
    try {
      const auto name = r.at("name").get<std::string>();
      std::vector<std::string> names;
      auto lhs = detail::pattern_from_json(r.at("lhs"), names);
      const auto lhs_vars = names.size();
      auto rhs = detail::pattern_from_json(r.at("rhs"), names);
      if (names.size() != lhs_vars) throw RuleError("rule " + name + ": replacement introduces a variable");
      rules.emplace_back(name, std::move(lhs), std::move(rhs), std::move(names));
    } catch (const nlohmann::json::exception& e) {
      throw RuleError(std::string("malformed rule: ") + e.what());
    }
  }
  return rules;
}

inline std::vector<RewriteRule> load_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RuleError("cannot open rule file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw RuleError("malformed rule file " + path.string() + ": " + e.what());
  }
  return parse_rules(j);
}

}  // namespace guoq
