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

#include <array>
#include <string>
#include <vector>

#include "guoq/rewrite.hpp"

namespace guoq {

namespace detail {

struct RuleSpec {
  const char* name;
  const char* lhs;
  const char* rhs;
};

// clang-format off
inline constexpr RuleSpec kBuiltinRules[] = {
    // Two-qubit structure.
    {"cx-cancel",                "cx 0 1; cx 0 1",                       ""},
    {"cx-commute",               "cx 1 0; cx 2 0",                       "cx 2 0; cx 1 0"},
    {"cx-commute-control",       "cx 0 1; cx 0 2",                       "cx 0 2; cx 0 1"},
    {"cx-flip",                  "h 0; h 1; cx 0 1; h 0; h 1",           "cx 1 0"},
    {"cx-x-control",             "cx 0 1; x 0; cx 0 1",                  "x 0; x 1"},

    // Rotation merges and identities.
    {"rz-merge",                 "rz(a) 0; rz(b) 0",                     "rz(a+b) 0"},
    {"rx-merge",                 "rx(a) 0; rx(b) 0",                     "rx(a+b) 0"},
    {"ry-merge",                 "ry(a) 0; ry(b) 0",                     "ry(a+b) 0"},
    {"u1-merge",                 "u1(a) 0; u1(b) 0",                     "u1(a+b) 0"},
    {"rxx-merge",                "rxx(a) 0 1; rxx(b) 0 1",               "rxx(a+b) 0 1"},
    {"rxx-merge-flipped",        "rxx(a) 0 1; rxx(b) 1 0",               "rxx(a+b) 0 1"},
    {"rz-zero",                  "rz(0) 0",                              ""},
    {"rx-zero",                  "rx(0) 0",                              ""},
    {"ry-zero",                  "ry(0) 0",                              ""},
    {"u1-zero",                  "u1(0) 0",                              ""},
    {"rxx-zero",                 "rxx(0) 0 1",                           ""},

    // Diagonal gates through a CX control.
    {"rz-commute-cx-control",    "rz(a) 0; cx 0 1",                      "cx 0 1; rz(a) 0"},
    {"rz-commute-cx-control-rev","cx 0 1; rz(a) 0",                      "rz(a) 0; cx 0 1"},
    {"u1-commute-cx-control",    "u1(a) 0; cx 0 1",                      "cx 0 1; u1(a) 0"},
    {"u1-commute-cx-control-rev","cx 0 1; u1(a) 0",                      "u1(a) 0; cx 0 1"},
    {"t-commute-cx-control",     "t 0; cx 0 1",                          "cx 0 1; t 0"},
    {"t-commute-cx-control-rev", "cx 0 1; t 0",                          "t 0; cx 0 1"},
    {"tdg-commute-cx-control",   "tdg 0; cx 0 1",                        "cx 0 1; tdg 0"},
    {"tdg-commute-cx-control-rev","cx 0 1; tdg 0",                       "tdg 0; cx 0 1"},
    {"s-commute-cx-control",     "s 0; cx 0 1",                          "cx 0 1; s 0"},
    {"s-commute-cx-control-rev", "cx 0 1; s 0",                          "s 0; cx 0 1"},
    {"sdg-commute-cx-control",   "sdg 0; cx 0 1",                        "cx 0 1; sdg 0"},
    {"sdg-commute-cx-control-rev","cx 0 1; sdg 0",                       "sdg 0; cx 0 1"},

    // X-axis gates through a CX target.
    {"x-commute-cx-target",      "x 1; cx 0 1",                          "cx 0 1; x 1"},
    {"x-commute-cx-target-rev",  "cx 0 1; x 1",                          "x 1; cx 0 1"},
    {"sx-commute-cx-target",     "sx 1; cx 0 1",                         "cx 0 1; sx 1"},
    {"sx-commute-cx-target-rev", "cx 0 1; sx 1",                         "sx 1; cx 0 1"},
    {"rx-commute-cx-target",     "rx(a) 1; cx 0 1",                      "cx 0 1; rx(a) 1"},
    {"rx-commute-cx-target-rev", "cx 0 1; rx(a) 1",                      "rx(a) 1; cx 0 1"},

    // Rxx neighbourhood.
    {"rx-commute-rxx",           "rx(a) 0; rxx(b) 0 1",                  "rxx(b) 0 1; rx(a) 0"},
    {"rx-commute-rxx-rev",       "rxx(b) 0 1; rx(a) 0",                  "rx(a) 0; rxx(b) 0 1"},
    {"rx-commute-rxx-second",    "rx(a) 1; rxx(b) 0 1",                  "rxx(b) 0 1; rx(a) 1"},
    {"rx-commute-rxx-second-rev","rxx(b) 0 1; rx(a) 1",                  "rx(a) 1; rxx(b) 0 1"},
    {"rxx-commute-shared",       "rxx(a) 0 1; rxx(b) 0 2",               "rxx(b) 0 2; rxx(a) 0 1"},

    // Single-qubit cancellations and reductions.
    {"h-cancel",                 "h 0; h 0",                             ""},
    {"x-cancel",                 "x 0; x 0",                             ""},
    {"s-sdg-cancel",             "s 0; sdg 0",                           ""},
    {"sdg-s-cancel",             "sdg 0; s 0",                           ""},
    {"t-tdg-cancel",             "t 0; tdg 0",                           ""},
    {"tdg-t-cancel",             "tdg 0; t 0",                           ""},
    {"sx-sx",                    "sx 0; sx 0",                           "x 0"},
    {"t-t",                      "t 0; t 0",                             "s 0"},
    {"tdg-tdg",                  "tdg 0; tdg 0",                         "sdg 0"},
    {"s-s-s",                    "s 0; s 0; s 0",                        "sdg 0"},
    {"sdg-sdg-sdg",              "sdg 0; sdg 0; sdg 0",                  "s 0"},
    {"t-sdg",                    "t 0; sdg 0",                           "tdg 0"},
    {"sdg-t",                    "sdg 0; t 0",                           "tdg 0"},
    {"tdg-s",                    "tdg 0; s 0",                           "t 0"},
    {"s-tdg",                    "s 0; tdg 0",                           "t 0"},
    {"h-x-h",                    "h 0; x 0; h 0",                        "rz(pi) 0"},
    {"h-rz-pi-h",                "h 0; rz(pi) 0; h 0",                   "x 0"},
    {"x-rz-x",                   "x 0; rz(a) 0; x 0",                    "rz(-a) 0"},
    {"x-u1-x",                   "x 0; u1(a) 0; x 0",                    "u1(-a) 0"},

    // Commuting diagonal Clifford+T pairs.
    {"t-s-swap",                 "t 0; s 0",                             "s 0; t 0"},
    {"s-t-swap",                 "s 0; t 0",                             "t 0; s 0"},
    {"tdg-sdg-swap",             "tdg 0; sdg 0",                         "sdg 0; tdg 0"},
    {"sdg-tdg-swap",             "sdg 0; tdg 0",                         "tdg 0; sdg 0"},
};
// clang-format on

}  // namespace detail

/// Every built-in rule, regardless of gate set.
inline std::vector<RewriteRule> all_builtin_rules() {
  std::vector<RewriteRule> out;
  for (const auto& r : detail::kBuiltinRules) out.emplace_back(r.name, r.lhs, r.rhs);
  return out;
}

/// The built-in rules whose gates all belong to `set`.
inline std::vector<RewriteRule> builtin_rules(const GateSetDef& set) {
  std::vector<RewriteRule> out;
  for (auto& r : all_builtin_rules()) {
    if (r.expressible_in(set)) out.push_back(std::move(r));
  }
  return out;
}

/// Looks up built-in rules by name.
inline std::vector<RewriteRule> builtin_rules_named(const std::vector<std::string>& names) {
  std::vector<RewriteRule> out;
  auto all = all_builtin_rules();
  for (const auto& n : names) {
    auto it = std::find_if(all.begin(), all.end(), [&](const RewriteRule& r) { return r.name() == n; });
    if (it == all.end()) throw RuleError("no built-in rule named '" + n + "'");
    out.push_back(*it);
  }
  return out;
}

}  // namespace guoq
