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

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "guoq/angle.hpp"

namespace guoq {

using Qubit = std::uint32_t;

enum class GateKind : std::uint8_t {
  U1, U2, U3, CX, Rz, SX, X, Rx, Ry, Rxx, H, T, Tdg, S, Sdg,
};

inline constexpr std::size_t kNumGateKinds = 15;

struct GateInfo {
  GateKind kind;
  std::string_view qasm_name;
  std::string_view display_name;
  int arity;
  int num_params;
  bool clifford;
};

inline constexpr std::array<GateInfo, kNumGateKinds> kGateInfo{{
    {GateKind::U1, "u1", "U1", 1, 1, false},
    {GateKind::U2, "u2", "U2", 1, 2, false},
    {GateKind::U3, "u3", "U3", 1, 3, false},
    {GateKind::CX, "cx", "CX", 2, 0, true},
    {GateKind::Rz, "rz", "Rz", 1, 1, false},
    {GateKind::SX, "sx", "SX", 1, 0, true},
    {GateKind::X, "x", "X", 1, 0, true},
    {GateKind::Rx, "rx", "Rx", 1, 1, false},
    {GateKind::Ry, "ry", "Ry", 1, 1, false},
    {GateKind::Rxx, "rxx", "Rxx", 2, 1, false},
    {GateKind::H, "h", "H", 1, 0, true},
    {GateKind::T, "t", "T", 1, 0, false},
    {GateKind::Tdg, "tdg", "T†", 1, 0, false},
    {GateKind::S, "s", "S", 1, 0, true},
    {GateKind::Sdg, "sdg", "S†", 1, 0, true},
}};

constexpr const GateInfo& gate_info(GateKind kind) {
  return kGateInfo[static_cast<std::size_t>(kind)];
}

inline std::optional<GateKind> gate_kind_from_qasm(std::string_view name) {
  for (const auto& info : kGateInfo) {
    if (info.qasm_name == name) return info.kind;
  }
  return std::nullopt;
}

/// A gate application: kind, ordered operands and angle parameters.
///
/// Operands and parameters live inline (at most two qubits, three angles), so
/// gates are cheap to copy. The constructor enforces arity, parameter count
/// and operand distinctness.
class Gate {
 public:
  Gate(GateKind kind, std::span<const Qubit> qubits, std::span<const Angle> params = {})
      : kind_(kind) {
    const auto& info = gate_info(kind);
    if (static_cast<int>(qubits.size()) != info.arity) {
      throw std::invalid_argument(std::string(info.qasm_name) + " expects " +
                                  std::to_string(info.arity) + " operand(s)");
    }
    if (static_cast<int>(params.size()) != info.num_params) {
      throw std::invalid_argument(std::string(info.qasm_name) + " expects " +
                                  std::to_string(info.num_params) + " parameter(s)");
    }
    if (qubits.size() == 2 && qubits[0] == qubits[1]) {
      throw std::invalid_argument(std::string(info.qasm_name) + " operands must be distinct");
    }
    std::copy(qubits.begin(), qubits.end(), qubits_.begin());
    std::copy(params.begin(), params.end(), params_.begin());
  }

  Gate(GateKind kind, std::initializer_list<Qubit> qubits,
       std::initializer_list<Angle> params = {})
      : Gate(kind, std::span<const Qubit>(qubits.begin(), qubits.size()),
             std::span<const Angle>(params.begin(), params.size())) {}

  GateKind kind() const { return kind_; }
  const GateInfo& info() const { return gate_info(kind_); }
  std::size_t arity() const { return static_cast<std::size_t>(info().arity); }

  std::span<const Qubit> qubits() const { return {qubits_.data(), arity()}; }
  Qubit qubit(std::size_t slot) const { return qubits_[slot]; }

  std::span<const Angle> params() const {
    return {params_.data(), static_cast<std::size_t>(info().num_params)};
  }
  const Angle& param(std::size_t i) const { return params_[i]; }

  bool acts_on(Qubit q) const {
    const auto qs = qubits();
    return std::find(qs.begin(), qs.end(), q) != qs.end();
  }

  /// Same gate with every operand q replaced by mapping[q].
  Gate remapped(std::span<const Qubit> mapping) const {
    Gate g = *this;
    for (std::size_t i = 0; i < arity(); ++i) g.qubits_[i] = mapping[qubits_[i]];
    return g;
  }

  bool operator==(const Gate& other) const {
    if (kind_ != other.kind_) return false;
    const auto a = qubits(), b = other.qubits();
    if (!std::equal(a.begin(), a.end(), b.begin())) return false;
    const auto pa = params(), pb = other.params();
    return std::equal(pa.begin(), pa.end(), pb.begin());
  }

  std::string to_string() const {
    std::string s(info().display_name);
    if (!params().empty()) {
      s += "(";
      for (std::size_t i = 0; i < params().size(); ++i) {
        if (i) s += ",";
        s += params_[i].to_qasm();
      }
      s += ")";
    }
    for (std::size_t i = 0; i < arity(); ++i) s += (i ? "," : " q") + std::to_string(qubits_[i]);
    return s;
  }

 private:
  GateKind kind_;
  std::array<Qubit, 2> qubits_{};
  std::array<Angle, 3> params_{};
};

inline bool is_two_qubit(const Gate& g) { return g.arity() == 2; }

/// T-like gates: T, T-dagger, and diagonal rotations by an odd multiple of pi/4.
inline bool is_t_like(const Gate& g) {
  switch (g.kind()) {
    case GateKind::T:
    case GateKind::Tdg:
      return true;
    case GateKind::Rz:
    case GateKind::U1:
      return g.param(0).is_exact() && g.param(0).denominator() == 4;
    default:
      return false;
  }
}

inline bool is_cx(const Gate& g) { return g.kind() == GateKind::CX; }

namespace gates {

inline Gate cx(Qubit control, Qubit target) { return Gate(GateKind::CX, {control, target}); }
inline Gate h(Qubit q) { return Gate(GateKind::H, {q}); }
inline Gate x(Qubit q) { return Gate(GateKind::X, {q}); }
inline Gate sx(Qubit q) { return Gate(GateKind::SX, {q}); }
inline Gate t(Qubit q) { return Gate(GateKind::T, {q}); }
inline Gate tdg(Qubit q) { return Gate(GateKind::Tdg, {q}); }
inline Gate s(Qubit q) { return Gate(GateKind::S, {q}); }
inline Gate sdg(Qubit q) { return Gate(GateKind::Sdg, {q}); }
inline Gate rz(Angle theta, Qubit q) { return Gate(GateKind::Rz, {q}, {theta}); }
inline Gate rx(Angle theta, Qubit q) { return Gate(GateKind::Rx, {q}, {theta}); }
inline Gate ry(Angle theta, Qubit q) { return Gate(GateKind::Ry, {q}, {theta}); }
inline Gate u1(Angle lambda, Qubit q) { return Gate(GateKind::U1, {q}, {lambda}); }
inline Gate rxx(Angle theta, Qubit a, Qubit b) { return Gate(GateKind::Rxx, {a, b}, {theta}); }

/// Exact pi * num / den.
inline Angle pi(std::int64_t num = 1, std::int64_t den = 1) {
  return Angle::pi_fraction(num, den);
}

}  // namespace gates

/// One of the five target gate sets.
class GateSetDef {
 public:
  GateSetDef(std::string name, std::vector<GateKind> kinds)
      : name_(std::move(name)), kinds_(std::move(kinds)) {
    for (std::size_t i = 0; i < kinds_.size(); ++i) {
      for (std::size_t j = i + 1; j < kinds_.size(); ++j) {
        if (kinds_[i] == kinds_[j]) throw std::invalid_argument("duplicate gate in set " + name_);
      }
    }
  }

  static GateSetDef ibmq20() {
    return {"ibmq20", {GateKind::U1, GateKind::U2, GateKind::U3, GateKind::CX}};
  }
  static GateSetDef ibm_eagle() {
    return {"ibm-eagle", {GateKind::Rz, GateKind::SX, GateKind::X, GateKind::CX}};
  }
  static GateSetDef ionq() {
    return {"ionq", {GateKind::Rx, GateKind::Ry, GateKind::Rz, GateKind::Rxx}};
  }
  static GateSetDef nam() { return {"nam", {GateKind::Rz, GateKind::H, GateKind::X, GateKind::CX}}; }
  static GateSetDef clifford_t() {
    return {"clifford-t", {GateKind::T, GateKind::Tdg, GateKind::S, GateKind::Sdg, GateKind::H,
                           GateKind::X, GateKind::CX}};
  }

  static std::vector<GateSetDef> all() {
    return {ibmq20(), ibm_eagle(), ionq(), nam(), clifford_t()};
  }

  static GateSetDef from_name(std::string_view name) {
    for (auto& set : all()) {
      if (set.name() == name) return set;
    }
    throw std::invalid_argument("unknown gate set '" + std::string(name) + "'");
  }

  const std::string& name() const { return name_; }
  const std::vector<GateKind>& kinds() const { return kinds_; }

  bool contains(GateKind kind) const {
    return std::find(kinds_.begin(), kinds_.end(), kind) != kinds_.end();
  }

  std::optional<GateKind> find_qasm(std::string_view name) const {
    auto kind = gate_kind_from_qasm(name);
    if (kind && contains(*kind)) return kind;
    return std::nullopt;
  }

  bool has_parameterized_gates() const {
    return std::any_of(kinds_.begin(), kinds_.end(),
                       [](GateKind k) { return gate_info(k).num_params > 0; });
  }

  /// The two-qubit gate of the set (every set here has exactly one).
  GateKind entangler() const {
    for (auto k : kinds_) {
      if (gate_info(k).arity == 2) return k;
    }
    throw std::logic_error("gate set " + name_ + " has no entangling gate");
  }

  std::vector<GateKind> single_qubit_kinds() const {
    std::vector<GateKind> out;
    for (auto k : kinds_) {
      if (gate_info(k).arity == 1) out.push_back(k);
    }
    return out;
  }

  bool operator==(const GateSetDef& other) const { return name_ == other.name_; }

 private:
  std::string name_;
  std::vector<GateKind> kinds_;
};

}  // namespace guoq
