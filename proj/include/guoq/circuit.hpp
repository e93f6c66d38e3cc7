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

#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "guoq/gate.hpp"

namespace guoq {

/// An ordered gate sequence over a fixed qubit register. The empty sequence is
/// the identity.
class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(std::size_t num_qubits) : num_qubits_(num_qubits) {}

  Circuit(std::size_t num_qubits, std::vector<Gate> gates) : num_qubits_(num_qubits) {
    gates_.reserve(gates.size());
    for (auto& g : gates) append(std::move(g));
  }

  void append(Gate gate) {
    for (Qubit q : gate.qubits()) {
      if (q >= num_qubits_) {
        throw std::out_of_range("operand q" + std::to_string(q) + " out of range for " +
                                std::to_string(num_qubits_) + "-qubit circuit");
      }
    }
    gates_.push_back(std::move(gate));
  }

  /// Append every gate of `other` (which must not be wider than this circuit).
  void append(const Circuit& other) {
    for (const auto& g : other.gates_) append(g);
  }

  std::size_t num_qubits() const { return num_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  const Gate& operator[](std::size_t i) const { return gates_[i]; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }
  auto begin() const { return gates_.begin(); }
  auto end() const { return gates_.end(); }

  bool operator==(const Circuit& other) const = default;

  /// Throws std::invalid_argument naming the first gate outside `set`.
  void validate(const GateSetDef& set) const {
    for (std::size_t i = 0; i < gates_.size(); ++i) {
      if (!set.contains(gates_[i].kind())) {
        throw std::invalid_argument("gate #" + std::to_string(i) + " (" + gates_[i].to_string() +
                                    ") is not in gate set " + set.name());
      }
    }
  }

  bool valid_for(const GateSetDef& set) const {
    for (const auto& g : gates_) {
      if (!set.contains(g.kind())) return false;
    }
    return true;
  }

  /// 64-bit content hash (FNV-1a over kinds, operands and parameters).
  std::uint64_t fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
      for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 1099511628211ULL;
      }
    };
    mix(num_qubits_);
    for (const auto& g : gates_) {
      mix(static_cast<std::uint64_t>(g.kind()));
      for (Qubit q : g.qubits()) mix(q);
      for (const auto& p : g.params()) {
        mix(p.is_exact());
        if (p.is_exact()) {
          mix(static_cast<std::uint64_t>(p.numerator()));
          mix(static_cast<std::uint64_t>(p.denominator()));
        } else {
          mix(std::bit_cast<std::uint64_t>(p.to_radians()));
        }
      }
    }
    return h;
  }

  std::string to_string() const {
    std::string s;
    for (const auto& g : gates_) {
      if (!s.empty()) s += "; ";
      s += g.to_string();
    }
    return "[" + s + "]";
  }

 private:
  std::size_t num_qubits_ = 0;
  std::vector<Gate> gates_;
};

/// Number of gates satisfying `pred`.
template <typename Pred>
std::size_t count_gates(const Circuit& circuit, Pred&& pred) {
  std::size_t n = 0;
  for (const auto& g : circuit) {
    if (pred(g)) ++n;
  }
  return n;
}

}  // namespace guoq
