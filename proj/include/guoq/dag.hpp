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
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "guoq/circuit.hpp"
#include "guoq/rng.hpp"

namespace guoq {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Wire-dependency DAG of a circuit.
///
/// Node ids are the positions of the gates in the source circuit, so id order
/// is already a topological order. Every edge joins consecutive gates on one
/// qubit wire; two gates sharing two wires are joined by two edges.
class CircuitDag {
 public:
  explicit CircuitDag(Circuit circuit)
      : circuit_(std::move(circuit)),
        prev_(2 * circuit_.size(), kNoNode),
        next_(2 * circuit_.size(), kNoNode),
        first_(circuit_.num_qubits(), kNoNode),
        last_(circuit_.num_qubits(), kNoNode) {
    for (NodeId id = 0; id < circuit_.size(); ++id) {
      const auto qs = circuit_[id].qubits();
      for (std::size_t slot = 0; slot < qs.size(); ++slot) {
        const Qubit q = qs[slot];
        const NodeId before = last_[q];
        if (before == kNoNode) {
          first_[q] = id;
        } else {
          prev_[2 * id + slot] = before;
          next_[2 * before + slot_of(before, q)] = id;
        }
        last_[q] = id;
      }
    }
  }

  const Circuit& circuit() const { return circuit_; }
  std::size_t size() const { return circuit_.size(); }
  std::size_t num_qubits() const { return circuit_.num_qubits(); }
  const Gate& gate(NodeId id) const { return circuit_[id]; }

  /// Previous / next node on the wire at operand `slot` of `id`.
  NodeId prev(NodeId id, std::size_t slot) const { return prev_[2 * id + slot]; }
  NodeId next(NodeId id, std::size_t slot) const { return next_[2 * id + slot]; }

  NodeId first_on(Qubit q) const { return first_[q]; }
  NodeId last_on(Qubit q) const { return last_[q]; }

  /// Operand slot at which `id` touches `q`; arity() if it does not.
  std::size_t slot_of(NodeId id, Qubit q) const {
    const auto qs = circuit_[id].qubits();
    return static_cast<std::size_t>(std::find(qs.begin(), qs.end(), q) - qs.begin());
  }

  std::vector<NodeId> successors(NodeId id) const { return neighbours(next_, id); }
  std::vector<NodeId> predecessors(NodeId id) const { return neighbours(prev_, id); }

  /// All wire edges (from, to), one per shared wire.
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (NodeId id = 0; id < size(); ++id) {
      for (std::size_t slot = 0; slot < circuit_[id].arity(); ++slot) {
        if (next(id, slot) != kNoNode) out.emplace_back(id, next(id, slot));
      }
    }
    return out;
  }

  /// Circuit in a topological order of the DAG. With an rng the order is a
  /// random topological sort, otherwise node id order.
  Circuit linearize(Rng* rng = nullptr) const {
    Circuit out(num_qubits());
    std::vector<int> indegree(size(), 0);
    for (auto [from, to] : edges()) {
      (void)from;
      ++indegree[to];
    }
    std::vector<NodeId> ready;
    for (NodeId id = 0; id < size(); ++id) {
      if (indegree[id] == 0) ready.push_back(id);
    }
    while (!ready.empty()) {
      std::size_t pick = 0;
      if (rng) {
        pick = rng->below(ready.size());
      } else {
        pick = static_cast<std::size_t>(std::min_element(ready.begin(), ready.end()) - ready.begin());
      }
      const NodeId id = ready[pick];
      ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(pick));
      out.append(gate(id));
      for (std::size_t slot = 0; slot < gate(id).arity(); ++slot) {
        const NodeId n = next(id, slot);
        if (n != kNoNode && --indegree[n] == 0) ready.push_back(n);
      }
    }
    return out;
  }

 private:
  std::vector<NodeId> neighbours(const std::vector<NodeId>& links, NodeId id) const {
    std::vector<NodeId> out;
    for (std::size_t slot = 0; slot < circuit_[id].arity(); ++slot) {
      const NodeId n = links[2 * id + slot];
      if (n != kNoNode && std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    }
    return out;
  }

  Circuit circuit_;
  std::vector<NodeId> prev_;
  std::vector<NodeId> next_;
  std::vector<NodeId> first_;
  std::vector<NodeId> last_;
};

inline CircuitDag build_dag(const Circuit& circuit) { return CircuitDag(circuit); }

namespace detail {

// Convexity over a membership mask: walk forward from members through
// non-members only; touching a member again means some path left the set and
// came back.
inline bool is_convex_mask(const CircuitDag& dag, const std::vector<char>& member) {
  NodeId lo = kNoNode, hi = 0;
  for (NodeId id = 0; id < dag.size(); ++id) {
    if (member[id]) {
      lo = std::min(lo, id);
      hi = std::max(hi, id);
    }
  }
  if (lo == kNoNode) return true;
  std::vector<char> seen(dag.size(), 0);
  std::vector<NodeId> stack;
  for (NodeId id = lo; id <= hi; ++id) {
    if (!member[id]) continue;
    for (std::size_t slot = 0; slot < dag.gate(id).arity(); ++slot) {
      const NodeId n = dag.next(id, slot);
      if (n != kNoNode && n < hi && !member[n] && !seen[n]) {
        seen[n] = 1;
        stack.push_back(n);
      }
    }
  }
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (std::size_t slot = 0; slot < dag.gate(v).arity(); ++slot) {
      const NodeId n = dag.next(v, slot);
      if (n == kNoNode || n > hi) continue;
      if (member[n]) return false;
      if (!seen[n]) {
        seen[n] = 1;
        stack.push_back(n);
      }
    }
  }
  return true;
}

}  // namespace detail

/// True iff every DAG path between two members stays inside `nodes`.
inline bool is_convex(const CircuitDag& dag, std::span<const NodeId> nodes) {
  std::vector<char> member(dag.size(), 0);
  for (NodeId id : nodes) {
    if (id >= dag.size()) throw std::out_of_range("node id out of range");
    member[id] = 1;
  }
  return detail::is_convex_mask(dag, member);
}

class StaleSubcircuitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A convex node subset of a circuit's DAG, with its qubits densely
/// renumbered in first-touch order.
class Subcircuit {
 public:
  Subcircuit(const CircuitDag& parent, std::vector<NodeId> nodes)
      : parent_fingerprint_(parent.circuit().fingerprint()),
        parent_size_(parent.size()),
        nodes_(std::move(nodes)) {
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    if (!is_convex(parent, nodes_)) throw std::invalid_argument("subcircuit node set is not convex");
    std::vector<Qubit> local(parent.num_qubits(), kUnmapped);
    for (NodeId id : nodes_) {
      for (Qubit q : parent.gate(id).qubits()) {
        if (local[q] == kUnmapped) {
          local[q] = static_cast<Qubit>(qubits_.size());
          qubits_.push_back(q);
        }
      }
    }
    local_ = Circuit(qubits_.size());
    for (NodeId id : nodes_) local_.append(parent.gate(id).remapped(local));
  }

  const std::vector<NodeId>& nodes() const { return nodes_; }
  /// Local index -> parent qubit.
  const std::vector<Qubit>& qubits() const { return qubits_; }
  std::size_t num_qubits() const { return qubits_.size(); }
  std::size_t size() const { return nodes_.size(); }
  /// The member gates over local qubits 0..k-1, in parent order.
  const Circuit& local_circuit() const { return local_; }

  std::uint64_t parent_fingerprint() const { return parent_fingerprint_; }
  std::size_t parent_size() const { return parent_size_; }

 private:
  static constexpr Qubit kUnmapped = std::numeric_limits<Qubit>::max();

  std::uint64_t parent_fingerprint_;
  std::size_t parent_size_;
  std::vector<NodeId> nodes_;
  std::vector<Qubit> qubits_;
  Circuit local_;
};

/// Grows a convex subcircuit from `seed` one DAG neighbour at a time, in an
/// rng-drawn order, until no neighbour fits under `max_qubits` while keeping
/// the set convex. Growth goes both forwards and backwards.
inline Subcircuit extract_subcircuit_greedy(const CircuitDag& dag, NodeId seed,
                                            std::size_t max_qubits, Rng& rng) {
  if (seed >= dag.size()) throw std::out_of_range("seed node out of range");
  if (dag.gate(seed).arity() > max_qubits) {
    throw std::invalid_argument("seed gate alone exceeds the subcircuit qubit limit");
  }
  std::vector<char> member(dag.size(), 0);
  std::vector<char> on_qubit(dag.num_qubits(), 0);
  std::vector<NodeId> members{seed};
  member[seed] = 1;
  std::size_t qubit_count = 0;
  for (Qubit q : dag.gate(seed).qubits()) {
    on_qubit[q] = 1;
    ++qubit_count;
  }

  std::vector<std::pair<std::uint64_t, NodeId>> frontier;
  for (;;) {
    frontier.clear();
    for (NodeId id : members) {
      for (auto list : {dag.predecessors(id), dag.successors(id)}) {
        for (NodeId n : list) {
          if (member[n]) continue;
          if (std::none_of(frontier.begin(), frontier.end(),
                           [n](const auto& e) { return e.second == n; })) {
            frontier.emplace_back(0, n);
          }
        }
      }
    }
    std::sort(frontier.begin(), frontier.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    for (auto& entry : frontier) entry.first = rng.next();
    std::sort(frontier.begin(), frontier.end());

    bool grown = false;
    for (const auto& [key, n] : frontier) {
      std::size_t extra = 0;
      for (Qubit q : dag.gate(n).qubits()) extra += on_qubit[q] ? 0 : 1;
      if (qubit_count + extra > max_qubits) continue;
      member[n] = 1;
      if (!detail::is_convex_mask(dag, member)) {
        member[n] = 0;
        continue;
      }
      members.push_back(n);
      for (Qubit q : dag.gate(n).qubits()) on_qubit[q] = 1;
      qubit_count += extra;
      grown = true;
      break;
    }
    if (!grown) break;
  }
  return Subcircuit(dag, std::move(members));
}

/// Result of splicing a replacement over a removed convex region.
struct SpliceResult {
  Circuit circuit;
  /// For every gate of the input: its index in the output, or -1 if removed.
  std::vector<std::int64_t> new_index;
  /// Output positions [replacement_begin, replacement_begin + replacement size).
  std::size_t replacement_begin = 0;
};

/// Removes the (convex) gates flagged in `removed` and inserts `replacement`
/// (over the circuit's own qubits). Gates that do not depend on the region
/// are emitted first, then the replacement, then the region's descendants,
/// each group in original order.
inline SpliceResult splice(const Circuit& circuit, const std::vector<char>& removed,
                           std::span<const Gate> replacement) {
  std::vector<char> tainted(circuit.num_qubits(), 0);
  std::vector<char> after(circuit.size(), 0);
  for (std::size_t i = 0; i < circuit.size(); ++i) {
    const auto qs = circuit[i].qubits();
    if (removed[i]) {
      for (Qubit q : qs) tainted[q] = 1;
      continue;
    }
    if (std::any_of(qs.begin(), qs.end(), [&](Qubit q) { return tainted[q] != 0; })) {
      after[i] = 1;
      for (Qubit q : qs) tainted[q] = 1;
    }
  }
  SpliceResult out;
  out.circuit = Circuit(circuit.num_qubits());
  out.new_index.assign(circuit.size(), -1);
  for (std::size_t i = 0; i < circuit.size(); ++i) {
    if (!removed[i] && !after[i]) {
      out.new_index[i] = static_cast<std::int64_t>(out.circuit.size());
      out.circuit.append(circuit[i]);
    }
  }
  out.replacement_begin = out.circuit.size();
  for (const auto& g : replacement) out.circuit.append(g);
  for (std::size_t i = 0; i < circuit.size(); ++i) {
    if (after[i]) {
      out.new_index[i] = static_cast<std::int64_t>(out.circuit.size());
      out.circuit.append(circuit[i]);
    }
  }
  return out;
}

/// Replaces `sub` in `circuit` by `replacement` (over the subcircuit's local
/// qubits). `sub` must have been extracted from exactly this circuit.
inline Circuit replace_subcircuit(const Circuit& circuit, const Subcircuit& sub,
                                  const Circuit& replacement) {
  if (circuit.size() != sub.parent_size() || circuit.fingerprint() != sub.parent_fingerprint()) {
    throw StaleSubcircuitError("subcircuit was extracted from a different circuit");
  }
  if (replacement.num_qubits() != sub.num_qubits()) {
    throw std::invalid_argument("replacement acts on " + std::to_string(replacement.num_qubits()) +
                                " qubits, subcircuit on " + std::to_string(sub.num_qubits()));
  }
  std::vector<char> removed(circuit.size(), 0);
  for (NodeId id : sub.nodes()) removed[id] = 1;
  std::vector<Gate> mapped;
  mapped.reserve(replacement.size());
  for (const auto& g : replacement) mapped.push_back(g.remapped(sub.qubits()));
  return splice(circuit, removed, mapped).circuit;
}

}  // namespace guoq
