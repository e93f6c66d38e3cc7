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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "guoq/gate.hpp"
#include "json.hpp"

namespace guoq {

class NoiseModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-gate success probabilities.
///
/// Keys are the gate classes `single_qubit` and `two_qubit`, or a lowercase
/// gate name (`cx`, `rz`, ...) which overrides its class. Anything missing is
/// noiseless (fidelity 1).
class NoiseModel {
 public:
  static constexpr const char* kSingleQubit = "single_qubit";
  static constexpr const char* kTwoQubit = "two_qubit";

  NoiseModel() = default;

  static NoiseModel from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw NoiseModelError("noise model must be a JSON object");
    NoiseModel model;
    for (const auto& [key, value] : j.items()) {
      if (!value.is_number()) throw NoiseModelError("fidelity for '" + key + "' is not a number");
      model.set(key, value.get<double>());
    }
    return model;
  }

  static NoiseModel parse(const std::string& text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw NoiseModelError(std::string("malformed noise model: ") + e.what());
    }
    return from_json(j);
  }

  void set(const std::string& key, double fidelity) {
    if (key != kSingleQubit && key != kTwoQubit && !gate_kind_from_qasm(key)) {
      throw NoiseModelError("unknown gate class '" + key + "'");
    }
    if (!(fidelity > 0.0 && fidelity <= 1.0)) {
      throw NoiseModelError("fidelity for '" + key + "' must lie in (0, 1]");
    }
    entries_[key] = fidelity;
  }

  double fidelity(const Gate& g) const {
    if (auto it = entries_.find(std::string(g.info().qasm_name)); it != entries_.end()) {
      return it->second;
    }
    return class_fidelity(g.arity() == 2 ? kTwoQubit : kSingleQubit);
  }

  double class_fidelity(const std::string& cls) const {
    auto it = entries_.find(cls);
    return it == entries_.end() ? 1.0 : it->second;
  }

  const std::map<std::string, double>& entries() const { return entries_; }

  nlohmann::json to_json() const { return nlohmann::json(entries_); }

 private:
  std::map<std::string, double> entries_;
};

inline NoiseModel load_noise_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NoiseModelError("cannot open noise model " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return NoiseModel::parse(ss.str());
}

}  // namespace guoq
