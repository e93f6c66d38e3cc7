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

// External synthesizer over a child process speaking newline-delimited JSON:
// one request line on stdin, one response line on stdout.
//
//   request:  {"version":1,"epsilon":e,"gate_set":s,"objective":o,
//              "unitary":[[[re,im],...],...]}
//   response: {"ok":true,"circuit":[{"name":n,"qubits":[...],"params":[...]}]}
//           | {"ok":false,"reason":r}

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <optional>
#include <string>

#include "guoq/synthesis.hpp"
#include "json.hpp"

namespace guoq {

class PluginError : public std::runtime_error {
 public:
  enum class Kind { ProcessFailure, MalformedResponse, ContractViolation, Timeout };

  PluginError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline std::string to_string(PluginError::Kind kind) {
  switch (kind) {
    case PluginError::Kind::ProcessFailure:
      return "process-failure";
    case PluginError::Kind::MalformedResponse:
      return "malformed-response";
    case PluginError::Kind::ContractViolation:
      return "contract-violation";
    case PluginError::Kind::Timeout:
      return "timeout";
  }
  return {};
}

inline nlohmann::json plugin_request_json(const SynthesisRequest& req) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < req.target.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < req.target.cols(); ++c) {
      row.push_back({req.target(r, c).real(), req.target(r, c).imag()});
    }
    rows.push_back(std::move(row));
  }
  return {{"version", 1},
          {"epsilon", req.epsilon},
          {"gate_set", req.gate_set.name()},
          {"objective", req.objective.name()},
          {"unitary", std::move(rows)}};
}

namespace detail {

struct ChildProcess {
  pid_t pid = -1;
  int in = -1;   // child's stdin (write end)
  int out = -1;  // child's stdout (read end)

  ~ChildProcess() {
    if (in >= 0) ::close(in);
    if (out >= 0) ::close(out);
    if (pid > 0) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
    }
  }
};

inline void spawn(ChildProcess& child, const std::string& command) {
  int to_child[2], from_child[2];
  if (::pipe(to_child) != 0) throw PluginError(PluginError::Kind::ProcessFailure, "pipe failed");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw PluginError(PluginError::Kind::ProcessFailure, "pipe failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    throw PluginError(PluginError::Kind::ProcessFailure, "fork failed");
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(to_child[0]);
  ::close(from_child[1]);
  child.pid = pid;
  child.in = to_child[1];
  child.out = from_child[0];
}

inline int remaining_ms(Clock::time_point deadline) {
  if (deadline == Clock::time_point::max()) return -1;
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return static_cast<int>(std::clamp<long long>(left, 0, 1 << 30));
}

/// Runs `command`, writes `request`, returns the first response line.
inline std::string exchange(const std::string& command, const std::string& request, Clock::time_point deadline) {
  // A plugin that exits early must not kill us through SIGPIPE.
  struct sigaction ignore {};
  ignore.sa_handler = SIG_IGN;
  struct sigaction previous {};
  ::sigaction(SIGPIPE, &ignore, &previous);
  struct Restore {
    struct sigaction act;
    ~Restore() { ::sigaction(SIGPIPE, &act, nullptr); }
  } restore{previous};

  ChildProcess child;
  spawn(child, command);
  std::size_t written = 0;
  while (written < request.size()) {
    const auto n = ::write(child.in, request.data() + written, request.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;  // the plugin closed stdin; its answer (or exit) decides
    }
    written += static_cast<std::size_t>(n);
  }
  ::close(child.in);
  child.in = -1;

  std::string buffer;
  char chunk[4096];
  for (;;) {
    if (buffer.find('\n') != std::string::npos) break;
    pollfd pfd{child.out, POLLIN, 0};
    const int wait = remaining_ms(deadline);
    const int ready = ::poll(&pfd, 1, wait);
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw PluginError(PluginError::Kind::ProcessFailure, "poll failed");
    }
    if (ready == 0) throw PluginError(PluginError::Kind::Timeout, "plugin did not answer in time");
    const auto n = ::read(child.out, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw PluginError(PluginError::Kind::ProcessFailure, "read from plugin failed");
    }
    if (n == 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
  const auto eol = buffer.find('\n');
  if (eol == std::string::npos && buffer.empty()) {
    int status = 0;
    ::kill(-child.pid, SIGKILL);
    ::waitpid(child.pid, &status, 0);
    child.pid = -1;
    std::string why = "plugin exited without a response";
    if (WIFEXITED(status)) why += " (status " + std::to_string(WEXITSTATUS(status)) + ")";
    if (WIFSIGNALED(status)) why += " (signal " + std::to_string(WTERMSIG(status)) + ")";
    throw PluginError(PluginError::Kind::ProcessFailure, why);
  }
  return buffer.substr(0, eol);
}

inline Circuit parse_plugin_circuit(const nlohmann::json& j, std::size_t width, const GateSetDef& set) {
  if (!j.is_array()) throw PluginError(PluginError::Kind::MalformedResponse, "'circuit' is not an array");
  Circuit c(width);
  for (const auto& g : j) {
    try {
      const auto name = g.at("name").get<std::string>();
      const auto kind = set.find_qasm(name);
      if (!kind) {
        throw PluginError(PluginError::Kind::ContractViolation, "gate '" + name + "' is outside " + set.name());
      }
      std::vector<Qubit> qs;
      for (const auto& q : g.at("qubits")) {
        const auto v = q.get<std::int64_t>();
        if (v < 0 || static_cast<std::size_t>(v) >= width) {
          throw PluginError(PluginError::Kind::ContractViolation, "qubit index out of range");
        }
        qs.push_back(static_cast<Qubit>(v));
      }
      std::vector<Angle> ps;
      if (g.contains("params")) {
        for (const auto& p : g.at("params")) ps.push_back(Angle::radians(p.get<double>()).snapped(10, 1e-15));
      }
      c.append(Gate(*kind, qs, ps));
    } catch (const nlohmann::json::exception& e) {
      throw PluginError(PluginError::Kind::MalformedResponse, std::string("bad gate entry: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw PluginError(PluginError::Kind::ContractViolation, e.what());
    }
  }
  return c;
}

}  // namespace detail

/// Synthesis through an external command. Returns nullopt when the plugin
/// reports no result; throws PluginError on failure, timeout, malformed
/// output, or an answer violating the epsilon contract (checked locally).
inline std::optional<SynthesisResult> plugin_synthesize(const SynthesisRequest& req, const std::string& command) {
  detail::check_request(req);
  const std::string line = detail::exchange(command, plugin_request_json(req).dump() + "\n", req.deadline);
  nlohmann::json resp;
  try {
    resp = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw PluginError(PluginError::Kind::MalformedResponse, std::string("response is not JSON: ") + e.what());
  }
  if (!resp.is_object() || !resp.contains("ok") || !resp["ok"].is_boolean()) {
    throw PluginError(PluginError::Kind::MalformedResponse, "response lacks a boolean 'ok'");
  }
  if (!resp["ok"].get<bool>()) return std::nullopt;
  if (!resp.contains("circuit")) throw PluginError(PluginError::Kind::MalformedResponse, "response lacks 'circuit'");
  Circuit c = detail::parse_plugin_circuit(resp["circuit"], req.num_qubits(), req.gate_set);
  const double d = hs_distance(circuit_unitary(c).matrix(), req.target);
  if (d > req.epsilon + kSynthesisSlack) {
    throw PluginError(PluginError::Kind::ContractViolation,
                      "plugin circuit is at distance " + std::to_string(d) + " > epsilon " +
                          std::to_string(req.epsilon));
  }
  return SynthesisResult{std::move(c), d, SynthesizerTag::Plugin};
}

}  // namespace guoq
