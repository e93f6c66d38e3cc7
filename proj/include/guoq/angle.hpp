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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace guoq {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Rotation angle in radians.
///
/// Either an exact rational multiple of pi (kept reduced, with the
/// representative num/den in [0, 2)) or a raw floating-point value. Sums of
/// two exact angles stay exact; anything involving a raw value falls back to
/// floating point.
class Angle {
 public:
  /// Exact zero.
  constexpr Angle() = default;

  static Angle pi_fraction(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::invalid_argument("angle denominator is zero");
    Angle a;
    a.exact_ = true;
    a.num_ = num;
    a.den_ = den;
    a.normalize();
    return a;
  }

  static Angle radians(double value) {
    Angle a;
    a.exact_ = false;
    a.value_ = value;
    return a;
  }

  bool is_exact() const { return exact_; }
  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }

  double to_radians() const {
    if (!exact_) return value_;
    return kPi * static_cast<double>(num_) / static_cast<double>(den_);
  }

  bool is_zero() const { return exact_ ? num_ == 0 : equivalent(Angle{}); }

  Angle operator-() const {
    if (exact_) return pi_fraction(-num_, den_);
    return radians(-value_);
  }

  Angle operator+(const Angle& other) const {
    if (exact_ && other.exact_) {
      const std::int64_t g = std::gcd(den_, other.den_);
      const std::int64_t lcm = den_ / g * other.den_;
      // Dyadic angles never get near this; bail out to floating point if
      // some exotic denominator would overflow.
      if (lcm < (std::int64_t{1} << 40)) {
        return pi_fraction(num_ * (lcm / den_) + other.num_ * (lcm / other.den_),
                           lcm);
      }
    }
    return radians(to_radians() + other.to_radians());
  }

  Angle operator-(const Angle& other) const { return *this + (-other); }

  /// Field-level equality: representation and value must both agree.
  bool operator==(const Angle& other) const {
    if (exact_ != other.exact_) return false;
    if (exact_) return num_ == other.num_ && den_ == other.den_;
    return value_ == other.value_;
  }

  /// Equality of the rotation modulo 2*pi. Exact pairs compare exactly,
  /// anything else within `tol` radians.
  bool equivalent(const Angle& other, double tol = 1e-12) const {
    if (exact_ && other.exact_) return *this == other;
    double d = std::fmod(to_radians() - other.to_radians(), kTwoPi);
    if (d < 0) d += kTwoPi;
    return d <= tol || kTwoPi - d <= tol;
  }

  /// OpenQASM spelling: `0`, `pi`, `pi/4`, `3*pi/2`, or a decimal literal.
  std::string to_qasm() const {
    if (!exact_) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", value_);
      std::string s = buf;
      // Keep a decimal point so the value reads back as a raw angle.
      if (s.find_first_of(".en") == std::string::npos) s += ".0";
      return s;
    }
    if (num_ == 0) return "0";
    std::string s = num_ == 1 ? "pi" : std::to_string(num_) + "*pi";
    if (den_ != 1) s += "/" + std::to_string(den_);
    return s;
  }

  /// Snap a floating angle onto the grid of multiples of pi/2^max_log2_den
  /// when it lies within `tol` of a grid point. Exact angles pass through.
  Angle snapped(int max_log2_den = 10, double tol = 1e-9) const {
    if (exact_) return *this;
    const std::int64_t den = std::int64_t{1} << max_log2_den;
    const double steps = value_ / kPi * static_cast<double>(den);
    const double nearest = std::round(steps);
    if (std::abs(steps - nearest) * kPi / static_cast<double>(den) > tol) return *this;
    return pi_fraction(static_cast<std::int64_t>(nearest), den);
  }

 private:
  void normalize() {
    if (den_ < 0) {
      den_ = -den_;
      num_ = -num_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    const std::int64_t period = 2 * den_;
    num_ %= period;
    if (num_ < 0) num_ += period;
  }

  bool exact_ = true;
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  double value_ = 0.0;
};

}  // namespace guoq
