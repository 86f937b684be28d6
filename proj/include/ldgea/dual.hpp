// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace ldgea {

/// Forward-mode dual number carrying up to kMaxTangents partial derivatives.
///
/// Only the first `n` tangent slots are active; the remainder stay zero so
/// that binary operations can take max(n_a, n_b) without branching.
class Dual {
 public:
  static constexpr int kMaxTangents = 24;

  Dual() = default;
  Dual(double value) : v_(value) {}  // NOLINT: implicit lift of constants

  static Dual variable(double value, int index, int count) {
    Dual d(value);
    d.n_ = count;
    d.d_[index] = 1.0;
    return d;
  }

  double value() const { return v_; }
  double tangent(int i) const { return d_[i]; }
  int tangent_count() const { return n_; }

  Dual& operator+=(const Dual& o) {
    v_ += o.v_;
    n_ = std::max(n_, o.n_);
    for (int i = 0; i < o.n_; ++i) d_[i] += o.d_[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v_ -= o.v_;
    n_ = std::max(n_, o.n_);
    for (int i = 0; i < o.n_; ++i) d_[i] -= o.d_[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    const int n = std::max(n_, o.n_);
    for (int i = 0; i < n; ++i) d_[i] = d_[i] * o.v_ + v_ * o.d_[i];
    v_ *= o.v_;
    n_ = n;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v_;
    const double q = v_ * inv;
    const int n = std::max(n_, o.n_);
    for (int i = 0; i < n; ++i) d_[i] = (d_[i] - q * o.d_[i]) * inv;
    v_ = q;
    n_ = n;
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }
  friend Dual operator-(Dual a) {
    a.v_ = -a.v_;
    for (int i = 0; i < a.n_; ++i) a.d_[i] = -a.d_[i];
    return a;
  }

  friend bool operator<(const Dual& a, const Dual& b) { return a.v_ < b.v_; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.v_ > b.v_; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.v_ <= b.v_; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.v_ >= b.v_; }

  /// Chain rule for a unary function with value f and derivative df at v().
  Dual chain(double f, double df) const {
    Dual r(f);
    r.n_ = n_;
    for (int i = 0; i < n_; ++i) r.d_[i] = df * d_[i];
    return r;
  }

 private:
  double v_ = 0.0;
  int n_ = 0;
  std::array<double, kMaxTangents> d_{};
};

inline Dual sqrt(const Dual& x) {
  const double s = std::sqrt(x.value());
  return x.chain(s, 0.5 / s);
}
inline Dual sin(const Dual& x) { return x.chain(std::sin(x.value()), std::cos(x.value())); }
inline Dual cos(const Dual& x) { return x.chain(std::cos(x.value()), -std::sin(x.value())); }
inline Dual tan(const Dual& x) {
  const double t = std::tan(x.value());
  return x.chain(t, 1.0 + t * t);
}
inline Dual abs(const Dual& x) { return x.value() < 0.0 ? -x : x; }
inline bool isfinite(const Dual& x) { return std::isfinite(x.value()); }

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.value(); }

}  // namespace ldgea
