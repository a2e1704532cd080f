// Copyright 2026 The Ecotraj Authors
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

#ifndef ECOTRAJ_DUAL_HPP_
#define ECOTRAJ_DUAL_HPP_

#include <array>
#include <cmath>
#include <cstddef>

namespace ecotraj {

/// Forward-mode dual number carrying M partial derivatives.
///
/// The energy model is templated on its scalar type; evaluating it with
/// Dual<M> seeds yields exact derivatives of every smooth branch, which is
/// how the solver obtains gradients without a hand-derived chain rule.
template <std::size_t M>
struct Dual {
  double v{0.0};
  std::array<double, M> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit by design

  static Dual seeded(double value, std::size_t k) {
    Dual x(value);
    x.d[k] = 1.0;
    return x;
  }

  Dual operator-() const {
    Dual r(-v);
    for (std::size_t i = 0; i < M; ++i) r.d[i] = -d[i];
    return r;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (std::size_t i = 0; i < M; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (std::size_t i = 0; i < M; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (std::size_t i = 0; i < M; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    for (std::size_t i = 0; i < M; ++i) d[i] = (d[i] - v * inv * o.d[i]) * inv;
    v *= inv;
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }

  friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }
};

template <std::size_t M>
inline Dual<M> exp(const Dual<M>& x) {
  Dual<M> r(std::exp(x.v));
  for (std::size_t i = 0; i < M; ++i) r.d[i] = r.v * x.d[i];
  return r;
}

// Branch-by-value max/min/clamp: the derivative follows the active branch,
// so a clamped value carries zero sensitivity.
template <class S>
inline S smax(const S& a, const S& b) {
  return a >= b ? a : b;
}
template <class S>
inline S smin(const S& a, const S& b) {
  return a <= b ? a : b;
}
template <class S>
inline S sclamp(const S& x, const S& lo, const S& hi) {
  return smax(lo, smin(hi, x));
}

inline double value_of(double x) { return x; }
template <std::size_t M>
inline double value_of(const Dual<M>& x) {
  return x.v;
}

}  // namespace ecotraj

#endif  // ECOTRAJ_DUAL_HPP_
