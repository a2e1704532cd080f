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

#ifndef ECOTRAJ_SPLINE_HPP_
#define ECOTRAJ_SPLINE_HPP_

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ecotraj/dual.hpp"

namespace ecotraj {

/// Clamped (zero end slope) cubic interpolating spline on strictly
/// increasing knots, with values confined to [0, 1].
///
/// Outside the knot range the curve extends as a constant; together with the
/// zero end slopes this keeps the extension C1. Evaluated values are clamped
/// to [0, 1] to suppress interpolation overshoot.
class SplineCurve {
 public:
  SplineCurve(std::vector<double> knots, std::vector<double> values)
      : knots_(std::move(knots)), values_(std::move(values)) {
    const std::size_t n = knots_.size();
    if (n < 2 || values_.size() != n) {
      throw std::invalid_argument("SplineCurve: need >= 2 knots and matching values");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!(knots_[i] < knots_[i + 1])) {
        throw std::invalid_argument("SplineCurve: knots must be strictly increasing");
      }
    }
    for (double y : values_) {
      if (!(y >= 0.0 && y <= 1.0)) {
        throw std::invalid_argument("SplineCurve: values must lie in [0, 1]");
      }
    }
    build();
  }

  /// Evaluates the spline; S may be double or Dual<M>.
  template <class S>
  S eval(S x) const {
    const double xv = value_of(x);
    if (xv <= knots_.front()) return S(values_.front());
    if (xv >= knots_.back()) return S(values_.back());
    const std::size_t i = interval(xv);
    const S t = x - S(knots_[i]);
    const S y = S(a_[i]) + t * (S(b_[i]) + t * (S(c_[i]) + t * S(d_[i])));
    return sclamp(y, S(0.0), S(1.0));
  }

  double operator()(double x) const { return eval(x); }

  double domain_min() const { return knots_.front(); }
  double domain_max() const { return knots_.back(); }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t interval(double x) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - knots_.begin());
    return std::min(i - 1, knots_.size() - 2);
  }

  // Solves the C2 spline slope system with clamped ends m_0 = m_n = 0
  // (tridiagonal, Thomas algorithm), then stores Hermite coefficients.
  void build() {
    const std::size_t n = knots_.size();
    std::vector<double> m(n, 0.0);
    if (n > 2) {
      const std::size_t k = n - 2;  // interior unknowns
      std::vector<double> diag(k), rhs(k), sub(k), sup(k);
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = knots_[i] - knots_[i - 1];
        const double hr = knots_[i + 1] - knots_[i];
        sub[i - 1] = 1.0 / hl;
        sup[i - 1] = 1.0 / hr;
        diag[i - 1] = 2.0 * (1.0 / hl + 1.0 / hr);
        rhs[i - 1] = 3.0 * ((values_[i] - values_[i - 1]) / (hl * hl) +
                            (values_[i + 1] - values_[i]) / (hr * hr));
      }
      for (std::size_t i = 1; i < k; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
      }
      m[n - 2] = rhs[k - 1] / diag[k - 1];
      for (std::size_t i = k - 1; i-- > 0;) {
        m[i + 1] = (rhs[i] - sup[i] * m[i + 2]) / diag[i];
      }
    }
    const std::size_t s = n - 1;
    a_.resize(s);
    b_.resize(s);
    c_.resize(s);
    d_.resize(s);
    for (std::size_t i = 0; i < s; ++i) {
      const double h = knots_[i + 1] - knots_[i];
      const double slope = (values_[i + 1] - values_[i]) / h;
      a_[i] = values_[i];
      b_[i] = m[i];
      c_[i] = (3.0 * slope - 2.0 * m[i] - m[i + 1]) / h;
      d_[i] = (m[i] + m[i + 1] - 2.0 * slope) / (h * h);
    }
  }

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> a_, b_, c_, d_;
};

}  // namespace ecotraj

#endif  // ECOTRAJ_SPLINE_HPP_
