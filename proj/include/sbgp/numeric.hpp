// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sbgp {

/// Standard normal cdf.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// (1 + t)^(-k) evaluated as exp(-k log1p(t)); stable for large k and small t.
inline double pow_survival(double t, double k) { return std::exp(-k * std::log1p(t)); }

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (symmetric halves).
inline constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <typename F>
void kronrod_pair(const F& f, double a, double b, double& k15, double& g7) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(mid);
  k15 = kKronrodWeights[7] * fc;
  g7 = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double fsum = f(mid - dx) + f(mid + dx);
    k15 += kKronrodWeights[i] * fsum;
    if (i % 2 == 1) g7 += kGaussWeights[i / 2] * fsum;
  }
  k15 *= half;
  g7 *= half;
}

template <typename F>
double integrate_rec(const F& f, double a, double b, double tol, int depth) {
  double k15, g7;
  kronrod_pair(f, a, b, k15, g7);
  if (std::abs(k15 - g7) <= tol || depth >= 48) return k15;
  const double mid = 0.5 * (a + b);
  return integrate_rec(f, a, mid, 0.5 * tol, depth + 1) +
         integrate_rec(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of f over [a, b] to absolute tolerance tol.
template <typename F>
double integrate(const F& f, double a, double b, double tol = 1e-9) {
  if (!(b > a)) return 0.0;
  return detail::integrate_rec(f, a, b, tol, 0);
}

/// Order-independent, correctly rounded accumulation of doubles (Shewchuk
/// expansion arithmetic, final rounding as in the classic fsum recipe).
/// Because the result depends only on the multiset of addends, reductions
/// built on it are exactly invariant under permutation of the inputs.
class ExactSum {
 public:
  void add(double x) {
    std::size_t used = 0;
    for (std::size_t i = 0; i < partials_.size(); ++i) {
      double y = partials_[i];
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[used++] = lo;
      x = hi;
    }
    partials_.resize(used);
    partials_.push_back(x);
  }

  double value() const {
    if (partials_.empty()) return 0.0;
    std::size_t n = partials_.size();
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      const double yr = hi - x;
      lo = y - yr;
      if (lo != 0.0) break;
    }
    // half-even rounding across the remaining partials
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

 private:
  std::vector<double> partials_;
};

/// Solve f(x) = target for a non-decreasing f on the bracket [lo, hi] with
/// f(lo) <= target <= f(hi). Safeguarded secant/bisection; stops when
/// |f(x) - target| < ftol and, if xtol_rel > 0, the bracket has also shrunk
/// below xtol_rel * (1 + |x|) (needed where f is nearly flat).
template <typename F>
double solve_increasing(const F& f, double target, double lo, double hi, double ftol = 1e-8,
                        double xtol_rel = 0.0) {
  double flo = f(lo) - target;
  double fhi = f(hi) - target;
  auto bracket_small = [&](double x) {
    return xtol_rel <= 0.0 || hi - lo < xtol_rel * (1.0 + std::abs(x));
  };
  if (flo > 0.0 && flo < ftol) return lo;
  if (fhi < 0.0 && -fhi < ftol) return hi;
  if (flo > 0.0 || fhi < 0.0)
    throw std::invalid_argument("solve_increasing: target not bracketed");
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    if (fhi - flo > 0.0) {
      x = lo - flo * (hi - lo) / (fhi - flo);  // secant guess
      const double margin = 1e-3 * (hi - lo);
      if (!(x > lo + margin) || !(x < hi - margin)) x = 0.5 * (lo + hi);
    } else {
      x = 0.5 * (lo + hi);
    }
    const double fx = f(x) - target;
    if (std::abs(fx) < ftol && bracket_small(x)) return x;
    if (fx < 0.0) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    if (hi - lo < std::numeric_limits<double>::epsilon() * (1.0 + std::abs(lo) + std::abs(hi)))
      return 0.5 * (lo + hi);
  }
  return x;
}

}  // namespace sbgp
