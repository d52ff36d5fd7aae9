#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ifock/errors.h"

namespace ifock::quad {

struct Options {
  double rel_tol = 1e-10;
  /// Absolute floor on the error target; useful for nested integrals whose
  /// value may vanish.
  double abs_tol = 0.0;
  std::size_t max_intervals = 20000;
};

template <class T>
struct Estimate {
  T value{};
  double error = 0.0;
};

// Globally adaptive Gauss-Kronrod (21-point rule): keep bisecting the interval
// with the largest error estimate until the summed error meets the target.
// `points` must be sorted and contain both endpoints; consecutive duplicates
// are skipped. Throws QuadratureFailure if the interval budget runs out.
template <class F>
auto integrate(F&& f, std::span<const double> points, const Options& opts = {})
    -> Estimate<decltype(f(0.0))> {
  using T = decltype(f(0.0));
  using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;
  struct Piece {
    double a, b;
    T value;
    double error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  auto eval = [&](double a, double b) {
    double err = 0.0;
    T v = Rule::integrate(f, a, b, 0, 0.0, &err);
    return Piece{a, b, v, err};
  };

  std::vector<Piece> heap;
  T total{};
  double total_err = 0.0;
  auto resum = [&] {
    total = T{};
    total_err = 0.0;
    for (const auto& p : heap) {
      total += p.value;
      total_err += p.error;
    }
  };
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    heap.push_back(eval(points[i], points[i + 1]));
  }
  std::make_heap(heap.begin(), heap.end());
  resum();
  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  std::size_t count = heap.size();
  while (!heap.empty() && total_err > target()) {
    if (count >= opts.max_intervals) {
      // running sums drift by cancellation; only a fresh sum may fail
      resum();
      if (total_err <= target()) break;
      char msg[128];
      std::snprintf(msg, sizeof msg,
                    "adaptive quadrature did not converge: error %.3e vs target %.3e after %zu "
                    "intervals",
                    total_err, target(), count);
      throw QuadratureFailure(msg);
    }
    std::pop_heap(heap.begin(), heap.end());
    const Piece worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureFailure("adaptive quadrature: interval underflow");
    }
    const Piece left = eval(worst.a, mid);
    const Piece right = eval(mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
    if (++count % 512 == 0) resum();
  }
  resum();
  return {total, total_err};
}

/// Sorted, de-duplicated breakpoints clipped to [lo, hi], including both ends.
std::vector<double> make_breakpoints(double lo, double hi, std::vector<double> interior);

/// Approximate zeros and near-zero local minima of |g| on [lo, hi], found on
/// a uniform sample grid and refined by bisection. Used as breakpoints for
/// integrands peaked on the zero set of g.
std::vector<double> near_zeros(const std::function<double(double)>& g, double lo, double hi,
                               std::size_t samples = 400);

/// Two-level Richardson extrapolation for an error series in integer powers
/// of the step: given A(h), A(h/2), A(h/4) returns the O(h³) estimate.
template <class T>
T richardson3(const T& a0, const T& a1, const T& a2) {
  return (8.0 * a2 - 6.0 * a1 + a0) / 3.0;
}

}  // namespace ifock::quad
