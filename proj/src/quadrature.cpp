#include "ifock/quadrature.h"

namespace ifock::quad {

std::vector<double> make_breakpoints(double lo, double hi, std::vector<double> interior) {
  std::vector<double> out;
  out.reserve(interior.size() + 2);
  out.push_back(lo);
  for (double x : interior) {
    if (x > lo && x < hi) out.push_back(x);
  }
  out.push_back(hi);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> near_zeros(const std::function<double(double)>& g, double lo, double hi,
                               std::size_t samples) {
  std::vector<double> xs(samples + 1), ys(samples + 1);
  for (std::size_t i = 0; i <= samples; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples);
    ys[i] = g(xs[i]);
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < samples; ++i) {
    if (ys[i] == 0.0) {
      out.push_back(xs[i]);
    } else if ((ys[i] < 0.0) != (ys[i + 1] < 0.0) && ys[i + 1] != 0.0) {
      double a = xs[i], b = xs[i + 1], fa = ys[i];
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = g(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      out.push_back(0.5 * (a + b));
    }
  }
  // local minima of |g| that do not change sign (near tangencies)
  for (std::size_t i = 1; i < samples; ++i) {
    const double l = std::abs(ys[i - 1]), c = std::abs(ys[i]), r = std::abs(ys[i + 1]);
    if (c < l && c < r && (ys[i - 1] < 0.0) == (ys[i + 1] < 0.0)) out.push_back(xs[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ifock::quad
