#pragma once

#include <cmath>
#include <cstddef>

namespace feedmix {

struct RootResult {
  double root;
  double value;  ///< f(root)
  std::size_t iterations;
};

/// Bisection for f(t) = target on [lo, hi], where f is monotone and
/// f(lo) - target, f(hi) - target have opposite signs (either may be
/// infinite). Stops once |f - target| <= value_tol and the bracket is no
/// wider than width_tol(t), or when the bracket cannot be split further in
/// floating point. Returns the evaluated point with the smallest residual.
template <class F, class WidthTol>
RootResult bisect_monotone(F&& f, double lo, double hi, double target, double value_tol,
                           WidthTol&& width_tol, std::size_t max_iter = 4000) {
  const double f_lo = f(lo);
  const bool increasing = f_lo < target;
  RootResult best{lo, f_lo, 0};
  double best_res = std::abs(f_lo - target);
  {
    const double f_hi = f(hi);
    if (std::abs(f_hi - target) < best_res) {
      best = {hi, f_hi, 0};
      best_res = std::abs(f_hi - target);
    }
  }
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    const double fm = f(mid);
    const double res = std::abs(fm - target);
    if (res <= best_res) {
      best = {mid, fm, it};
      best_res = res;
    }
    best.iterations = it;
    if (res <= value_tol && (hi - lo) <= width_tol(mid)) break;
    if ((fm < target) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return best;
}

}  // namespace feedmix
