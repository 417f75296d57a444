#ifndef KDIST_ROOTS_HPP
#define KDIST_ROOTS_HPP

#include <cmath>
#include <utility>

#include "kdist/special_functions.hpp"

namespace kdist::detail {

// Find x in [lo, hi] with f(x) = target, f nondecreasing and f(lo) <= target
// <= f(hi). Secant steps safeguarded by bisection every other round.
template <typename F>
double solve_increasing(F&& f, double target, double lo, double hi, double flo,
                        double fhi, double ftol, int max_iter) {
  if (std::fabs(flo - target) <= ftol) return lo;
  if (std::fabs(fhi - target) <= ftol) return hi;
  for (int i = 0; i < max_iter; ++i) {
    double x;
    if ((i & 1) == 0 && fhi > flo) {
      x = lo + (target - flo) * (hi - lo) / (fhi - flo);
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    } else {
      x = 0.5 * (lo + hi);
    }
    const double fx = f(x);
    if (std::fabs(fx - target) <= ftol) return x;
    if (fx < target) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    if (hi - lo <= 4e-16 * (1.0 + std::fabs(lo) + std::fabs(hi))) {
      // bracket exhausted; accept the closer endpoint if it qualifies
      const double best = std::fabs(flo - target) < std::fabs(fhi - target) ? lo : hi;
      if (std::fabs(f(best) - target) <= 10 * ftol) return best;
      break;
    }
  }
  throw not_converged("root refinement failed within iteration budget");
}

}  // namespace kdist::detail

#endif  // KDIST_ROOTS_HPP
