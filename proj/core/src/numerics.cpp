#include "phaseloss/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "phaseloss/error.hpp"

namespace phaseloss::numerics {

Extremum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                 double rel_tol, double abs_tol, int max_iterations) {
  if (!(lo < hi)) throw DomainError("golden-section bracket must satisfy lo < hi");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);

  int it = 0;
  for (; it < max_iterations; ++it) {
    const double mid = 0.5 * (a + b);
    if (b - a <= abs_tol + rel_tol * std::abs(mid)) break;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    // the bracket stops shrinking once c and d collide in floating point
    if (!(c < d)) break;
  }
  const double x = fc >= fd ? c : d;
  return {x, std::max(fc, fd), it};
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                   int max_iterations) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericError("bisect_root: no sign change on the bracket");
  }
  for (int it = 0; it < max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo <= rel_tol * std::abs(mid)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace phaseloss::numerics
