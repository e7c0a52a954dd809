#pragma once

#include <functional>

namespace phaseloss::numerics {

struct Extremum {
  double x;
  double value;
  int iterations;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
/// Stops when the bracket is narrower than abs_tol + rel_tol * |x|.
Extremum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                 double rel_tol = 1e-12, double abs_tol = 0.0,
                                 int max_iterations = 500);

/// Bisection for a root of f on [lo, hi]; f(lo) and f(hi) must differ in sign.
/// Throws NumericError if they do not.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double rel_tol = 1e-15, int max_iterations = 400);

}  // namespace phaseloss::numerics
