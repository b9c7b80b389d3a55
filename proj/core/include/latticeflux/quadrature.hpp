#pragma once

#include <functional>

namespace lflux {

struct QuadratureOptions {
  double abs_tol = 1e-11;
  int max_depth = 60;
  // Refuse to subdivide past this many intervals; hitting the cap is an error.
  long max_intervals = 2'000'000;
};

/// Adaptive Simpson on [a,b]. Throws ModelError if the interval cap is hit
/// before the tolerance is met; never returns a silently degraded value.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {});

}  // namespace lflux
