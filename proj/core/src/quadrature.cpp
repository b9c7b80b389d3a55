#include "latticeflux/quadrature.hpp"

#include <cmath>

#include "latticeflux/errors.hpp"

namespace lflux {

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  long intervals_left;
};

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double recurse(SimpsonState& st, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = st.f(lm);
  double frm = st.f(rm);
  double left = simpson(fa, flm, fm, a, m);
  double right = simpson(fm, frm, fb, m, b);
  double err = left + right - whole;
  if (std::abs(err) <= 15.0 * tol || depth <= 0) {
    if (depth <= 0 && std::abs(err) > 15.0 * tol)
      throw ModelError("quadrature: max depth reached without convergence");
    return left + right + err / 15.0;
  }
  st.intervals_left -= 2;
  if (st.intervals_left <= 0)
    throw ModelError("quadrature: interval cap reached without convergence");
  return recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts) {
  if (a == b) return 0.0;
  SimpsonState st{f, opts.max_intervals};
  double fa = f(a);
  double m = 0.5 * (a + b);
  double fm = f(m);
  double fb = f(b);
  double whole = simpson(fa, fm, fb, a, b);
  return recurse(st, a, b, fa, fm, fb, whole, opts.abs_tol, opts.max_depth);
}

}  // namespace lflux
