#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "hh/errors.hpp"

namespace hh {

struct RootOptions {
  double rel_tol = 1e-12;
  int max_iter = 200;
};

// Brent's method on a bracketing interval [a, b] with f(a)*f(b) <= 0.
// Inverse quadratic interpolation / secant / bisection, as in the classic
// van Wijngaarden-Dekker-Brent scheme.
template <class F>
double brent(F&& f, double a, double b, const RootOptions& opt = {}) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw BracketFailure("brent: root not bracketed");

  double c = a, fc = fa;
  double d = b - a, e = d;
  const double eps = std::numeric_limits<double>::epsilon();

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol1 = 2.0 * eps * std::fabs(b) + 0.5 * opt.rel_tol * std::max(std::fabs(b), 1.0);
    double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;

    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {  // secant
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {  // inverse quadratic
        double qq = fa / fc, rr = fb / fc;
        p = s * (2.0 * xm * qq * (qq - rr) - (b - a) * (rr - 1.0));
        q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
    if (fb == 0.0) return b;
  }
  throw RootToleranceNotMet("brent: max iterations reached");
}

// Plain bisection for a sign change on [lo, hi] with f(lo) < 0 < f(hi) or the
// reverse; stops when the interval width drops below width_tol.
template <class F>
double bisect(F&& f, double lo, double hi, double width_tol, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw BracketFailure("bisect: root not bracketed");
  for (int iter = 0; iter < max_iter && (hi - lo) > width_tol; ++iter) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fhi > 0.0)) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace hh
