#include "tvk/quadrature.hpp"

#include <cmath>

namespace tvk {

namespace {

double trapezoid_step(const std::function<double(double)>& f, double lo, double hi, double flo,
                      double fhi, double whole, double rel_tol, double abs_tol, int depth,
                      int forced) {
  const double mid = 0.5 * (lo + hi);
  const double fmid = f(mid);
  const double left = 0.5 * (mid - lo) * (flo + fmid);
  const double right = 0.5 * (hi - mid) * (fmid + fhi);
  const double refined = left + right;
  // Error of the refined estimate is about a third of the difference.
  const double err = std::abs(refined - whole) / 3.0;
  if (depth <= 0 || (forced <= 0 && err <= std::max(rel_tol * std::abs(refined), abs_tol))) {
    return refined;
  }
  return trapezoid_step(f, lo, mid, flo, fmid, left, rel_tol, abs_tol, depth - 1, forced - 1) +
         trapezoid_step(f, mid, hi, fmid, fhi, right, rel_tol, abs_tol, depth - 1, forced - 1);
}

}  // namespace

double adaptive_trapezoid(const std::function<double(double)>& f, double lo, double hi,
                          double rel_tol, double abs_tol, int max_depth) {
  if (hi == lo) return 0.0;
  if (hi < lo) return -adaptive_trapezoid(f, hi, lo, rel_tol, abs_tol, max_depth);
  const double flo = f(lo);
  const double fhi = f(hi);
  const double whole = 0.5 * (hi - lo) * (flo + fhi);
  // Two forced bisections guard against accidental agreement on the first panel.
  return trapezoid_step(f, lo, hi, flo, fhi, whole, rel_tol, abs_tol, max_depth, 2);
}

ScalarMin golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  ScalarMin best{fc <= fd ? c : d, std::min(fc, fd)};
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
    if (fc < best.value) best = {c, fc};
    if (fd < best.value) best = {d, fd};
  }
  return best;
}

}  // namespace tvk
