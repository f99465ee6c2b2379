#pragma once

#include <functional>

namespace tvk {

/// Adaptive trapezoid rule on [lo, hi]. Subintervals are bisected until the
/// trapezoid and its two-panel refinement agree to `rel_tol` (relative) or
/// `abs_tol` (absolute), whichever is looser.
double adaptive_trapezoid(const std::function<double(double)>& f, double lo, double hi,
                          double rel_tol = 1e-10, double abs_tol = 1e-300, int max_depth = 40);

struct ScalarMin {
  double x;
  double value;
};

/// Golden-section search for a minimum of f on [lo, hi]; stops when the
/// bracket is shorter than tol. Returns the best point evaluated.
ScalarMin golden_section(const std::function<double(double)>& f, double lo, double hi, double tol);

}  // namespace tvk
