#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tvk/penalty.hpp"

namespace tvk {

/// Single-well potential F with its minimum 0 at x = 1, together with the
/// cumulative table of G(xi) = |int_1^xi sqrt(F)| on [0, 1].
///
/// Construction validates the well shape on a sampling grid and throws
/// ValidationError naming the failing check.
class Potential {
 public:
  /// F(x) = (x - 1)^2.
  static Potential quadratic_well(double g_step = 1e-4);
  /// F(x) = |x - 1|^m.
  static Potential abs_power(double m, double g_step = 1e-4);
  /// Piecewise-linear interpolation of (x, F(x)) samples; x strictly increasing,
  /// covering [0, 1].
  static Potential from_samples(std::vector<double> x, std::vector<double> f, double g_step = 1e-4);
  static Potential from_function(std::string name, std::function<double(double)> f, double x_max,
                                 double g_step = 1e-4);

  double F(double x) const { return f_(x); }
  /// G(xi) for xi in [0, x_max].
  double G(double xi) const;
  double x_max() const noexcept { return x_max_; }
  const std::string& name() const noexcept { return name_; }

  /// G at the nodes xi_j = j * g_step(), j = 0..n, on [0, 1].
  const std::vector<double>& g_table() const noexcept { return g_table_; }
  double g_step() const noexcept { return g_step_; }

 private:
  Potential(std::string name, std::function<double(double)> f, double x_max, double g_step);
  void validate() const;
  void build_g_table();
  double sqrt_f_integral(double lo, double hi) const;

  std::string name_;
  std::function<double(double)> f_;
  double x_max_;
  double g_step_;
  std::vector<double> g_table_;
};

/// Defaults for build_from_potential.
constexpr double kDefaultKTolerance = 1e-10;
constexpr double kDefaultRhoNodeStep = 1e-3;

/// Tabulates K(rho) = min over xi in [0, 1] of (s xi^2 rho + 2 G(xi)) on a
/// uniform rho grid. The minimization seeds on the G table nodes and then
/// refines the best seed by golden-section search down to `tol`.
JumpPenalty build_from_potential(const Potential& F, double s, double rho_max,
                                 double tol = kDefaultKTolerance,
                                 double rho_node_step = kDefaultRhoNodeStep);

/// Single evaluation of the defining minimization (no tabulation).
struct PenaltyMinimum {
  double value;
  double xi;
};
PenaltyMinimum minimize_penalty_objective(const Potential& F, double s, double rho,
                                          double tol = kDefaultKTolerance);

struct PotentialProbe {
  double step;
  double value;
};

/// Numerical evidence for the sufficient conditions on F near its well.
struct PotentialReport {
  /// F'(x)/(x - 1) at x = 1 - step (central differences).
  std::vector<PotentialProbe> derivative_ratio;
  double limsup_ratio = 0.0;
  /// Log-log slope of the ratio against the step; negative means blow-up.
  double ratio_slope = 0.0;
  /// int_0^{Fbar^-1(rho^2)} sqrt(Fbar) / rho^2 with Fbar(x) = F(1 - x), rho = step.
  std::vector<PotentialProbe> well_quotient;
  double liminf_quotient = 0.0;
  /// Log-log slope of the quotient against rho; positive means decay to 0.
  double quotient_slope = 0.0;
  double slope_tolerance = 0.1;
  bool ratio_ok = false;
  bool quotient_ok = false;
  bool pass = false;
};

std::vector<double> default_probe_steps();

/// Estimates limsup F'(x)/(x-1) as x -> 1- and the liminf of the well
/// quotient along `probe_steps` (decreasing). Passes when neither estimate
/// trends to a degenerate limit (|slope| within slope_tolerance in the bad
/// direction). Throws ValidationError if F is not decreasing on the probes.
PotentialReport verify_potential(const Potential& F, const std::vector<double>& probe_steps,
                                 double slope_tolerance = 0.1);

}  // namespace tvk
