#pragma once

#include <cstddef>
#include <vector>

#include "tvk/penalty.hpp"
#include "tvk/signal.hpp"

namespace tvk {

/// Upper bound on the number of jumps of a minimizer.
struct JumpBudget {
  std::size_t m = 0;
  /// Constant in the denominator: A_M, or 2 C_M for monotone data.
  double constant = 0.0;
  double A_M = 0.0;
  double C_M = 0.0;
  double M = 0.0;
  double lambda = 0.0;
  double length = 0.0;
  bool monotone = false;
};

/// m = floor((b - a) lambda / A_M) + 1, or floor((b - a) lambda / (2 C_M)) + 1
/// when `monotone` is set. Throws ValidationError if cert.M < osc(g) or if the
/// monotone bound is requested for non-monotone samples.
JumpBudget jump_budget(const Signal& g, const PenaltyCertificate& cert, bool monotone);

/// The same formula from the interval length and lambda alone; the caller
/// vouches for M >= osc(g) and for monotone data.
JumpBudget jump_budget(double length, double lambda, const PenaltyCertificate& cert, bool monotone);

struct SingleJump {
  double location = 0.0;
  /// int_alpha^beta (U - g)^2 for the two-value profile.
  double fidelity = 0.0;
  /// Distance of (left + right)/2 from the data at the jump; see midpoint_residual.
  double midpoint_residual = 0.0;
  /// g is monotone on [alpha, beta].
  bool monotone_bracket = false;
};

/// Best location of a single jump from `left_value` to `right_value` inside
/// [alpha, beta], minimizing int_alpha^gamma (left - g)^2 + int_gamma^beta (right - g)^2.
/// Candidates are the knots of g, the bracket ends and the exact roots of
/// g = (left + right)/2 on linear pieces; ties go to the leftmost candidate.
SingleJump best_single_jump(const Signal& g, double alpha, double beta, double left_value,
                            double right_value);

/// |g(x) - target|, except at a discontinuity of piecewise-constant data
/// where it is the distance of `target` to the interval spanned by the two
/// one-sided values.
double midpoint_residual(const Signal& g, double x, double target);

/// True if the samples of the cells meeting [lo, hi] are monotone.
bool monotone_on(const Signal& g, double lo, double hi);

struct RefineConfig {
  /// Stop when a full sweep lowers the energy by less than this.
  double tol = 1e-10;
  std::size_t max_iters = 10000;
  /// Seeds per facet value update on [min g, max g].
  std::size_t value_seeds = 256;
  /// Extra starts obtained by merging the smallest jumps of the start.
  std::size_t restarts = 0;
};

struct RefineResult {
  PiecewiseConstantFn u;
  EnergyBreakdown energy;
  std::size_t iterations = 0;
  bool converged = false;
  /// Per jump: residual of the midpoint rule on the bracket between its
  /// neighbouring jumps, and whether g is monotone there.
  std::vector<double> midpoint_residuals;
  std::vector<bool> monotone_brackets;
};

/// Coordinate descent over jump locations and facet values starting from
/// `start`. Never increases the energy and never adds jumps. Throws
/// ValidationError if `start` already exceeds the budget.
RefineResult refine(const Signal& g, const JumpPenalty& p, const PiecewiseConstantFn& start,
                    const JumpBudget& budget, const RefineConfig& config = {});

/// Minimizes (lambda/2) w (v - mean)^2 + K(|v - left|) + K(|right - v|) over
/// v in [lo, hi]; absent neighbours are passed as NaN.
double optimize_facet_value(const JumpPenalty& p, double lambda, double width, double mean,
                            double left, double right, double lo, double hi, std::size_t seeds);

}  // namespace tvk
