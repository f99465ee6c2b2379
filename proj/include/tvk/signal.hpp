#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tvk/penalty.hpp"

namespace tvk {

enum class Interpolation {
  /// g is constant on each cell, equal to the cell's sample.
  PiecewiseConstantCells,
  /// g is linear between cell centers and constant on the outer half cells.
  PiecewiseLinearNodes,
};

/// Sampled data g on [a, b] with N uniform cells and fidelity weight lambda.
class Signal {
 public:
  Signal(double a, double b, std::vector<double> samples, double lambda,
         Interpolation interp = Interpolation::PiecewiseConstantCells);

  /// Samples f at the N cell centers of [a, b].
  static Signal sample(const std::function<double(double)>& f, double a, double b, std::size_t n,
                       double lambda, Interpolation interp = Interpolation::PiecewiseConstantCells);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double length() const noexcept { return b_ - a_; }
  double lambda() const noexcept { return lambda_; }
  Interpolation interpolation() const noexcept { return interp_; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::span<const double> samples() const noexcept { return samples_; }
  double cell_width() const noexcept { return (b_ - a_) / static_cast<double>(samples_.size()); }
  double cell_left(std::size_t i) const noexcept;
  double cell_right(std::size_t i) const noexcept;
  double cell_center(std::size_t i) const noexcept;

  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }
  double osc() const noexcept { return max_ - min_; }
  bool nondecreasing() const noexcept;
  bool nonincreasing() const noexcept;
  /// Largest difference between adjacent samples.
  double max_increment() const noexcept;

  /// Same data with a different fidelity weight.
  Signal with_lambda(double lambda) const;

  /// g(x); at a cell boundary of piecewise-constant data the right cell wins
  /// (the last cell at x = b).
  double value_at(double x) const;

  /// Calls fn(lo, hi, g_lo, g_hi) for every linear piece of g meeting
  /// [x0, x1], clipped to it. Pieces are visited left to right.
  void for_each_piece(double x0, double x1,
                      const std::function<void(double, double, double, double)>& fn) const;

  /// Positions in (x0, x1) where the formula of g changes.
  std::vector<double> knots(double x0, double x1) const;

  /// Exact int_{x0}^{x1} (v - g)^2 dx.
  double squared_error(double v, double x0, double x1) const;

  struct Moments {
    double length;
    double sum;     // int g
    double sum_sq;  // int g^2
  };
  Moments moments(double x0, double x1) const;

 private:
  double a_;
  double b_;
  std::vector<double> samples_;
  double lambda_;
  Interpolation interp_;
  double min_ = 0.0;
  double max_ = 0.0;
};

/// Piecewise constant function on [a, b]: values[i] holds on
/// [breakpoints[i-1], breakpoints[i]).
struct PiecewiseConstantFn {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> breakpoints;
  std::vector<double> values;

  static PiecewiseConstantFn constant(double a, double b, double value);

  std::size_t num_jumps() const noexcept { return breakpoints.size(); }
  std::size_t num_facets() const noexcept { return values.size(); }
  double facet_left(std::size_t i) const noexcept { return i == 0 ? a : breakpoints[i - 1]; }
  double facet_right(std::size_t i) const noexcept {
    return i + 1 == values.size() ? b : breakpoints[i];
  }
  /// Right-continuous evaluation.
  double value_at(double x) const;
  std::vector<double> jump_sizes() const;
  double max_jump() const;
  bool nondecreasing() const;
  bool nonincreasing() const;
};

/// Breakpoints closer than this fraction of (b - a) are treated as equal.
constexpr double kBreakpointTolerance = 1e-12;

/// Removes zero-width facets and zero-size jumps. Throws ValidationError for
/// unsorted breakpoints or mismatched sizes.
PiecewiseConstantFn canonicalize(const PiecewiseConstantFn& u);

struct EnergyBreakdown {
  double tv_k = 0.0;
  double fidelity = 0.0;
  double total = 0.0;
};

/// Sum of K over all jumps of u.
double tv_k_energy(const PiecewiseConstantFn& u, const JumpPenalty& p);

/// (lambda / 2) int (u - g)^2, exact under the signal's interpolation.
/// Throws ValidationError if u and g live on different intervals.
double fidelity(const PiecewiseConstantFn& u, const Signal& g);

EnergyBreakdown total_energy(const PiecewiseConstantFn& u, const Signal& g, const JumpPenalty& p);

}  // namespace tvk
