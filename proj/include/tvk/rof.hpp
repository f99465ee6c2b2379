#pragma once

#include <vector>

#include "tvk/signal.hpp"

namespace tvk {

struct RofSolution {
  std::vector<double> cell_values;  // u_i per cell
  PiecewiseConstantFn u;            // canonical
  /// sum |u_{i+1} - u_i| + (lambda/2) sum w_i (u_i - g_i)^2
  double energy = 0.0;
};

/// Exact minimizer of the discrete classical ROF energy
///   sum_i |u_{i+1} - u_i| + (lambda / 2) sum_i w_i (u_i - g_i)^2
/// with w_i the cell width, by a forward pass over the piecewise-linear
/// derivative of the partial minimum followed by clamped back substitution.
/// O(N) amortized.
RofSolution solve_rof(const Signal& g);

/// Same problem with explicit per-cell data and weights c_i = lambda * w_i.
std::vector<double> solve_rof_weighted(const std::vector<double>& data,
                                       const std::vector<double>& weights);

/// Largest adjacent difference of u.
double max_jump(const PiecewiseConstantFn& u);
double max_jump(const std::vector<double>& cell_values);

}  // namespace tvk
