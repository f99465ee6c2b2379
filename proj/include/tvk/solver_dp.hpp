#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tvk/penalty.hpp"
#include "tvk/signal.hpp"

namespace tvk {

/// Increasing candidate values for the DP. Level k is
/// lo + (hi - lo) * (k - pad) / (count - 1 - 2 pad) so that grids refined by
/// an integer factor contain the coarse levels bit for bit.
class LevelGrid {
 public:
  /// `count` levels from g.min() to g.max() inclusive (one level if osc = 0).
  static LevelGrid spanning(const Signal& g, std::size_t count);
  /// Smallest anchored grid on [g.min(), g.max()] with spacing <= eta.
  static LevelGrid with_spacing(const Signal& g, double eta);
  /// Arbitrary increasing levels (used by tests and padded-grid checks).
  static LevelGrid from_levels(std::vector<double> levels);

  /// The same grid extended by `pad` levels of equal spacing on both sides.
  LevelGrid padded(std::size_t pad) const;
  /// Grid with spacing divided by `factor`, containing every current level.
  LevelGrid refined(std::size_t factor) const;

  const std::vector<double>& levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return levels_.size(); }
  double eta() const noexcept { return eta_; }
  double operator[](std::size_t k) const noexcept { return levels_[k]; }

 private:
  static LevelGrid anchored(double lo, double hi, std::size_t intervals, std::size_t pad);

  std::vector<double> levels_;
  double eta_ = 0.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::size_t intervals_ = 0;
  std::size_t pad_ = 0;
  bool anchored_ = false;
};

struct DpSolution {
  std::vector<std::uint32_t> assignment;  // level index per cell
  PiecewiseConstantFn u;                  // canonical, breakpoints at cell boundaries
  EnergyBreakdown energy;
  std::size_t jumps = 0;
  /// Number of decisions where an optimal alternative was discarded by the
  /// tie-break rule.
  std::size_t ties_broken = 0;
};

struct DpConfig {
  /// Refuse grids with more levels than this.
  std::size_t max_levels = 4096;
};

/// Exact minimizer of sum_i (lambda/2) int_cell_i (l_i - g)^2 + sum_i K(|l_{i+1} - l_i|)
/// over all level assignments, O(N L^2). Ties go to fewer jumps, then to the
/// lexicographically smallest level sequence.
DpSolution solve_dp(const Signal& g, const JumpPenalty& p, const LevelGrid& levels,
                    const DpConfig& config = {});

/// Exhaustive enumeration with the same objective and tie-breaking.
/// Throws RefusalError when L^N exceeds max_states.
DpSolution brute_force(const Signal& g, const JumpPenalty& p, const LevelGrid& levels,
                       std::uint64_t max_states = 2'000'000);

/// Piecewise constant function of a level assignment (canonical).
PiecewiseConstantFn assignment_to_function(const Signal& g, const LevelGrid& levels,
                                           const std::vector<std::uint32_t>& assignment);

struct RefinementStep {
  std::size_t levels = 0;
  double eta = 0.0;
  double energy = 0.0;
  bool nested = false;
  /// Energy went up by more than the rounding slack.
  bool non_monotone = false;
};

struct LevelRefinement {
  DpSolution solution;
  std::vector<RefinementStep> steps;  // includes the starting grid
};

/// Re-solves on grids whose spacing shrinks by `factor` per step. Nested
/// grids are expected to give nonincreasing energies; increases are flagged.
/// Throws RefusalError once a grid would exceed config.max_levels.
LevelRefinement refine_levels(const Signal& g, const JumpPenalty& p, const LevelGrid& start,
                              std::size_t factor, std::size_t steps, const DpConfig& config = {});

/// One refinement step from an existing solution on `prev_levels`.
DpSolution refine_levels(const Signal& g, const JumpPenalty& p, const LevelGrid& prev_levels,
                         const DpSolution& prev, std::size_t factor, RefinementStep* step = nullptr,
                         const DpConfig& config = {});

}  // namespace tvk
