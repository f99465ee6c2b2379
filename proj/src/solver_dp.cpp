#include "tvk/solver_dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tvk/errors.hpp"

namespace tvk {

LevelGrid LevelGrid::anchored(double lo, double hi, std::size_t intervals, std::size_t pad) {
  LevelGrid grid;
  grid.lo_ = lo;
  grid.hi_ = hi;
  grid.intervals_ = intervals;
  grid.pad_ = pad;
  grid.anchored_ = true;
  if (intervals == 0 || hi == lo) {
    grid.intervals_ = 0;
    grid.pad_ = 0;
    grid.levels_ = {lo};
    grid.eta_ = 0.0;
    return grid;
  }
  const std::size_t count = intervals + 1 + 2 * pad;
  grid.levels_.resize(count);
  const auto denom = static_cast<double>(intervals);
  for (std::size_t k = 0; k < count; ++k) {
    const double offset = static_cast<double>(k) - static_cast<double>(pad);
    grid.levels_[k] = lo + (hi - lo) * (offset / denom);
  }
  grid.levels_[pad] = lo;
  grid.levels_[pad + intervals] = hi;
  grid.eta_ = (hi - lo) / denom;
  return grid;
}

LevelGrid LevelGrid::spanning(const Signal& g, std::size_t count) {
  if (count == 0) throw ValidationError("level grid must contain at least one level");
  if (g.osc() == 0.0) return anchored(g.min(), g.max(), 0, 0);
  if (count == 1) throw ValidationError("a single level cannot span a non-constant signal");
  return anchored(g.min(), g.max(), count - 1, 0);
}

LevelGrid LevelGrid::with_spacing(const Signal& g, double eta) {
  if (!(eta > 0.0)) throw ValidationError("level spacing must be positive");
  if (g.osc() == 0.0) return anchored(g.min(), g.max(), 0, 0);
  const double ratio = g.osc() / eta;
  const auto intervals = static_cast<std::size_t>(std::max(1.0, std::ceil(ratio - 1e-9)));
  return anchored(g.min(), g.max(), intervals, 0);
}

LevelGrid LevelGrid::from_levels(std::vector<double> levels) {
  if (levels.empty()) throw ValidationError("level grid must contain at least one level");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i] > levels[i - 1])) throw ValidationError("levels must be strictly increasing");
  }
  LevelGrid grid;
  grid.levels_ = std::move(levels);
  if (grid.levels_.size() > 1) {
    grid.eta_ = (grid.levels_.back() - grid.levels_.front()) /
                static_cast<double>(grid.levels_.size() - 1);
  }
  return grid;
}

LevelGrid LevelGrid::padded(std::size_t pad) const {
  if (anchored_ && intervals_ > 0) return anchored(lo_, hi_, intervals_, pad_ + pad);
  if (levels_.size() < 2) throw ValidationError("cannot pad a single-level grid");
  std::vector<double> out;
  const double step = eta_;
  for (std::size_t k = pad; k > 0; --k) out.push_back(levels_.front() - static_cast<double>(k) * step);
  out.insert(out.end(), levels_.begin(), levels_.end());
  for (std::size_t k = 1; k <= pad; ++k) out.push_back(levels_.back() + static_cast<double>(k) * step);
  return from_levels(std::move(out));
}

LevelGrid LevelGrid::refined(std::size_t factor) const {
  if (factor < 2) throw ValidationError("refinement factor must be at least 2");
  if (levels_.size() < 2) return *this;
  if (anchored_) return anchored(lo_, hi_, intervals_ * factor, pad_ * factor);
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < levels_.size(); ++i) {
    out.push_back(levels_[i]);
    for (std::size_t j = 1; j < factor; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(factor);
      out.push_back(levels_[i] + t * (levels_[i + 1] - levels_[i]));
    }
  }
  out.push_back(levels_.back());
  return from_levels(std::move(out));
}

namespace {

constexpr double kTieRelTol = 1e-11;

struct Score {
  double energy;
  std::size_t jumps;
};

bool tied_energy(double x, double y) {
  return std::abs(x - y) <= kTieRelTol * std::max({1.0, std::abs(x), std::abs(y)});
}

// Lexicographic (energy with tolerance, then jumps).
bool better(const Score& x, const Score& y) {
  if (tied_energy(x.energy, y.energy)) return x.jumps < y.jumps;
  return x.energy < y.energy;
}

bool tied(const Score& x, const Score& y) {
  return tied_energy(x.energy, y.energy) && x.jumps == y.jumps;
}

struct Problem {
  std::size_t n;
  std::size_t l;
  std::vector<double> cost;        // n * l
  std::vector<double> transition;  // l * l
};

Problem build_problem(const Signal& g, const JumpPenalty& p, const LevelGrid& levels) {
  Problem pr;
  pr.n = g.size();
  pr.l = levels.size();
  if (pr.l == 0) throw ValidationError("level grid must contain at least one level");
  pr.cost.resize(pr.n * pr.l);
  const double half_lambda = 0.5 * g.lambda();
  for (std::size_t i = 0; i < pr.n; ++i) {
    const double lo = g.cell_left(i);
    const double hi = g.cell_right(i);
    for (std::size_t k = 0; k < pr.l; ++k) {
      pr.cost[i * pr.l + k] = half_lambda * g.squared_error(levels[k], lo, hi);
    }
  }
  pr.transition.resize(pr.l * pr.l);
  for (std::size_t j = 0; j < pr.l; ++j) {
    for (std::size_t k = 0; k < pr.l; ++k) {
      pr.transition[j * pr.l + k] = j == k ? 0.0 : p(std::abs(levels[j] - levels[k]));
    }
  }
  return pr;
}

DpSolution finish(const Signal& g, const JumpPenalty& p, const LevelGrid& levels,
                  std::vector<std::uint32_t> assignment, std::size_t ties) {
  DpSolution sol;
  sol.u = assignment_to_function(g, levels, assignment);
  sol.assignment = std::move(assignment);
  sol.energy = total_energy(sol.u, g, p);
  sol.jumps = sol.u.num_jumps();
  sol.ties_broken = ties;
  return sol;
}

std::size_t saturating_add(std::size_t x, std::size_t y) {
  const std::size_t cap = std::numeric_limits<std::size_t>::max();
  return x > cap - y ? cap : x + y;
}

}  // namespace

PiecewiseConstantFn assignment_to_function(const Signal& g, const LevelGrid& levels,
                                           const std::vector<std::uint32_t>& assignment) {
  if (assignment.size() != g.size()) throw ValidationError("assignment length must equal the cell count");
  PiecewiseConstantFn u{g.a(), g.b(), {}, {levels[assignment.front()]}};
  for (std::size_t i = 1; i < assignment.size(); ++i) {
    if (assignment[i] != assignment[i - 1]) {
      u.breakpoints.push_back(g.cell_left(i));
      u.values.push_back(levels[assignment[i]]);
    }
  }
  return canonicalize(u);
}

DpSolution solve_dp(const Signal& g, const JumpPenalty& p, const LevelGrid& levels,
                    const DpConfig& config) {
  if (levels.size() == 0) throw ValidationError("level grid must contain at least one level");
  if (levels.size() > config.max_levels) {
    std::ostringstream msg;
    msg << "level grid with " << levels.size() << " levels exceeds the bound " << config.max_levels;
    throw RefusalError(msg.str());
  }
  const Problem pr = build_problem(g, p, levels);
  const std::size_t n = pr.n;
  const std::size_t l = pr.l;

  // Backward pass: value[i][k] is the best suffix score from cell i given
  // level k there; next[i][k] the lowest-index optimal successor level.
  std::vector<Score> value(n * l);
  std::vector<std::uint32_t> next(n * l, 0);
  std::vector<std::size_t> count(n * l, 1);
  for (std::size_t k = 0; k < l; ++k) value[(n - 1) * l + k] = {pr.cost[(n - 1) * l + k], 0};
  for (std::size_t i = n - 1; i-- > 0;) {
    const Score* succ = &value[(i + 1) * l];
    const std::size_t* succ_count = &count[(i + 1) * l];
    for (std::size_t k = 0; k < l; ++k) {
      const double* trans = &pr.transition[k * l];
      Score best{trans[0] + succ[0].energy, succ[0].jumps + (k != 0 ? 1u : 0u)};
      std::uint32_t arg = 0;
      for (std::size_t j = 1; j < l; ++j) {
        const Score cand{trans[j] + succ[j].energy, succ[j].jumps + (k != j ? 1u : 0u)};
        if (better(cand, best)) {
          best = cand;
          arg = static_cast<std::uint32_t>(j);
        }
      }
      std::size_t paths = 0;
      for (std::size_t j = 0; j < l; ++j) {
        const Score cand{trans[j] + succ[j].energy, succ[j].jumps + (k != j ? 1u : 0u)};
        if (tied(cand, best)) paths = saturating_add(paths, succ_count[j]);
      }
      value[i * l + k] = {pr.cost[i * l + k] + best.energy, best.jumps};
      next[i * l + k] = arg;
      count[i * l + k] = std::max<std::size_t>(paths, 1);
    }
  }

  std::uint32_t first = 0;
  for (std::size_t k = 1; k < l; ++k) {
    if (better(value[k], value[first])) first = static_cast<std::uint32_t>(k);
  }
  std::size_t optimal_paths = 0;
  for (std::size_t k = 0; k < l; ++k) {
    if (tied(value[k], value[first])) optimal_paths = saturating_add(optimal_paths, count[k]);
  }

  std::vector<std::uint32_t> assignment(n);
  assignment[0] = first;
  for (std::size_t i = 1; i < n; ++i) assignment[i] = next[(i - 1) * l + assignment[i - 1]];
  return finish(g, p, levels, std::move(assignment), optimal_paths - 1);
}

DpSolution brute_force(const Signal& g, const JumpPenalty& p, const LevelGrid& levels,
                       std::uint64_t max_states) {
  if (levels.size() == 0) throw ValidationError("level grid must contain at least one level");
  const std::size_t n = g.size();
  const std::size_t l = levels.size();
  double states = std::pow(static_cast<double>(l), static_cast<double>(n));
  if (states > static_cast<double>(max_states)) {
    std::ostringstream msg;
    msg << "brute force over " << l << "^" << n << " assignments exceeds max_states " << max_states;
    throw RefusalError(msg.str());
  }
  const Problem pr = build_problem(g, p, levels);

  auto score_of = [&](const std::vector<std::uint32_t>& a) {
    Score s{pr.cost[a[0]], 0};
    for (std::size_t i = 1; i < n; ++i) {
      s.energy += pr.cost[i * l + a[i]] + pr.transition[a[i - 1] * l + a[i]];
      if (a[i] != a[i - 1]) ++s.jumps;
    }
    return s;
  };
  // Lexicographic order, cell 0 most significant; returns false after the last.
  auto advance = [&](std::vector<std::uint32_t>& a) {
    for (std::size_t i = n; i-- > 0;) {
      if (++a[i] < l) return true;
      a[i] = 0;
    }
    return false;
  };

  std::vector<std::uint32_t> current(n, 0);
  std::vector<std::uint32_t> best = current;
  Score best_score = score_of(current);
  while (advance(current)) {
    const Score s = score_of(current);
    if (better(s, best_score)) {
      best_score = s;
      best = current;
    }
  }
  std::size_t optimal = 0;
  std::fill(current.begin(), current.end(), 0);
  do {
    if (tied(score_of(current), best_score)) ++optimal;
  } while (advance(current));
  return finish(g, p, levels, std::move(best), optimal - 1);
}

DpSolution refine_levels(const Signal& g, const JumpPenalty& p, const LevelGrid& prev_levels,
                         const DpSolution& prev, std::size_t factor, RefinementStep* step,
                         const DpConfig& config) {
  if (factor < 2) throw ValidationError("refinement factor must be at least 2");
  const LevelGrid fine = prev_levels.refined(factor);
  if (fine.size() > config.max_levels) {
    std::ostringstream msg;
    msg << "refined grid with " << fine.size() << " levels exceeds the bound " << config.max_levels;
    throw RefusalError(msg.str());
  }
  DpSolution sol = solve_dp(g, p, fine, config);
  if (step != nullptr) {
    step->levels = fine.size();
    step->eta = fine.eta();
    step->energy = sol.energy.total;
    step->nested = true;
    step->non_monotone =
        sol.energy.total > prev.energy.total + 1e-12 * std::max(1.0, std::abs(prev.energy.total));
  }
  return sol;
}

LevelRefinement refine_levels(const Signal& g, const JumpPenalty& p, const LevelGrid& start,
                              std::size_t factor, std::size_t steps, const DpConfig& config) {
  LevelRefinement out;
  out.solution = solve_dp(g, p, start, config);
  out.steps.push_back({start.size(), start.eta(), out.solution.energy.total, true, false});
  LevelGrid grid = start;
  for (std::size_t s = 0; s < steps; ++s) {
    RefinementStep step;
    DpSolution next = refine_levels(g, p, grid, out.solution, factor, &step, config);
    grid = grid.refined(factor);
    out.steps.push_back(step);
    out.solution = std::move(next);
  }
  return out;
}

}  // namespace tvk
