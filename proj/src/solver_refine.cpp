#include "tvk/solver_refine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "tvk/errors.hpp"
#include "tvk/quadrature.hpp"

namespace tvk {

JumpBudget jump_budget(double length, double lambda, const PenaltyCertificate& cert, bool monotone) {
  if (!(length > 0.0) || !(lambda > 0.0)) throw ValidationError("jump budget needs length > 0 and lambda > 0");
  JumpBudget b;
  b.A_M = cert.A_M;
  b.C_M = cert.C_M;
  b.M = cert.M;
  b.lambda = lambda;
  b.length = length;
  b.monotone = monotone;
  b.constant = monotone ? 2.0 * cert.C_M : cert.A_M;
  if (!(b.constant > 0.0)) throw ValidationError("jump budget needs a positive certified constant");
  b.m = static_cast<std::size_t>(std::floor(length * lambda / b.constant)) + 1;
  return b;
}

JumpBudget jump_budget(const Signal& g, const PenaltyCertificate& cert, bool monotone) {
  if (cert.M < g.osc()) {
    throw ValidationError("jump budget needs M >= osc(g); certificate has M = " +
                          std::to_string(cert.M) + ", data oscillation " + std::to_string(g.osc()));
  }
  if (monotone && !g.nondecreasing() && !g.nonincreasing()) {
    throw ValidationError("monotone jump budget requested for non-monotone samples");
  }
  return jump_budget(g.length(), g.lambda(), cert, monotone);
}

bool monotone_on(const Signal& g, double lo, double hi) {
  bool up = true;
  bool down = true;
  double prev = std::numeric_limits<double>::quiet_NaN();
  g.for_each_piece(lo, hi, [&](double, double, double g_lo, double g_hi) {
    if (!std::isnan(prev)) {
      up = up && prev <= g_lo;
      down = down && prev >= g_lo;
    }
    up = up && g_lo <= g_hi;
    down = down && g_lo >= g_hi;
    prev = g_hi;
  });
  return up || down;
}

double midpoint_residual(const Signal& g, double x, double target) {
  if (g.interpolation() == Interpolation::PiecewiseConstantCells) {
    const double h = g.cell_width();
    const double t = (x - g.a()) / h;
    const double k = std::round(t);
    if (k >= 1.0 && k <= static_cast<double>(g.size() - 1) &&
        std::abs(x - g.cell_left(static_cast<std::size_t>(k))) <= 1e-12 * g.length()) {
      const auto i = static_cast<std::size_t>(k);
      const double lo = std::min(g.samples()[i - 1], g.samples()[i]);
      const double hi = std::max(g.samples()[i - 1], g.samples()[i]);
      if (target < lo) return lo - target;
      if (target > hi) return target - hi;
      return 0.0;
    }
  }
  return std::abs(g.value_at(x) - target);
}

SingleJump best_single_jump(const Signal& g, double alpha, double beta, double left_value,
                            double right_value) {
  if (!(alpha < beta)) throw ValidationError("single-jump bracket needs alpha < beta");
  if (alpha < g.a() || beta > g.b()) throw ValidationError("single-jump bracket outside [a, b]");

  const double mid = 0.5 * (left_value + right_value);
  std::vector<double> cands{alpha, beta};
  for (const double x : g.knots(alpha, beta)) cands.push_back(x);
  // Roots of g = mid inside linear pieces: the first-order condition.
  g.for_each_piece(alpha, beta, [&](double lo, double hi, double g_lo, double g_hi) {
    if (g_lo == g_hi) return;
    const double t = (mid - g_lo) / (g_hi - g_lo);
    if (t > 0.0 && t < 1.0) cands.push_back(lo + t * (hi - lo));
  });
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

  // F(c_k) = int_alpha^c_k (left - g)^2 + int_c_k^beta (right - g)^2, swept.
  const double right_total = g.squared_error(right_value, alpha, beta);
  double left_acc = 0.0;
  double right_acc = 0.0;  // int_alpha^c_k (right - g)^2
  double best_f = std::numeric_limits<double>::infinity();
  double best_x = alpha;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    if (k > 0) {
      left_acc += g.squared_error(left_value, cands[k - 1], cands[k]);
      right_acc += g.squared_error(right_value, cands[k - 1], cands[k]);
    }
    const double f = left_acc + (right_total - right_acc);
    if (k == 0 || f < best_f - 1e-12 * (1.0 + std::abs(best_f))) {
      best_f = f;
      best_x = cands[k];
    }
  }

  SingleJump out;
  out.location = best_x;
  out.fidelity = g.squared_error(left_value, alpha, best_x) + g.squared_error(right_value, best_x, beta);
  out.midpoint_residual = midpoint_residual(g, best_x, mid);
  out.monotone_bracket = monotone_on(g, alpha, beta);
  return out;
}

double optimize_facet_value(const JumpPenalty& p, double lambda, double width, double mean,
                            double left, double right, double lo, double hi, std::size_t seeds) {
  const auto phi = [&](double v) {
    double e = 0.5 * lambda * width * (v - mean) * (v - mean);
    if (!std::isnan(left)) e += p(std::abs(v - left));
    if (!std::isnan(right)) e += p(std::abs(right - v));
    return e;
  };
  if (!(hi > lo)) return lo;

  std::vector<double> pts;
  const std::size_t n = std::max<std::size_t>(seeds, 2);
  for (std::size_t k = 0; k < n; ++k) {
    pts.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
  }
  for (const double extra : {left, right, mean}) {
    if (!std::isnan(extra)) pts.push_back(std::clamp(extra, lo, hi));
  }
  double best_x = pts.front();
  double best_f = phi(best_x);
  for (const double x : pts) {
    const double f = phi(x);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }

  // The neighbours are kinks of the objective; search each smooth piece of
  // the seed neighbourhood separately.
  const double h = (hi - lo) / static_cast<double>(n - 1);
  std::vector<double> edges{std::max(lo, best_x - h), std::min(hi, best_x + h)};
  for (const double kink : {left, right}) {
    if (!std::isnan(kink) && kink > edges.front() && kink < edges.back()) edges.push_back(kink);
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    if (!(edges[k + 1] > edges[k])) continue;
    const ScalarMin m = golden_section(phi, edges[k], edges[k + 1], 1e-13 * (1.0 + hi - lo));
    if (m.value < best_f) {
      best_f = m.value;
      best_x = m.x;
    }
  }
  return best_x;
}

namespace {

RefineResult descend(const Signal& g, const JumpPenalty& p, PiecewiseConstantFn u,
                     const RefineConfig& config) {
  RefineResult r;
  EnergyBreakdown e = total_energy(u, g, p);
  const double lambda = g.lambda();

  const auto try_accept = [&](PiecewiseConstantFn cand) {
    cand = canonicalize(cand);
    const EnergyBreakdown ec = total_energy(cand, g, p);
    if (ec.total < e.total) {
      u = std::move(cand);
      e = ec;
      return true;
    }
    return false;
  };

  while (r.iterations < config.max_iters) {
    const double before = e.total;
    ++r.iterations;

    for (std::size_t j = 0; j < u.num_jumps(); ++j) {
      const double lo = u.facet_left(j);
      const double hi = u.facet_right(j + 1);
      const SingleJump s = best_single_jump(g, lo, hi, u.values[j], u.values[j + 1]);
      if (s.location == u.breakpoints[j]) continue;
      PiecewiseConstantFn cand = u;
      cand.breakpoints[j] = s.location;
      try_accept(std::move(cand));
    }

    for (std::size_t i = 0; i < u.num_facets(); ++i) {
      const double x0 = u.facet_left(i);
      const double x1 = u.facet_right(i);
      const Signal::Moments m = g.moments(x0, x1);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      const double left = i > 0 ? u.values[i - 1] : nan;
      const double right = i + 1 < u.num_facets() ? u.values[i + 1] : nan;
      const double v = optimize_facet_value(p, lambda, m.length, m.sum / m.length, left, right,
                                            g.min(), g.max(), config.value_seeds);
      if (v == u.values[i]) continue;
      PiecewiseConstantFn cand = u;
      cand.values[i] = v;
      try_accept(std::move(cand));
    }

    if (before - e.total < config.tol) {
      r.converged = true;
      break;
    }
  }

  r.u = std::move(u);
  r.energy = e;
  for (std::size_t j = 0; j < r.u.num_jumps(); ++j) {
    const double lo = r.u.facet_left(j);
    const double hi = r.u.facet_right(j + 1);
    const double mid = 0.5 * (r.u.values[j] + r.u.values[j + 1]);
    r.midpoint_residuals.push_back(midpoint_residual(g, r.u.breakpoints[j], mid));
    r.monotone_brackets.push_back(monotone_on(g, lo, hi));
  }
  return r;
}

// Start with the k smallest jumps removed; each merged pair keeps the value
// of its wider facet.
PiecewiseConstantFn merge_smallest(PiecewiseConstantFn u, std::size_t k) {
  for (std::size_t step = 0; step < k && u.num_jumps() > 0; ++step) {
    const auto sizes = u.jump_sizes();
    const auto j = static_cast<std::size_t>(std::min_element(sizes.begin(), sizes.end()) - sizes.begin());
    const double w_left = u.facet_right(j) - u.facet_left(j);
    const double w_right = u.facet_right(j + 1) - u.facet_left(j + 1);
    const double keep = w_left >= w_right ? u.values[j] : u.values[j + 1];
    u.values[j] = keep;
    u.values.erase(u.values.begin() + static_cast<std::ptrdiff_t>(j) + 1);
    u.breakpoints.erase(u.breakpoints.begin() + static_cast<std::ptrdiff_t>(j));
    u = canonicalize(u);
  }
  return u;
}

}  // namespace

RefineResult refine(const Signal& g, const JumpPenalty& p, const PiecewiseConstantFn& start,
                    const JumpBudget& budget, const RefineConfig& config) {
  const PiecewiseConstantFn u0 = canonicalize(start);
  if (u0.num_jumps() > budget.m) {
    throw ValidationError("refinement start has " + std::to_string(u0.num_jumps()) +
                          " jumps, budget allows " + std::to_string(budget.m));
  }
  if (config.restarts == 0) return descend(g, p, u0, config);

  std::vector<PiecewiseConstantFn> starts{u0};
  for (std::size_t k = 1; k <= config.restarts && k <= u0.num_jumps(); ++k) {
    starts.push_back(merge_smallest(u0, k));
  }
  std::vector<std::future<RefineResult>> runs;
  for (const auto& s : starts) {
    runs.push_back(std::async(std::launch::async, [&g, &p, s, &config] { return descend(g, p, s, config); }));
  }
  std::vector<RefineResult> results;
  for (auto& f : runs) results.push_back(f.get());

  std::size_t best = 0;
  for (std::size_t k = 1; k < results.size(); ++k) {
    const double eb = results[best].energy.total;
    const double ek = results[k].energy.total;
    if (ek < eb || (ek == eb && results[k].u.num_jumps() < results[best].u.num_jumps())) best = k;
  }
  return std::move(results[best]);
}

}  // namespace tvk
