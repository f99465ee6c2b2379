#include "tvk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "tvk/errors.hpp"
#include "tvk/solver_refine.hpp"

namespace tvk {

namespace {

std::string interval(double lo, double hi) {
  std::ostringstream s;
  s.precision(9);
  s << "[" << lo << ", " << hi << "]";
  return s.str();
}

std::string point(double x) {
  std::ostringstream s;
  s.precision(9);
  s << "x=" << x;
  return s.str();
}

// Tracks the smallest margin seen and where it happened.
struct Worst {
  double margin = std::numeric_limits<double>::infinity();
  std::string witness;
  bool any = false;
  void see(double m, const std::string& w) {
    if (!any || m < margin) {
      margin = m;
      witness = w;
      any = true;
    }
  }
};

CheckResult make_check(std::string name, const Worst& w, double tol, bool hard = true) {
  CheckResult c;
  c.name = std::move(name);
  c.hard = hard;
  c.margin = w.any ? w.margin : 0.0;
  c.witness = w.witness;
  c.pass = !w.any || w.margin >= -tol;
  return c;
}

}  // namespace

std::vector<CoincidenceItem> coincidence_set(const PiecewiseConstantFn& u, const Signal& g, double eps) {
  std::vector<CoincidenceItem> items;
  const double join = kBreakpointTolerance * g.length();
  const auto add = [&](double lo, double hi, double v, std::size_t facet, bool data_jump = false) {
    if (!items.empty() && items.back().facet == facet && lo <= items.back().hi + join) {
      items.back().hi = std::max(items.back().hi, hi);
      items.back().data_jump = items.back().data_jump && data_jump;
      return;
    }
    items.push_back({lo, hi, v, facet, data_jump});
  };

  for (std::size_t f = 0; f < u.num_facets(); ++f) {
    const double v = u.values[f];
    bool have_prev = false;
    double prev_d = 0.0;
    g.for_each_piece(u.facet_left(f), u.facet_right(f), [&](double lo, double hi, double g_lo, double g_hi) {
      const double d0 = g_lo - v;
      const double d1 = g_hi - v;
      const bool c0 = std::abs(d0) <= eps;
      const bool c1 = std::abs(d1) <= eps;
      // A jump of g across v at a knot of piecewise-constant data.
      if (have_prev && std::abs(prev_d) > eps && !c0 && (prev_d < 0.0) != (d0 < 0.0)) {
        add(lo, lo, v, f, true);
      }
      if (c0 && c1) {
        add(lo, hi, v, f);
      } else if (c0) {
        add(lo, lo, v, f);
      } else if (c1) {
        add(hi, hi, v, f);
      } else if ((d0 < 0.0) != (d1 < 0.0)) {
        const double t = d0 / (d0 - d1);
        const double x = lo + t * (hi - lo);
        add(x, x, v, f);
      }
      have_prev = true;
      prev_d = d1;
    });
  }
  return items;
}

const CheckResult* StructureReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

StructureReport check_structure(const PiecewiseConstantFn& u_in, const Signal& g, const JumpPenalty& p,
                                const PenaltyCertificate& cert, const StructureOptions& options) {
  const PiecewiseConstantFn u = canonicalize(u_in);
  StructureReport r;
  const bool g_up = g.nondecreasing();
  const bool g_down = g.nonincreasing();
  const JumpBudget general = jump_budget(g, cert, false);
  r.jumps = u.num_jumps();
  r.budget = general.m;
  r.energy = total_energy(u, g, p);
  const double scale = std::max(1.0, g.osc());
  const double itol = options.integral_tol * g.length() * scale * scale;

  {
    Worst w;
    w.see(static_cast<double>(general.m) - static_cast<double>(r.jumps), interval(g.a(), g.b()));
    r.checks.push_back(make_check("budget", w, 0.0));
  }
  if (g_up || g_down) {
    const JumpBudget mono = jump_budget(g, cert, true);
    r.monotone_budget = mono.m;
    Worst w;
    w.see(static_cast<double>(mono.m) - static_cast<double>(r.jumps), interval(g.a(), g.b()));
    r.checks.push_back(make_check("budget_monotone", w, 0.0));

    const bool ok = g_up ? u.nondecreasing() : u.nonincreasing();
    r.monotone_ok = ok;
    Worst wm;
    for (std::size_t j = 0; j < u.num_jumps(); ++j) {
      const double step = u.values[j + 1] - u.values[j];
      wm.see(g_up ? step : -step, point(u.breakpoints[j]));
    }
    r.checks.push_back(make_check("monotone", wm, 0.0));
  }

  {
    Worst w;
    const double vtol = 1e-12 * scale;
    for (std::size_t i = 0; i < u.num_facets(); ++i) {
      const double v = u.values[i];
      w.see(std::min(v - g.min(), g.max() - v), interval(u.facet_left(i), u.facet_right(i)));
    }
    auto c = make_check("range", w, vtol);
    r.range_ok = c.pass;
    r.checks.push_back(std::move(c));
  }

  r.coincidence = coincidence_set(u, g, options.eps);

  {
    // Every facet should touch the data; exact only in the continuum.
    Worst w;
    std::vector<bool> touched(u.num_facets(), false);
    for (const auto& c : r.coincidence) touched[c.facet] = true;
    for (std::size_t i = 0; i < u.num_facets(); ++i) {
      w.see(touched[i] ? 0.0 : -1.0, interval(u.facet_left(i), u.facet_right(i)));
    }
    r.checks.push_back(make_check("facet_contact", w, 0.0, false));
  }

  {
    // Between coincidence items closer than A_M / lambda: one jump, two values.
    const double reach = cert.A_M / g.lambda();
    Worst w;
    for (std::size_t k = 0; k + 1 < r.coincidence.size(); ++k) {
      const double alpha = r.coincidence[k].hi;
      const double beta = r.coincidence[k + 1].lo;
      if (beta - alpha > reach) continue;
      std::size_t jumps = 0;
      std::set<double> values;
      for (std::size_t i = 0; i < u.num_facets(); ++i) {
        if (u.facet_right(i) > alpha && u.facet_left(i) < beta) values.insert(u.values[i]);
      }
      for (const double x : u.breakpoints) {
        if (x > alpha && x < beta) ++jumps;
      }
      const double slack = std::min(1.0 - static_cast<double>(jumps), 2.0 - static_cast<double>(values.size()));
      w.see(slack, interval(alpha, beta));
      if (slack < 0.0) r.spacing_violations.push_back({alpha, beta, jumps, values.size()});
    }
    r.checks.push_back(make_check("jump_spacing", w, 0.0));
  }

  const bool u_up = u.nondecreasing();
  const bool u_down = u.nonincreasing();
  if (u.num_jumps() > 0 && (u_up || u_down)) {
    // Reflection maps the nonincreasing case onto the nondecreasing one.
    const double sign = u_up ? 1.0 : -1.0;
    Worst w;
    for (std::size_t i = 0; i + 1 < u.num_facets(); ++i) {
      const double x0 = u.facet_left(i);
      const double x1 = u.facet_right(i);
      const Signal::Moments m = g.moments(x0, x1);
      const double lhs = sign * (m.sum - u.values[i] * m.length);
      const double rhs = sign * (u.values[i + 1] - u.values[i]) * m.length / 2.0;
      r.facet_average_margins.push_back(rhs - lhs);
      w.see(rhs - lhs, interval(x0, x1));
    }
    r.checks.push_back(make_check("facet_average", w, itol));

    // Flattening u between two coincidence points costs at most rho^2 times
    // the distance in squared error. Only points where g is continuous
    // qualify; a jump of the data across u is not a contact point.
    std::vector<std::pair<double, double>> pts;  // (x, u at x)
    for (const auto& c : r.coincidence) {
      if (c.data_jump) continue;
      pts.emplace_back(c.lo, c.value);
      if (c.hi > c.lo) pts.emplace_back(c.hi, c.value);
    }
    if (pts.size() > options.max_pair_points) {
      std::vector<std::pair<double, double>> thin;
      const double stride = static_cast<double>(pts.size()) / static_cast<double>(options.max_pair_points);
      for (std::size_t k = 0; k < options.max_pair_points; ++k) {
        thin.push_back(pts[static_cast<std::size_t>(static_cast<double>(k) * stride)]);
      }
      pts = std::move(thin);
    }
    // The inequality can fail when g overshoots u between the last jump and
    // beta, which monotone data rules out; such pairs are only reported.
    Worst wf;
    Worst wf_general;
    const double end_tol = kBreakpointTolerance * g.length();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const double alpha = pts[i].first;
        const double beta = pts[j].first;
        if (!(beta > alpha) || beta >= g.b() - end_tol) continue;
        const double rho = std::abs(pts[j].second - pts[i].second);
        const double flat = g.squared_error(pts[i].second, alpha, beta);
        double actual = 0.0;
        for (std::size_t f = 0; f < u.num_facets(); ++f) {
          const double lo = std::max(alpha, u.facet_left(f));
          const double hi = std::min(beta, u.facet_right(f));
          if (hi > lo) actual += g.squared_error(u.values[f], lo, hi);
        }
        const double margin = rho * rho * (beta - alpha) - (flat - actual);
        if (monotone_on(g, alpha, beta)) {
          wf.see(margin, interval(alpha, beta));
        } else {
          wf_general.see(margin, interval(alpha, beta));
        }
      }
    }
    r.checks.push_back(make_check("fidelity_increase", wf, itol));
    r.checks.push_back(make_check("fidelity_increase_nonmonotone_data", wf_general, itol, false));
  }

  {
    // Midpoint rule at each jump whose bracket carries monotone data.
    double mtol = options.midpoint_tol;
    if (mtol < 0.0) {
      mtol = g.interpolation() == Interpolation::PiecewiseLinearNodes ? g.max_increment() + 1e-9 : 1e-9;
    }
    Worst w;
    for (std::size_t j = 0; j < u.num_jumps(); ++j) {
      const double lo = u.facet_left(j);
      const double hi = u.facet_right(j + 1);
      const double mid = 0.5 * (u.values[j] + u.values[j + 1]);
      const double res = midpoint_residual(g, u.breakpoints[j], mid);
      r.pmf_residuals.push_back(res);
      if (monotone_on(g, lo, hi)) w.see(mtol - res, point(u.breakpoints[j]));
    }
    auto c = make_check("midpoint", w, 0.0);
    r.checks.push_back(std::move(c));
  }

  std::sort(r.checks.begin(), r.checks.end(),
            [](const CheckResult& x, const CheckResult& y) { return x.name < y.name; });
  r.pass = std::all_of(r.checks.begin(), r.checks.end(),
                       [](const CheckResult& c) { return c.pass || !c.hard; });
  return r;
}

TvkLowerResult check_tvk_lower(const PiecewiseConstantFn& u_in, const JumpPenalty& p, double x_lo,
                               double x_hi) {
  const PiecewiseConstantFn u = canonicalize(u_in);
  if (!(x_lo < x_hi)) throw ValidationError("TV_K lower bound needs x_lo < x_hi");
  const double tol = kBreakpointTolerance * (u.b - u.a);
  for (const double x : u.breakpoints) {
    if (std::abs(x - x_lo) <= tol || std::abs(x - x_hi) <= tol) {
      throw RefusalError("TV_K lower bound refused: endpoint sits on a breakpoint at " + point(x));
    }
  }
  TvkLowerResult r;
  for (std::size_t j = 0; j < u.num_jumps(); ++j) {
    if (u.breakpoints[j] > x_lo && u.breakpoints[j] < x_hi) {
      r.tv_k += p(std::abs(u.values[j + 1] - u.values[j]));
    }
  }
  r.bound = p(std::abs(u.value_at(x_hi) - u.value_at(x_lo)));
  r.pass = r.tv_k >= r.bound;
  return r;
}

double energy_on_bracket(const PiecewiseConstantFn& u, const Signal& g, const JumpPenalty& p,
                         double alpha, double beta) {
  double fid = 0.0;
  for (std::size_t f = 0; f < u.num_facets(); ++f) {
    const double lo = std::max(alpha, u.facet_left(f));
    const double hi = std::min(beta, u.facet_right(f));
    if (hi > lo) fid += g.squared_error(u.values[f], lo, hi);
  }
  double tv = 0.0;
  for (std::size_t j = 0; j < u.num_jumps(); ++j) {
    if (u.breakpoints[j] > alpha && u.breakpoints[j] < beta) tv += p(std::abs(u.values[j + 1] - u.values[j]));
  }
  return tv + 0.5 * g.lambda() * fid;
}

namespace {

void require_nondecreasing(const Signal& g, double alpha, double beta) {
  if (!(alpha < beta) || alpha < g.a() || beta > g.b()) {
    throw ValidationError("audit bracket must satisfy a <= alpha < beta <= b");
  }
  bool ok = true;
  double prev = -std::numeric_limits<double>::infinity();
  g.for_each_piece(alpha, beta, [&](double, double, double g_lo, double g_hi) {
    ok = ok && prev <= g_lo && g_lo <= g_hi;
    prev = g_hi;
  });
  if (!ok) throw ValidationError("audit needs data nondecreasing on the bracket");
}

// Two-value profile on [alpha, beta] with the best single jump.
PiecewiseConstantFn one_jump(const Signal& g, double alpha, double beta, double left, double right) {
  const SingleJump s = best_single_jump(g, alpha, beta, left, right);
  return canonicalize({alpha, beta, {s.location}, {left, right}});
}

}  // namespace

GapAuditReport monotone_gap_audit(const Signal& g, double alpha, double beta, const JumpPenalty& p,
                                  const PenaltyCertificate& cert, const std::vector<double>& deltas) {
  require_nondecreasing(g, alpha, beta);
  GapAuditReport r;
  r.alpha = alpha;
  r.beta = beta;
  const double g_a = g.value_at(alpha);
  // value_at is right-continuous; take the left limit at the right end.
  const double g_b = beta >= g.b() ? g.samples().back() : g.value_at(std::nextafter(beta, alpha));
  r.rho = g_b - g_a;
  r.c_star = cert.C_M - (beta - alpha) * g.lambda() / 2.0;
  if (!(r.c_star > 0.0)) {
    r.skipped = true;
    r.notice = "bracket " + interval(alpha, beta) + " skipped: C* <= 0";
    return r;
  }
  if (r.rho > cert.M) {
    r.skipped = true;
    r.notice = "bracket " + interval(alpha, beta) + " skipped: rise exceeds M";
    return r;
  }

  const PiecewiseConstantFn u0 = one_jump(g, alpha, beta, g_a, g_b);
  const double e0 = energy_on_bracket(u0, g, p, alpha, beta);
  const double f0 = g.squared_error(u0.values.front(), alpha, u0.facet_right(0)) +
                    (u0.num_facets() > 1 ? g.squared_error(u0.values.back(), u0.facet_left(1), beta) : 0.0);
  const double tol = 1e-12 * std::max(1.0, r.rho * r.rho) * (beta - alpha);

  for (const double delta : deltas) {
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("audit deltas must lie in (0, 1)");
    const double mid = g_a + delta * r.rho;
    const double x1 = best_single_jump(g, alpha, beta, g_a, mid).location;
    const double x2 = best_single_jump(g, alpha, beta, mid, g_b).location;
    const double fid_d = g.squared_error(g_a, alpha, x1) + g.squared_error(mid, x1, std::max(x1, x2)) +
                         g.squared_error(g_b, std::max(x1, x2), beta);
    // TV_K of the profile counts both jumps even if a facet collapses.
    const double ed = p(delta * r.rho) + p((1.0 - delta) * r.rho) + 0.5 * g.lambda() * fid_d;

    GapAuditEntry e;
    e.delta = delta;
    e.excess = ed - e0;
    e.bound = r.c_star * delta * (1.0 - delta) * r.rho * r.rho;
    e.margin = e.excess - e.bound;
    e.fid_decrease = f0 - fid_d;
    e.fid_bound = delta * (1.0 - delta) * r.rho * r.rho * (beta - alpha);
    e.fid_margin = e.fid_bound - e.fid_decrease;
    r.pass = r.pass && e.margin >= -tol && e.fid_margin >= -tol;
    r.entries.push_back(e);
  }
  return r;
}

GapAuditReport monotone_gap_audit(const Signal& g, double alpha, double beta, const JumpPenalty& p,
                                  double M) {
  return monotone_gap_audit(g, alpha, beta, p, certify(p, M));
}

CompetitorAuditReport competitor_audit(const Signal& g, double alpha, double beta, const JumpPenalty& p,
                                       const PenaltyCertificate& cert, std::uint64_t seed,
                                       std::size_t count) {
  require_nondecreasing(g, alpha, beta);
  CompetitorAuditReport r;
  const double g_a = g.value_at(alpha);
  const double g_b = beta >= g.b() ? g.samples().back() : g.value_at(std::nextafter(beta, alpha));
  const double rho = g_b - g_a;
  r.c_star = cert.C_M - (beta - alpha) * g.lambda() / 2.0;
  if (!(r.c_star > 0.0) || !(rho > 0.0) || rho > cert.M) {
    r.skipped = true;
    r.notice = "bracket " + interval(alpha, beta) + " skipped: C* <= 0, flat data or rise above M";
    return r;
  }
  const double e0 = energy_on_bracket(one_jump(g, alpha, beta, g_a, g_b), g, p, alpha, beta);
  const double tol = 1e-12 * std::max(1.0, rho * rho) * (beta - alpha);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> jumps_dist(2, 6);
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < count; ++n) {
    const int k = jumps_dist(rng);
    std::vector<double> xs(static_cast<std::size_t>(k));
    std::vector<double> cuts(static_cast<std::size_t>(k - 1));
    for (auto& x : xs) x = alpha + (beta - alpha) * unit(rng);
    for (auto& c : cuts) c = unit(rng);
    std::sort(xs.begin(), xs.end());
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> values{g_a};
    for (const double c : cuts) values.push_back(g_a + c * rho);
    values.push_back(g_b);

    PiecewiseConstantFn v{alpha, beta, xs, values};
    double sum_sq = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
      const double d = values[i] - values[i - 1];
      sum_sq += d * d;
    }
    const double excess = energy_on_bracket(v, g, p, alpha, beta) - e0;
    const double bound = 0.5 * r.c_star * (rho * rho - sum_sq);
    r.worst_margin = std::min(r.worst_margin, excess - bound);
    ++r.competitors;
  }
  r.pass = r.worst_margin >= -tol;
  return r;
}

}  // namespace tvk
