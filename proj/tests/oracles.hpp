#pragma once

// Reference computations that share no code with the library. They are slow
// on purpose: dense grids, plain enumeration, closed forms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

inline double rho_over_one_plus_rho(double r) { return r / (1.0 + r); }

// K(r1) + K(r2) - K(r1 + r2) for rho/(1+rho), written in factored form.
inline double gap_identity(double r1, double r2) {
  const double r = r1 + r2;
  return (2.0 + r) * r1 * r2 / ((1.0 + r) * (1.0 + r + r1 * r2));
}

// min over a dense xi grid of s xi^2 rho + 2 G(xi), G given in closed form.
inline double dense_xi_min(const std::function<double(double)>& G, double s, double rho,
                           std::size_t n = 200000) {
  double best = std::numeric_limits<double>::infinity();
  double best_xi = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double xi = static_cast<double>(k) / static_cast<double>(n);
    const double v = s * xi * xi * rho + 2.0 * G(xi);
    if (v < best) {
      best = v;
      best_xi = xi;
    }
  }
  // Polish around the grid winner with a finer local grid.
  const double h = 1.0 / static_cast<double>(n);
  for (int k = -1000; k <= 1000; ++k) {
    const double xi = std::clamp(best_xi + h * k / 1000.0, 0.0, 1.0);
    best = std::min(best, s * xi * xi * rho + 2.0 * G(xi));
  }
  return best;
}

// G for F(x) = |x - 1|^m: int_xi^1 (1 - t)^(m/2) dt.
inline double abs_power_G(double m, double xi) {
  const double e = 0.5 * m + 1.0;
  return std::pow(1.0 - xi, e) / e;
}

// Data model evaluated pointwise, independent of tvk::Signal.
struct Data {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> g;
  bool linear = false;

  double h() const { return (b - a) / static_cast<double>(g.size()); }
  double center(std::size_t i) const { return a + (static_cast<double>(i) + 0.5) * h(); }

  double at(double x) const {
    const std::size_t n = g.size();
    if (!linear) {
      auto i = static_cast<long>(std::floor((x - a) / h()));
      i = std::clamp(i, 0L, static_cast<long>(n) - 1);
      return g[static_cast<std::size_t>(i)];
    }
    if (x <= center(0)) return g.front();
    if (x >= center(n - 1)) return g.back();
    const double t = (x - center(0)) / h();
    const auto i = std::min(static_cast<std::size_t>(std::floor(t)), n - 2);
    const double f = t - static_cast<double>(i);
    return g[i] + f * (g[i + 1] - g[i]);
  }
};

// int_x0^x1 (v - g)^2 by composite Simpson on subintervals that respect every
// knot of the data (exact for the quadratic integrand between knots).
inline double squared_error(const Data& d, double v, double x0, double x1) {
  if (!(x1 > x0)) return 0.0;
  std::vector<double> cuts{x0, x1};
  for (std::size_t i = 0; i <= d.g.size(); ++i) {
    const double edge = d.a + static_cast<double>(i) * d.h();
    if (!d.linear && edge > x0 && edge < x1) cuts.push_back(edge);
    if (d.linear && i < d.g.size() && d.center(i) > x0 && d.center(i) < x1) cuts.push_back(d.center(i));
  }
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    const double m = 0.5 * (lo + hi);
    const auto f = [&](double x) {
      const double r = v - d.at(x);
      return r * r;
    };
    // Cell data is constant between cuts, so the midpoint decides the piece;
    // linear data is continuous and Simpson is exact for the quadratic.
    if (!d.linear) {
      s += (hi - lo) * f(m);
    } else {
      s += (hi - lo) / 6.0 * (f(lo) + 4.0 * f(m) + f(hi));
    }
  }
  return s;
}

// Cell energy of assigning level v to cell i, exact for either model.
inline double cell_cost(const Data& d, double lambda, std::size_t i, double v) {
  const double lo = d.a + static_cast<double>(i) * d.h();
  return 0.5 * lambda * squared_error(d, v, lo, lo + d.h());
}

struct Enumerated {
  double energy = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> assignment;
};

// All L^N assignments by odometer. Ties keep the first minimum unless a later
// one has fewer jumps (energy equal within rel 1e-12); the odometer runs in
// lexicographic order, so the survivor is the lexicographically smallest.
inline Enumerated enumerate(const Data& d, double lambda, const std::vector<double>& levels,
                            const std::function<double(double)>& K) {
  const std::size_t n = d.g.size();
  const std::size_t l = levels.size();
  std::vector<std::vector<double>> cost(n, std::vector<double>(l));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < l; ++k) cost[i][k] = cell_cost(d, lambda, i, levels[k]);

  Enumerated best;
  std::size_t best_jumps = 0;
  std::vector<std::uint32_t> a(n, 0);
  while (true) {
    double e = 0.0;
    std::size_t jumps = 0;
    for (std::size_t i = 0; i < n; ++i) {
      e += cost[i][a[i]];
      if (i > 0 && a[i] != a[i - 1]) {
        ++jumps;
        e += K(std::abs(levels[a[i]] - levels[a[i - 1]]));
      }
    }
    const double tol = 1e-12 * (1.0 + std::abs(best.energy));
    if (best.assignment.empty() || e < best.energy - tol ||
        (std::abs(e - best.energy) <= tol && jumps < best_jumps)) {
      best.energy = e;
      best.assignment = a;
      best_jumps = jumps;
    }
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++a[pos] < l) break;
      a[pos] = 0;
      if (pos == 0) return best;
    }
  }
}

// Largest violation of the optimality conditions of
//   sum |u_{i+1} - u_i| + (1/2) sum c_i (u_i - f_i)^2.
// The dual z_i = sum_{k<=i} c_k (u_k - f_k) must stay in [-1, 1], equal
// sign(u_{i+1} - u_i) where u jumps, and vanish at the end.
inline double rof_kkt_violation(const std::vector<double>& f, const std::vector<double>& c,
                                const std::vector<double>& u) {
  double z = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    z += c[i] * (u[i] - f[i]);
    if (i + 1 == f.size()) {
      worst = std::max(worst, std::abs(z));
      break;
    }
    worst = std::max(worst, std::abs(z) - 1.0);
    const double d = u[i + 1] - u[i];
    if (d > 1e-12) worst = std::max(worst, std::abs(z - 1.0));
    if (d < -1e-12) worst = std::max(worst, std::abs(z + 1.0));
  }
  return worst;
}

inline std::vector<double> uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace oracle
