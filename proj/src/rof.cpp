#include "tvk/rof.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "tvk/errors.hpp"

namespace tvk {

namespace {

// Nondecreasing continuous piecewise-linear function D(u), stored as pieces
// with their right end. Every piece carries an implicit shared linear term
// (shared_slope * u + shared_icpt) so that adding c (u - g) to all pieces is
// O(1).
class Derivative {
 public:
  explicit Derivative(double c, double g) {
    pieces_.push_back({kInf, 0.0, 0.0});
    shared_slope_ = c;
    shared_icpt_ = -c * g;
  }

  void add_quadratic(double c, double g) {
    shared_slope_ += c;
    shared_icpt_ -= c * g;
  }

  // Clamps D to [-1, 1]; returns the points where D crosses -1 and +1.
  std::pair<double, double> clamp_unit() {
    const double lower = cut_front(-1.0);
    const double upper = cut_back(1.0);
    return {lower, upper};
  }

  double root() const { return solve(find_from_front(0.0), 0.0); }

 private:
  struct Piece {
    double hi;
    double slope;
    double icpt;
  };
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  double eval(const Piece& p, double u) const {
    return (p.slope + shared_slope_) * u + (p.icpt + shared_icpt_);
  }
  double solve(const Piece& p, double level) const {
    return (level - (p.icpt + shared_icpt_)) / (p.slope + shared_slope_);
  }
  Piece constant(double hi, double level) const { return {hi, -shared_slope_, level - shared_icpt_}; }

  const Piece& find_from_front(double level) const {
    for (const auto& p : pieces_) {
      if (p.hi == kInf || eval(p, p.hi) >= level) return p;
    }
    return pieces_.back();
  }

  double cut_front(double level) {
    while (pieces_.size() > 1 && eval(pieces_.front(), pieces_.front().hi) < level) {
      pieces_.pop_front();
    }
    const double t = solve(pieces_.front(), level);
    pieces_.push_front(constant(t, level));
    return t;
  }

  double cut_back(double level) {
    // Left end of piece k is the right end of piece k-1.
    while (pieces_.size() > 1) {
      const double lo = pieces_[pieces_.size() - 2].hi;
      if (eval(pieces_.back(), lo) > level) {
        pieces_.pop_back();
        pieces_.back().hi = kInf;
      } else {
        break;
      }
    }
    const double t = solve(pieces_.back(), level);
    pieces_.back().hi = t;
    pieces_.push_back(constant(kInf, level));
    return t;
  }

  std::deque<Piece> pieces_;
  double shared_slope_ = 0.0;
  double shared_icpt_ = 0.0;
};

}  // namespace

std::vector<double> solve_rof_weighted(const std::vector<double>& data,
                                       const std::vector<double>& weights) {
  const std::size_t n = data.size();
  if (n == 0) throw ValidationError("ROF needs at least one sample");
  if (weights.size() != n) throw ValidationError("ROF weights must match the data length");
  for (const double c : weights) {
    if (!(c > 0.0)) throw ValidationError("ROF weights must be positive");
  }
  // Forward messages m_k(u) = min over u_0..u_{k-1} of the partial energy with
  // u_k = u. Their derivatives are clamped to [-1, 1] by the |.| coupling;
  // the clamp points bound the optimal predecessor.
  Derivative d(weights[0], data[0]);
  std::vector<double> lower(n > 0 ? n - 1 : 0);
  std::vector<double> upper(n > 0 ? n - 1 : 0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const auto [lo, hi] = d.clamp_unit();
    lower[k] = lo;
    upper[k] = hi;
    d.add_quadratic(weights[k + 1], data[k + 1]);
  }
  std::vector<double> u(n);
  u[n - 1] = d.root();
  for (std::size_t k = n - 1; k-- > 0;) u[k] = std::clamp(u[k + 1], lower[k], upper[k]);
  return u;
}

RofSolution solve_rof(const Signal& g) {
  const std::size_t n = g.size();
  std::vector<double> data(g.samples().begin(), g.samples().end());
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) weights[i] = g.lambda() * (g.cell_right(i) - g.cell_left(i));

  RofSolution sol;
  sol.cell_values = solve_rof_weighted(data, weights);
  PiecewiseConstantFn u{g.a(), g.b(), {}, {sol.cell_values.front()}};
  for (std::size_t i = 1; i < n; ++i) {
    if (sol.cell_values[i] != sol.cell_values[i - 1]) {
      u.breakpoints.push_back(g.cell_left(i));
      u.values.push_back(sol.cell_values[i]);
    }
  }
  sol.u = canonicalize(u);
  double tv = 0.0;
  double fid = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) tv += std::abs(sol.cell_values[i] - sol.cell_values[i - 1]);
    const double r = sol.cell_values[i] - data[i];
    fid += weights[i] * r * r;
  }
  sol.energy = tv + 0.5 * fid;
  return sol;
}

double max_jump(const PiecewiseConstantFn& u) { return u.max_jump(); }

double max_jump(const std::vector<double>& cell_values) {
  double m = 0.0;
  for (std::size_t i = 1; i < cell_values.size(); ++i) {
    m = std::max(m, std::abs(cell_values[i] - cell_values[i - 1]));
  }
  return m;
}

}  // namespace tvk
