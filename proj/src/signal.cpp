#include "tvk/signal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tvk/errors.hpp"

namespace tvk {

Signal::Signal(double a, double b, std::vector<double> samples, double lambda, Interpolation interp)
    : a_(a), b_(b), samples_(std::move(samples)), lambda_(lambda), interp_(interp) {
  if (!(a_ < b_) || !std::isfinite(a_) || !std::isfinite(b_)) {
    throw ValidationError("signal interval must satisfy a < b");
  }
  if (samples_.empty()) throw ValidationError("signal needs at least one sample");
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw ValidationError("lambda must be positive");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      std::ostringstream msg;
      msg << "signal sample " << i << " is not finite";
      throw ValidationError(msg.str());
    }
  }
  const auto [lo, hi] = std::minmax_element(samples_.begin(), samples_.end());
  min_ = *lo;
  max_ = *hi;
}

Signal Signal::sample(const std::function<double(double)>& f, double a, double b, std::size_t n,
                      double lambda, Interpolation interp) {
  if (n == 0) throw ValidationError("signal needs at least one sample");
  std::vector<double> values(n);
  const double h = (b - a) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = f(a + (static_cast<double>(i) + 0.5) * h);
  }
  return Signal(a, b, std::move(values), lambda, interp);
}

double Signal::cell_left(std::size_t i) const noexcept {
  return a_ + (b_ - a_) * static_cast<double>(i) / static_cast<double>(samples_.size());
}

double Signal::cell_right(std::size_t i) const noexcept {
  if (i + 1 == samples_.size()) return b_;
  return cell_left(i + 1);
}

double Signal::cell_center(std::size_t i) const noexcept {
  return a_ + (b_ - a_) * (static_cast<double>(i) + 0.5) / static_cast<double>(samples_.size());
}

bool Signal::nondecreasing() const noexcept {
  return std::is_sorted(samples_.begin(), samples_.end());
}

bool Signal::nonincreasing() const noexcept {
  return std::is_sorted(samples_.begin(), samples_.end(), std::greater<>());
}

double Signal::max_increment() const noexcept {
  double m = 0.0;
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    m = std::max(m, std::abs(samples_[i] - samples_[i - 1]));
  }
  return m;
}

Signal Signal::with_lambda(double lambda) const {
  return Signal(a_, b_, samples_, lambda, interp_);
}

namespace {

struct Piece {
  double lo;
  double hi;
  double g_lo;
  double g_hi;
};

}  // namespace

// Piece k of g. For piecewise-constant data the pieces are the cells; for
// linear data piece 0 is [a, c_0], piece k is [c_{k-1}, c_k], piece N is
// [c_{N-1}, b], where c_i are the cell centers.
static Piece piece_of(const Signal& g, std::size_t k) {
  const auto s = g.samples();
  const std::size_t n = s.size();
  if (g.interpolation() == Interpolation::PiecewiseConstantCells) {
    return {g.cell_left(k), g.cell_right(k), s[k], s[k]};
  }
  if (k == 0) return {g.a(), g.cell_center(0), s[0], s[0]};
  if (k == n) return {g.cell_center(n - 1), g.b(), s[n - 1], s[n - 1]};
  return {g.cell_center(k - 1), g.cell_center(k), s[k - 1], s[k]};
}

static std::size_t piece_count(const Signal& g) {
  return g.interpolation() == Interpolation::PiecewiseConstantCells ? g.size() : g.size() + 1;
}

static std::size_t piece_index(const Signal& g, double x) {
  const double t = (x - g.a()) / g.cell_width();
  const std::size_t count = piece_count(g);
  double k = g.interpolation() == Interpolation::PiecewiseConstantCells ? std::floor(t)
                                                                        : std::floor(t + 0.5);
  if (!(k > 0.0)) return 0;
  auto idx = static_cast<std::size_t>(k);
  if (idx >= count) idx = count - 1;
  // Guard against rounding in the index arithmetic.
  while (idx > 0 && x < piece_of(g, idx).lo) --idx;
  while (idx + 1 < count && x >= piece_of(g, idx).hi) ++idx;
  return idx;
}

double Signal::value_at(double x) const {
  const Piece p = piece_of(*this, piece_index(*this, x));
  if (p.g_lo == p.g_hi) return p.g_lo;
  const double t = std::clamp((x - p.lo) / (p.hi - p.lo), 0.0, 1.0);
  return p.g_lo + t * (p.g_hi - p.g_lo);
}

void Signal::for_each_piece(double x0, double x1,
                            const std::function<void(double, double, double, double)>& fn) const {
  x0 = std::max(x0, a_);
  x1 = std::min(x1, b_);
  if (!(x1 > x0)) return;
  const std::size_t count = piece_count(*this);
  for (std::size_t k = piece_index(*this, x0); k < count; ++k) {
    const Piece p = piece_of(*this, k);
    if (p.lo >= x1) break;
    const double lo = std::max(p.lo, x0);
    const double hi = std::min(p.hi, x1);
    if (!(hi > lo)) continue;
    double g_lo = p.g_lo;
    double g_hi = p.g_hi;
    if (p.g_lo != p.g_hi) {
      const double width = p.hi - p.lo;
      g_lo = p.g_lo + (p.g_hi - p.g_lo) * ((lo - p.lo) / width);
      g_hi = p.g_lo + (p.g_hi - p.g_lo) * ((hi - p.lo) / width);
    }
    fn(lo, hi, g_lo, g_hi);
  }
}

std::vector<double> Signal::knots(double x0, double x1) const {
  std::vector<double> out;
  const std::size_t count = piece_count(*this);
  for (std::size_t k = 1; k < count; ++k) {
    const double x = piece_of(*this, k).lo;
    if (x > x0 && x < x1) out.push_back(x);
  }
  return out;
}

double Signal::squared_error(double v, double x0, double x1) const {
  double total = 0.0;
  for_each_piece(x0, x1, [&](double lo, double hi, double g_lo, double g_hi) {
    const double d0 = v - g_lo;
    const double d1 = v - g_hi;
    total += (hi - lo) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
  });
  return total;
}

Signal::Moments Signal::moments(double x0, double x1) const {
  Moments m{0.0, 0.0, 0.0};
  for_each_piece(x0, x1, [&](double lo, double hi, double g_lo, double g_hi) {
    const double w = hi - lo;
    m.length += w;
    m.sum += w * (g_lo + g_hi) / 2.0;
    m.sum_sq += w * (g_lo * g_lo + g_lo * g_hi + g_hi * g_hi) / 3.0;
  });
  return m;
}

PiecewiseConstantFn PiecewiseConstantFn::constant(double a, double b, double value) {
  return PiecewiseConstantFn{a, b, {}, {value}};
}

double PiecewiseConstantFn::value_at(double x) const {
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return values[static_cast<std::size_t>(it - breakpoints.begin())];
}

std::vector<double> PiecewiseConstantFn::jump_sizes() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < values.size(); ++i) out.push_back(std::abs(values[i] - values[i - 1]));
  return out;
}

double PiecewiseConstantFn::max_jump() const {
  double m = 0.0;
  for (const double r : jump_sizes()) m = std::max(m, r);
  return m;
}

bool PiecewiseConstantFn::nondecreasing() const {
  return std::is_sorted(values.begin(), values.end());
}

bool PiecewiseConstantFn::nonincreasing() const {
  return std::is_sorted(values.begin(), values.end(), std::greater<>());
}

PiecewiseConstantFn canonicalize(const PiecewiseConstantFn& u) {
  if (!(u.a < u.b)) throw ValidationError("piecewise constant function needs a < b");
  if (u.values.size() != u.breakpoints.size() + 1) {
    throw ValidationError("piecewise constant function needs one more value than breakpoints");
  }
  if (!std::is_sorted(u.breakpoints.begin(), u.breakpoints.end())) {
    throw ValidationError("breakpoints are not sorted");
  }
  for (const double x : u.breakpoints) {
    if (x < u.a || x > u.b) throw ValidationError("breakpoint outside [a, b]");
  }
  const double tol = kBreakpointTolerance * (u.b - u.a);

  struct Facet {
    double lo;
    double hi;
    double value;
  };
  std::vector<Facet> facets;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double lo = u.facet_left(i);
    const double hi = u.facet_right(i);
    if (hi - lo <= tol) continue;
    if (!facets.empty()) {
      // Absorb any gap left by dropped facets into the previous facet.
      facets.back().hi = lo;
    }
    facets.push_back({lo, hi, u.values[i]});
  }
  if (facets.empty()) {
    return PiecewiseConstantFn::constant(u.a, u.b, u.values.front());
  }
  facets.front().lo = u.a;
  facets.back().hi = u.b;

  PiecewiseConstantFn out{u.a, u.b, {}, {facets.front().value}};
  for (std::size_t i = 1; i < facets.size(); ++i) {
    if (facets[i].value == out.values.back()) continue;
    out.breakpoints.push_back(facets[i].lo);
    out.values.push_back(facets[i].value);
  }
  return out;
}

double tv_k_energy(const PiecewiseConstantFn& u, const JumpPenalty& p) {
  double total = 0.0;
  for (std::size_t i = 1; i < u.values.size(); ++i) {
    total += p(std::abs(u.values[i] - u.values[i - 1]));
  }
  return total;
}

double fidelity(const PiecewiseConstantFn& u, const Signal& g) {
  const double tol = kBreakpointTolerance * (g.b() - g.a());
  if (std::abs(u.a - g.a()) > tol || std::abs(u.b - g.b()) > tol) {
    throw ValidationError("function and signal are defined on different intervals");
  }
  if (u.values.size() != u.breakpoints.size() + 1) {
    throw ValidationError("piecewise constant function needs one more value than breakpoints");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    total += g.squared_error(u.values[i], u.facet_left(i), u.facet_right(i));
  }
  return 0.5 * g.lambda() * total;
}

EnergyBreakdown total_energy(const PiecewiseConstantFn& u, const Signal& g, const JumpPenalty& p) {
  EnergyBreakdown e;
  e.tv_k = tv_k_energy(u, p);
  e.fidelity = fidelity(u, g);
  e.total = e.tv_k + e.fidelity;
  return e;
}

}  // namespace tvk
