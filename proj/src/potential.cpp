#include "tvk/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tvk/errors.hpp"
#include "tvk/quadrature.hpp"

namespace tvk {

namespace {

constexpr double kQuadRelTol = 1e-10;
constexpr double kWellTol = 1e-9;

}  // namespace

Potential::Potential(std::string name, std::function<double(double)> f, double x_max, double g_step)
    : name_(std::move(name)), f_(std::move(f)), x_max_(x_max), g_step_(g_step) {
  if (!(x_max_ >= 1.0)) throw ValidationError("potential must be defined on [0, x_max] with x_max >= 1");
  if (!(g_step_ > 0.0 && g_step_ <= 0.1)) throw ValidationError("G table step must lie in (0, 0.1]");
  validate();
  build_g_table();
}

Potential Potential::quadratic_well(double g_step) {
  return Potential("quadratic-well", [](double x) { return (x - 1.0) * (x - 1.0); }, 2.0, g_step);
}

Potential Potential::abs_power(double m, double g_step) {
  if (!(m > 0.0)) throw ValidationError("abs-power exponent must be positive");
  std::ostringstream name;
  name << "abs-power:" << m;
  return Potential(name.str(), [m](double x) { return std::pow(std::abs(x - 1.0), m); }, 2.0, g_step);
}

Potential Potential::from_samples(std::vector<double> x, std::vector<double> f, double g_step) {
  if (x.size() != f.size() || x.size() < 2) throw ValidationError("potential table needs matching x and F columns");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw ValidationError("potential table x column must be strictly increasing");
  }
  if (x.front() > 0.0 || x.back() < 1.0) throw ValidationError("potential table must cover [0, 1]");
  const double x_max = x.back();
  auto interp = [xs = std::move(x), fs = std::move(f)](double t) {
    if (t <= xs.front()) return fs.front();
    if (t >= xs.back()) return fs.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), t);
    const auto i = static_cast<std::size_t>(it - xs.begin());
    const double w = (t - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return fs[i - 1] + w * (fs[i] - fs[i - 1]);
  };
  return Potential("table", interp, x_max, g_step);
}

Potential Potential::from_function(std::string name, std::function<double(double)> f, double x_max,
                                   double g_step) {
  return Potential(std::move(name), std::move(f), x_max, g_step);
}

void Potential::validate() const {
  if (std::abs(f_(1.0)) > kWellTol) throw ValidationError("(F1) violated: F(1) != 0");
  const auto samples = static_cast<std::size_t>(std::ceil(1.0 / g_step_));
  double prev = f_(0.0);
  if (!std::isfinite(prev) || prev <= 0.0) throw ValidationError("(F1) violated: F(0) must be positive");
  for (std::size_t i = 1; i < samples; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(samples);
    const double fx = f_(x);
    if (!std::isfinite(fx) || fx <= 0.0) {
      std::ostringstream msg;
      msg << "(F1) violated: F(" << x << ") = " << fx << " is not positive";
      throw ValidationError(msg.str());
    }
    if (!(fx < prev)) {
      std::ostringstream msg;
      msg << "(F2) violated: F is not strictly decreasing near x = " << x;
      throw ValidationError(msg.str());
    }
    prev = fx;
  }
  const std::size_t upper = static_cast<std::size_t>(std::ceil((x_max_ - 1.0) / g_step_));
  for (std::size_t i = 1; i <= upper; ++i) {
    const double x = std::min(x_max_, 1.0 + static_cast<double>(i) * g_step_);
    const double fx = f_(x);
    if (!std::isfinite(fx) || fx <= 0.0) {
      std::ostringstream msg;
      msg << "(F1) violated: F(" << x << ") = " << fx << " is not positive";
      throw ValidationError(msg.str());
    }
  }
}

double Potential::sqrt_f_integral(double lo, double hi) const {
  return adaptive_trapezoid([this](double t) { return std::sqrt(std::max(0.0, f_(t))); }, lo, hi,
                            kQuadRelTol, 1e-300);
}

void Potential::build_g_table() {
  const auto n = static_cast<std::size_t>(std::llround(1.0 / g_step_));
  g_step_ = 1.0 / static_cast<double>(n);
  g_table_.assign(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) {
    const double lo = static_cast<double>(j) / static_cast<double>(n);
    const double hi = static_cast<double>(j + 1) / static_cast<double>(n);
    g_table_[j] = g_table_[j + 1] + sqrt_f_integral(lo, hi);
  }
}

double Potential::G(double xi) const {
  if (!(xi >= 0.0) || xi > x_max_) {
    std::ostringstream msg;
    msg << "G evaluated at " << xi << " outside [0, " << x_max_ << "]";
    throw RangeError(msg.str());
  }
  if (xi >= 1.0) return sqrt_f_integral(1.0, xi);
  const std::size_t n = g_table_.size() - 1;
  const auto j = std::min(n - 1, static_cast<std::size_t>(xi * static_cast<double>(n)));
  const double node = static_cast<double>(j + 1) / static_cast<double>(n);
  return g_table_[j + 1] + sqrt_f_integral(xi, node);
}

PenaltyMinimum minimize_penalty_objective(const Potential& F, double s, double rho, double tol) {
  if (!(rho >= 0.0)) throw DomainError("jump size must be nonnegative");
  if (rho == 0.0) return {0.0, 1.0};
  const auto& table = F.g_table();
  const std::size_t n = table.size() - 1;
  const double h = F.g_step();
  std::size_t best = n;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= n; ++j) {
    const double xi = static_cast<double>(j) * h;
    const double value = s * xi * xi * rho + 2.0 * table[j];
    if (value < best_value) {
      best_value = value;
      best = j;
    }
  }
  const double lo = best == 0 ? 0.0 : static_cast<double>(best - 1) * h;
  const double hi = best == n ? 1.0 : static_cast<double>(best + 1) * h;
  const auto objective = [&](double xi) { return s * xi * xi * rho + 2.0 * F.G(xi); };
  const ScalarMin refined = golden_section(objective, lo, hi, tol);
  if (refined.value < best_value) return {refined.value, refined.x};
  return {best_value, static_cast<double>(best) * h};
}

JumpPenalty build_from_potential(const Potential& F, double s, double rho_max, double tol,
                                 double rho_node_step) {
  if (!(s > 0.0)) throw ValidationError("weight s must be positive");
  if (!(rho_max > 0.0)) throw ValidationError("rho_max must be positive");
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (!(rho_node_step > 0.0)) throw ValidationError("rho node step must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(rho_max / rho_node_step - 1e-9));
  std::vector<double> values(n + 1, 0.0);
  std::vector<double> minimizers(n + 1, 1.0);
  for (std::size_t i = 1; i <= n; ++i) {
    const double rho = rho_max * static_cast<double>(i) / static_cast<double>(n);
    const PenaltyMinimum m = minimize_penalty_objective(F, s, rho, tol);
    values[i] = m.value;
    minimizers[i] = m.xi;
  }
  return JumpPenalty::tabulated(rho_max, std::move(values), s, std::move(minimizers));
}

std::vector<double> default_probe_steps() {
  return {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
}

namespace {

double loglog_slope(const std::vector<PotentialProbe>& probes) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(probes.size());
  for (const auto& p : probes) {
    const double x = std::log(p.step);
    const double y = std::log(p.value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

// min{x in [0, 1] : F(x) = y} for F decreasing on [0, 1].
double inverse_on_well(const Potential& F, double y) {
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (F.F(mid) > y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PotentialReport verify_potential(const Potential& F, const std::vector<double>& probe_steps,
                                 double slope_tolerance) {
  if (probe_steps.size() < 2) throw ValidationError("at least two probe steps are required");
  for (std::size_t i = 0; i < probe_steps.size(); ++i) {
    if (!(probe_steps[i] > 0.0 && probe_steps[i] < 1.0)) {
      throw ValidationError("probe steps must lie in (0, 1)");
    }
    if (i > 0 && !(probe_steps[i] < probe_steps[i - 1])) {
      throw ValidationError("probe steps must be decreasing");
    }
  }
  PotentialReport report;
  report.slope_tolerance = slope_tolerance;
  report.limsup_ratio = 0.0;
  for (const double step : probe_steps) {
    const double x = 1.0 - step;
    const double h = step * 1e-3;
    const double derivative = (F.F(x + h) - F.F(x - h)) / (2.0 * h);
    const double ratio = derivative / (x - 1.0);
    if (!(ratio > 0.0)) {
      std::ostringstream msg;
      msg << "(F2) violated: F is not decreasing at x = " << x;
      throw ValidationError(msg.str());
    }
    report.derivative_ratio.push_back({step, ratio});
    report.limsup_ratio = std::max(report.limsup_ratio, ratio);
  }
  report.liminf_quotient = std::numeric_limits<double>::infinity();
  for (const double rho : probe_steps) {
    const double level = rho * rho;
    if (level >= F.F(0.0)) continue;
    const double x_rho = inverse_on_well(F, level);
    const double quotient = F.G(x_rho) / level;
    report.well_quotient.push_back({rho, quotient});
    report.liminf_quotient = std::min(report.liminf_quotient, quotient);
  }
  if (report.well_quotient.size() < 2) {
    throw ValidationError("probe steps too large for the depth of the well");
  }
  report.ratio_slope = loglog_slope(report.derivative_ratio);
  report.quotient_slope = loglog_slope(report.well_quotient);
  report.ratio_ok = report.ratio_slope >= -slope_tolerance;
  report.quotient_ok = report.liminf_quotient > 0.0 && report.quotient_slope <= slope_tolerance;
  report.pass = report.ratio_ok && report.quotient_ok;
  return report;
}

}  // namespace tvk
