#include "tvk/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tvk/errors.hpp"

namespace tvk {

JumpPenalty JumpPenalty::linear() { return JumpPenalty(PenaltyKind::Linear, 1.0); }

JumpPenalty JumpPenalty::rho_over_one_plus_rho() {
  return JumpPenalty(PenaltyKind::RhoOverOnePlusRho, 1.0);
}

JumpPenalty JumpPenalty::tabulated(double rho_max, std::vector<double> values, double s,
                                   std::vector<double> minimizers) {
  if (!(rho_max > 0.0) || values.size() < 2) {
    throw ValidationError("tabulated penalty needs rho_max > 0 and at least two nodes");
  }
  if (values.front() != 0.0) throw ValidationError("tabulated penalty must satisfy K(0) = 0");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      std::ostringstream msg;
      msg << "tabulated penalty is not strictly increasing at node " << i;
      throw ValidationError(msg.str());
    }
  }
  if (!minimizers.empty() && minimizers.size() != values.size()) {
    throw ValidationError("minimizer table size does not match the penalty table");
  }
  JumpPenalty p(PenaltyKind::FromPotential, s);
  p.node_step_ = rho_max / static_cast<double>(values.size() - 1);
  p.table_ = std::move(values);
  p.minimizers_ = std::move(minimizers);
  return p;
}

double JumpPenalty::rho_max() const noexcept {
  if (kind_ == PenaltyKind::FromPotential) {
    return node_step_ * static_cast<double>(table_.size() - 1);
  }
  return std::numeric_limits<double>::infinity();
}

std::string JumpPenalty::name() const {
  switch (kind_) {
    case PenaltyKind::Linear:
      return "linear";
    case PenaltyKind::RhoOverOnePlusRho:
      return "rho-over-1+rho";
    case PenaltyKind::FromPotential:
      return "from-potential";
  }
  return "unknown";
}

double JumpPenalty::operator()(double rho) const {
  if (!(rho >= 0.0)) throw DomainError("jump size must be nonnegative");
  if (rho == 0.0) return 0.0;
  switch (kind_) {
    case PenaltyKind::Linear:
      return rho;
    case PenaltyKind::RhoOverOnePlusRho:
      return rho / (1.0 + rho);
    case PenaltyKind::FromPotential: {
      const std::size_t last = table_.size() - 1;
      const double pos = rho / node_step_;
      // Allow a few ulps of slack at the upper end.
      if (pos > static_cast<double>(last) * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "jump size " << rho << " exceeds tabulated range " << rho_max();
        throw RangeError(msg.str());
      }
      const double nearest = std::round(pos);
      if (std::abs(pos - nearest) <= 1e-9 * std::max(1.0, nearest)) {
        return table_[std::min(last, static_cast<std::size_t>(nearest))];
      }
      const auto i = std::min(last - 1, static_cast<std::size_t>(pos));
      const double t = pos - static_cast<double>(i);
      return table_[i] + t * (table_[i + 1] - table_[i]);
    }
  }
  return 0.0;
}

double eval_penalty(const JumpPenalty& p, double rho) { return p(rho); }

double subadditivity_gap(const JumpPenalty& p, double rho1, double rho2) {
  if (!(rho1 >= 0.0) || !(rho2 >= 0.0)) throw DomainError("jump sizes must be nonnegative");
  return p(rho1) + p(rho2) - p(rho1 + rho2);
}

namespace {

struct CertGrid {
  std::vector<double> rho;  // rho[0] == 0
  std::vector<double> k;
  double step = 0.0;
};

// Uniform grid 0 = rho_0 < ... < rho_n = M' with n even and M' >= M.
CertGrid make_grid(const JumpPenalty& p, double M, double grid_step) {
  if (!(M > 0.0)) throw ValidationError("certification bound M must be positive");
  if (!(grid_step > 0.0)) throw ValidationError("certification grid step must be positive");
  CertGrid grid;
  if (p.is_tabulated()) {
    const double h = p.node_step();
    const auto per_step = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(grid_step / h)));
    const auto needed = static_cast<std::size_t>(std::ceil(M / h - 1e-9));
    const std::size_t block = 2 * per_step;
    const std::size_t nodes = block * ((needed + block - 1) / block);
    if (nodes >= p.table().size()) {
      std::ostringstream msg;
      msg << "certification bound " << M << " exceeds tabulated range " << p.rho_max();
      throw RangeError(msg.str());
    }
    const std::size_t n = nodes / per_step;
    grid.step = h * static_cast<double>(per_step);
    for (std::size_t i = 0; i <= n; ++i) {
      grid.rho.push_back(h * static_cast<double>(i * per_step));
      grid.k.push_back(p.table()[i * per_step]);
    }
    return grid;
  }
  std::size_t n = static_cast<std::size_t>(std::ceil(M / (2.0 * grid_step))) * 2;
  n = std::max<std::size_t>(n, 2);
  grid.step = M / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    const double rho = M * static_cast<double>(i) / static_cast<double>(n);
    grid.rho.push_back(rho);
    grid.k.push_back(p(rho));
  }
  return grid;
}

}  // namespace

PenaltyCertificate certify(const JumpPenalty& p, double M, double grid_step, double safety_factor) {
  if (!(safety_factor > 0.0 && safety_factor <= 1.0)) {
    throw ValidationError("safety factor must lie in (0, 1]");
  }
  const CertGrid grid = make_grid(p, M, grid_step);
  const std::size_t n = grid.rho.size() - 1;

  double linear_inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= n; ++i) {
    linear_inf = std::min(linear_inf, grid.k[i] / grid.rho[i]);
  }
  double sub_inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= n / 2; ++i) {
    for (std::size_t j = i; i + j <= n; ++j) {
      const double gap = grid.k[i] + grid.k[j] - grid.k[i + j];
      sub_inf = std::min(sub_inf, gap / (grid.rho[i] * grid.rho[j]));
    }
  }
  if (!(linear_inf > 0.0)) {
    throw CertificationError("(K3) certification failed: c_M nonpositive");
  }
  if (!(sub_inf > 0.0)) {
    throw CertificationError("(K2) certification failed: C_M nonpositive");
  }
  PenaltyCertificate cert;
  cert.M = M;
  cert.c_M = safety_factor * linear_inf;
  cert.C_M = safety_factor * sub_inf;
  cert.A_M = std::min(cert.c_M / M, 2.0 * cert.C_M);
  cert.grid_resolution = grid.step;
  cert.safety_factor = safety_factor;
  return cert;
}

LowerGapReport check_lower_gap(const JumpPenalty& p, const PenaltyCertificate& cert,
                               double grid_step) {
  const CertGrid grid = make_grid(p, cert.M, grid_step);
  LowerGapReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < grid.rho.size(); ++i) {
    const double rho = grid.rho[i];
    if (rho > cert.M) break;
    const double margin = rho - grid.k[i] - cert.C_M * rho * rho / 2.0;
    ++report.points;
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      report.worst_rho = rho;
    }
    if (margin < 0.0) ++report.failures;
  }
  report.pass = report.failures == 0;
  return report;
}

}  // namespace tvk
