#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tvk/penalty.hpp"
#include "tvk/signal.hpp"

namespace tvk {

/// A maximal piece of the coincidence set {|u - g| <= eps} inside one facet,
/// or an isolated crossing of g through the facet value (lo == hi).
struct CoincidenceItem {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;  // u on the facet that produced the item
  std::size_t facet = 0;
  /// g jumps across the facet value here (piecewise-constant data), so u
  /// does not meet g at a point of continuity.
  bool data_jump = false;
};

/// Default coincidence threshold.
constexpr double kDefaultCoincidenceEps = 1e-9;

std::vector<CoincidenceItem> coincidence_set(const PiecewiseConstantFn& u, const Signal& g,
                                             double eps = kDefaultCoincidenceEps);

struct CheckResult {
  std::string name;
  bool pass = true;
  /// Soft checks are reported but do not fail the report.
  bool hard = true;
  /// Smallest slack over everything the check inspected; negative on failure.
  double margin = 0.0;
  /// Interval or location where the worst case occurred.
  std::string witness;
};

struct SpacingViolation {
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t jumps = 0;
  std::size_t values = 0;
};

struct StructureOptions {
  double eps = kDefaultCoincidenceEps;
  /// Slack for integral inequalities, scaled by (b - a) max(1, osc g)^2.
  double integral_tol = 1e-12;
  /// Slack for the midpoint rule; negative selects the data's own increment
  /// for linear data and 1e-9 for piecewise-constant data.
  double midpoint_tol = -1.0;
  /// Cap on coincidence endpoints used for the pairwise fidelity check.
  std::size_t max_pair_points = 400;
};

struct StructureReport {
  std::size_t jumps = 0;
  std::size_t budget = 0;
  EnergyBreakdown energy;
  std::optional<std::size_t> monotone_budget;
  std::optional<bool> monotone_ok;
  bool range_ok = true;
  std::vector<CoincidenceItem> coincidence;
  std::vector<double> facet_average_margins;
  std::vector<SpacingViolation> spacing_violations;
  std::vector<double> pmf_residuals;
  /// Sorted by name.
  std::vector<CheckResult> checks;
  bool pass = true;

  const CheckResult* find(const std::string& name) const;
};

/// Runs every structure check on a candidate minimizer. Throws
/// ValidationError if cert.M < osc(g); otherwise failures are report content.
StructureReport check_structure(const PiecewiseConstantFn& u, const Signal& g, const JumpPenalty& p,
                                const PenaltyCertificate& cert, const StructureOptions& options = {});

struct TvkLowerResult {
  bool pass = true;
  double tv_k = 0.0;
  double bound = 0.0;  // K(|u(x_hi) - u(x_lo)|)
};

/// TV_K of u on (x_lo, x_hi) against K of the net change. Throws RefusalError
/// if an endpoint sits on a breakpoint.
TvkLowerResult check_tvk_lower(const PiecewiseConstantFn& u, const JumpPenalty& p, double x_lo,
                               double x_hi);

struct GapAuditEntry {
  double delta = 0.0;
  double excess = 0.0;         // E(U_delta) - E(U_0) on the bracket
  double bound = 0.0;          // C* delta (1 - delta) rho^2
  double fid_decrease = 0.0;   // int (U_0 - g)^2 - int (U_delta - g)^2
  double fid_bound = 0.0;      // delta (1 - delta) rho^2 (beta - alpha)
  double margin = 0.0;         // excess - bound
  double fid_margin = 0.0;     // fid_bound - fid_decrease
};

struct GapAuditReport {
  bool skipped = false;
  std::string notice;
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  double c_star = 0.0;
  std::vector<GapAuditEntry> entries;
  bool pass = true;
};

/// Two-jump competitors against the best one-jump profile on [alpha, beta]
/// for nondecreasing data. Skips (with a notice) when C* = C_M - (beta -
/// alpha) lambda / 2 <= 0. Throws ValidationError if g is not nondecreasing
/// on the bracket.
GapAuditReport monotone_gap_audit(const Signal& g, double alpha, double beta, const JumpPenalty& p,
                                  const PenaltyCertificate& cert,
                                  const std::vector<double>& deltas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6,
                                                                       0.7, 0.8, 0.9});

/// Certifies p on [0, M] first; throws CertificationError when that fails.
GapAuditReport monotone_gap_audit(const Signal& g, double alpha, double beta, const JumpPenalty& p,
                                  double M);

struct CompetitorAuditReport {
  bool skipped = false;
  std::string notice;
  double c_star = 0.0;
  std::size_t competitors = 0;
  double worst_margin = 0.0;
  bool pass = true;
};

/// Random nondecreasing competitors with at least two jumps on [alpha,
/// beta]: their energy excess over the best one-jump profile must be at least
/// (C*/2)(rho^2 - sum rho_i^2).
CompetitorAuditReport competitor_audit(const Signal& g, double alpha, double beta,
                                       const JumpPenalty& p, const PenaltyCertificate& cert,
                                       std::uint64_t seed, std::size_t count = 200);

/// (lambda/2) int_alpha^beta (u - g)^2 plus K of the jumps inside (alpha, beta).
double energy_on_bracket(const PiecewiseConstantFn& u, const Signal& g, const JumpPenalty& p,
                         double alpha, double beta);

}  // namespace tvk
