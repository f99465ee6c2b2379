#pragma once

#include <string>
#include <vector>

namespace tvk {

enum class PenaltyKind { Linear, RhoOverOnePlusRho, FromPotential };

/// Jump penalty K: the cost charged for a jump of size rho.
///
/// Closed-form kinds evaluate directly. Tabulated kinds (FromPotential) hold
/// K on a uniform rho grid [0, rho_max] and interpolate linearly between
/// nodes, which keeps K monotone whenever the node values are.
///
/// Instances are immutable after construction.
class JumpPenalty {
 public:
  static JumpPenalty linear();
  static JumpPenalty rho_over_one_plus_rho();

  /// Tabulated penalty on nodes rho_i = i * rho_max / (values.size() - 1).
  /// `minimizers` holds the order-parameter value attaining each node (may be
  /// empty). Throws ValidationError unless values[0] == 0 and the values are
  /// strictly increasing.
  static JumpPenalty tabulated(double rho_max, std::vector<double> values, double s,
                               std::vector<double> minimizers = {});

  /// K(rho). Throws DomainError for rho < 0 and RangeError above rho_max.
  double operator()(double rho) const;

  PenaltyKind kind() const noexcept { return kind_; }
  std::string name() const;
  double s() const noexcept { return s_; }

  /// Upper end of the admissible rho range (infinite for closed forms).
  double rho_max() const noexcept;
  bool is_tabulated() const noexcept { return kind_ == PenaltyKind::FromPotential; }
  /// Spacing of the table nodes; zero for closed forms.
  double node_step() const noexcept { return node_step_; }
  const std::vector<double>& table() const noexcept { return table_; }
  const std::vector<double>& minimizers() const noexcept { return minimizers_; }

 private:
  JumpPenalty(PenaltyKind kind, double s) : kind_(kind), s_(s) {}

  PenaltyKind kind_;
  double s_ = 1.0;
  double node_step_ = 0.0;
  std::vector<double> table_;
  std::vector<double> minimizers_;
};

/// Evaluates K(rho); K(0) == 0 exactly for every kind.
double eval_penalty(const JumpPenalty& p, double rho);

/// K(rho1) + K(rho2) - K(rho1 + rho2).
double subadditivity_gap(const JumpPenalty& p, double rho1, double rho2);

/// Grid evidence for the constants entering the jump budget.
struct PenaltyCertificate {
  double M = 0.0;
  /// K(rho) >= c_M * rho on (0, M].
  double c_M = 0.0;
  /// K(r1) + K(r2) >= K(r1 + r2) + C_M * r1 * r2 whenever r1 + r2 <= M.
  double C_M = 0.0;
  /// min{c_M / M, 2 C_M}.
  double A_M = 0.0;
  double grid_resolution = 0.0;
  double safety_factor = 0.99;
};

constexpr double kDefaultSafetyFactor = 0.99;
constexpr double kDefaultCertifyStep = 0.005;

/// Computes c_M and C_M as grid infima shrunk by `safety_factor`.
/// The rho grid always contains M and M/2. For tabulated penalties the grid
/// is snapped to table nodes so that interpolation cannot fake additivity.
/// Throws CertificationError if either infimum is not positive.
PenaltyCertificate certify(const JumpPenalty& p, double M, double grid_step = kDefaultCertifyStep,
                           double safety_factor = kDefaultSafetyFactor);

struct LowerGapReport {
  bool pass = true;
  /// min over the grid of (rho - K(rho) - C_M rho^2 / 2).
  double worst_margin = 0.0;
  double worst_rho = 0.0;
  std::size_t points = 0;
  std::size_t failures = 0;
};

/// Checks rho - K(rho) >= C_M rho^2 / 2 at every grid point of (0, M].
LowerGapReport check_lower_gap(const JumpPenalty& p, const PenaltyCertificate& cert,
                               double grid_step = kDefaultCertifyStep);

}  // namespace tvk
