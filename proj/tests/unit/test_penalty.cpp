#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tvk/errors.hpp"
#include "tvk/penalty.hpp"

using namespace tvk;

TEST_CASE("closed-form penalties vanish at zero and reject negative jumps") {
  for (const auto& p : {JumpPenalty::linear(), JumpPenalty::rho_over_one_plus_rho()}) {
    CHECK(p(0.0) == 0.0);
    CHECK_THROWS_AS(p(-1e-3), DomainError);
    CHECK_THROWS_AS(subadditivity_gap(p, -1.0, 0.5), DomainError);
  }
  const auto k = JumpPenalty::rho_over_one_plus_rho();
  CHECK(k(1.0) == doctest::Approx(0.5));
  CHECK(k(3.0) == doctest::Approx(0.75));
  CHECK(JumpPenalty::linear()(2.5) == 2.5);
}

TEST_CASE("subadditivity gap matches the factored identity") {
  const auto k = JumpPenalty::rho_over_one_plus_rho();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 5000; ++t) {
    const double r1 = 1.0 - d(rng);
    const double r2 = 1.0 - d(rng);
    worst = std::max(worst, std::abs(subadditivity_gap(k, r1, r2) - oracle::gap_identity(r1, r2)));
  }
  CHECK(worst <= 1e-12);
  CHECK(subadditivity_gap(JumpPenalty::linear(), 0.3, 0.4) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("certificate for rho/(1+rho) on [0, 1]") {
  // Exact infima: K(rho)/rho = 1/(1+rho) >= 1/2, and the gap quotient
  // (2+rho)/((1+rho)(1+rho+r1 r2)) bottoms out at r1 = r2 = 1/2 with 2/3.
  const auto cert = certify(JumpPenalty::rho_over_one_plus_rho(), 1.0);
  CHECK(cert.c_M == doctest::Approx(0.99 * 0.5).epsilon(1e-12));
  CHECK(cert.C_M == doctest::Approx(0.99 * 2.0 / 3.0).epsilon(1e-12));
  CHECK(cert.A_M == doctest::Approx(0.495).epsilon(1e-12));
  CHECK(cert.M == 1.0);

  const auto c2 = certify(JumpPenalty::rho_over_one_plus_rho(), 2.0);
  CHECK(c2.c_M == doctest::Approx(0.99 / 3.0).epsilon(1e-12));
  // A_M = min(c_M / M, 2 C_M) switches branch as M grows.
  CHECK(c2.A_M == doctest::Approx(std::min(c2.c_M / 2.0, 2.0 * c2.C_M)));
}

TEST_CASE("linear penalty cannot be certified") {
  try {
    certify(JumpPenalty::linear(), 1.0);
    FAIL("expected a certification error");
  } catch (const CertificationError& e) {
    CHECK(std::string(e.what()).find("(K2) certification failed") != std::string::npos);
  }
}

TEST_CASE("certify validates its arguments") {
  const auto k = JumpPenalty::rho_over_one_plus_rho();
  CHECK_THROWS_AS(certify(k, 0.0), ValidationError);
  CHECK_THROWS_AS(certify(k, 1.0, -0.1), ValidationError);
  CHECK_THROWS_AS(certify(k, 1.0, 0.01, 1.5), ValidationError);
}

TEST_CASE("lower gap holds on every grid point") {
  const auto k = JumpPenalty::rho_over_one_plus_rho();
  for (const double M : {0.5, 1.0, 2.0}) {
    const auto cert = certify(k, M);
    const auto rep = check_lower_gap(k, cert);
    CHECK(rep.pass);
    CHECK(rep.failures == 0);
    CHECK(rep.points > 0);
    CHECK(rep.worst_margin >= 0.0);
  }
}

TEST_CASE("tabulated penalty interpolates and guards its range") {
  const auto t = JumpPenalty::tabulated(2.0, {0.0, 0.5, 0.8}, 1.0);
  CHECK(t.is_tabulated());
  CHECK(t.node_step() == 1.0);
  CHECK(t(0.5) == doctest::Approx(0.25));
  CHECK(t(1.5) == doctest::Approx(0.65));
  CHECK(t(2.0) == doctest::Approx(0.8));
  CHECK_THROWS_AS(t(2.5), RangeError);
  CHECK_THROWS_AS(certify(t, 3.0), RangeError);

  CHECK_THROWS_AS(JumpPenalty::tabulated(1.0, {0.1, 0.2}, 1.0), ValidationError);
  CHECK_THROWS_AS(JumpPenalty::tabulated(1.0, {0.0, 0.3, 0.3}, 1.0), ValidationError);
  CHECK_THROWS_AS(JumpPenalty::tabulated(1.0, {0.0}, 1.0), ValidationError);
  CHECK_THROWS_AS(JumpPenalty::tabulated(1.0, {0.0, 1.0}, 1.0, {0.5}), ValidationError);
}
