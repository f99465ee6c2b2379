#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tvk/errors.hpp"
#include "tvk/penalty.hpp"
#include "tvk/potential.hpp"

using namespace tvk;

TEST_CASE("G of the quadratic well is (1 - xi)^2 / 2") {
  const auto F = Potential::quadratic_well();
  for (const double xi : {0.0, 0.1, 0.37, 0.5, 0.99, 1.0}) {
    CHECK(F.G(xi) == doctest::Approx(0.5 * (1 - xi) * (1 - xi)).epsilon(1e-10));
  }
  // Beyond the well G grows again.
  CHECK(F.G(1.5) == doctest::Approx(0.125).epsilon(1e-8));
}

TEST_CASE("quadratic well reproduces rho/(1+rho) and its minimizer") {
  const auto F = Potential::quadratic_well();
  const auto K = build_from_potential(F, 1.0, 4.0);
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double r = 0.01 * i;
    worst = std::max(worst, std::abs(K(r) - oracle::rho_over_one_plus_rho(r)));
  }
  CHECK(worst <= 1e-8);

  const auto m = minimize_penalty_objective(F, 1.0, 1.0);
  CHECK(m.value == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(m.xi == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(minimize_penalty_objective(F, 1.0, 0.0).xi == doctest::Approx(1.0));
  CHECK_THROWS_AS(minimize_penalty_objective(F, 1.0, -1.0), DomainError);
}

TEST_CASE("penalty of a cubic well agrees with a dense order-parameter grid") {
  const auto F = Potential::abs_power(3.0);
  const auto G = [](double xi) { return oracle::abs_power_G(3.0, xi); };
  for (const double s : {0.5, 2.0}) {
    for (const double r : {0.05, 0.4, 1.0, 3.0}) {
      const double ref = oracle::dense_xi_min(G, s, r);
      CHECK(minimize_penalty_objective(F, s, r).value == doctest::Approx(ref).epsilon(1e-7));
    }
  }
}

TEST_CASE("tabulated potential penalty is certifiable and keeps the order parameter") {
  const auto K = build_from_potential(Potential::quadratic_well(), 1.0, 2.0);
  CHECK(K.is_tabulated());
  CHECK(K.minimizers().size() == K.table().size());
  const auto cert = certify(K, 1.0);
  CHECK(cert.C_M > 0.0);
  CHECK(cert.c_M == doctest::Approx(0.495).epsilon(1e-6));
}

TEST_CASE("well-shape validation names the failing condition") {
  const auto expect = [](auto make, const char* tag) {
    try {
      make();
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find(tag) != std::string::npos);
    }
  };
  expect([] { Potential::from_function("off", [](double x) { return (x - 1) * (x - 1) + 0.1; }, 2.0); },
         "(F1)");
  expect([] { Potential::from_function("bump", [](double x) { return std::pow(x - 1, 2) * (1.5 + std::sin(40 * x)); }, 2.0); },
         "(F2)");
  CHECK_THROWS_AS(Potential::abs_power(-1.0), ValidationError);
  CHECK_THROWS_AS(Potential::from_samples({0.0, 0.5}, {1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(Potential::from_samples({0.0, 0.0, 1.0}, {1.0, 0.5, 0.0}), ValidationError);
}

TEST_CASE("potential verification on power wells") {
  const auto steps = default_probe_steps();
  const auto q = verify_potential(Potential::quadratic_well(), steps);
  CHECK(q.pass);
  CHECK(q.limsup_ratio == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(q.liminf_quotient == doctest::Approx(0.5).epsilon(1e-3));

  // |x-1|^1.5 is too sharp: F'/(x-1) ~ |x-1|^-0.5 blows up and the well
  // quotient ~ rho^(1/3) decays.
  const auto sharp = verify_potential(Potential::abs_power(1.5), steps);
  CHECK_FALSE(sharp.ratio_ok);
  CHECK_FALSE(sharp.quotient_ok);
  CHECK_FALSE(sharp.pass);

  CHECK(verify_potential(Potential::abs_power(3.0), steps).pass);
  // |x-1|^4 is flat at the well, which both conditions tolerate.
  CHECK(verify_potential(Potential::abs_power(4.0), steps).pass);
}
