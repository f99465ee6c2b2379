#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tvk/errors.hpp"
#include "tvk/signal.hpp"

using namespace tvk;

namespace {

oracle::Data mirror(const Signal& g) {
  oracle::Data d;
  d.a = g.a();
  d.b = g.b();
  d.g.assign(g.samples().begin(), g.samples().end());
  d.linear = g.interpolation() == Interpolation::PiecewiseLinearNodes;
  return d;
}

}  // namespace

TEST_CASE("signal geometry") {
  const Signal g(0.0, 2.0, {1.0, 3.0, 2.0, 5.0}, 4.0);
  CHECK(g.size() == 4);
  CHECK(g.cell_width() == 0.5);
  CHECK(g.cell_left(1) == 0.5);
  CHECK(g.cell_right(3) == 2.0);
  CHECK(g.cell_center(0) == 0.25);
  CHECK(g.osc() == 4.0);
  CHECK(g.max_increment() == 3.0);
  CHECK_FALSE(g.nondecreasing());
  CHECK(g.with_lambda(7.0).lambda() == 7.0);
  // Right cell wins at interior boundaries.
  CHECK(g.value_at(0.5) == 3.0);
  CHECK(g.value_at(2.0) == 5.0);
}

TEST_CASE("signal rejects bad input") {
  CHECK_THROWS_AS(Signal(1.0, 1.0, {0.0}, 1.0), ValidationError);
  CHECK_THROWS_AS(Signal(0.0, 1.0, {}, 1.0), ValidationError);
  CHECK_THROWS_AS(Signal(0.0, 1.0, {0.0}, 0.0), ValidationError);
  CHECK_THROWS_AS(Signal(0.0, 1.0, {0.0, NAN}, 1.0), ValidationError);
}

TEST_CASE("linear interpolation is flat on the outer half cells") {
  const auto g = Signal(0.0, 1.0, {0.0, 1.0}, 1.0, Interpolation::PiecewiseLinearNodes);
  CHECK(g.value_at(0.1) == 0.0);
  CHECK(g.value_at(0.5) == doctest::Approx(0.5));
  CHECK(g.value_at(0.9) == 1.0);
  const auto k = g.knots(0.0, 1.0);
  REQUIRE(k.size() == 2);
  CHECK(k[0] == 0.25);
  CHECK(k[1] == 0.75);
}

TEST_CASE("squared error agrees with quadrature on random data") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(d(rng) * 9);
    const auto interp = t % 2 ? Interpolation::PiecewiseLinearNodes : Interpolation::PiecewiseConstantCells;
    const Signal g(-1.0, 2.0, oracle::uniform(rng, n, -2.0, 2.0), 1.0, interp);
    const auto ref = mirror(g);
    double x0 = -1.0 + 3.0 * d(rng);
    double x1 = -1.0 + 3.0 * d(rng);
    if (x0 > x1) std::swap(x0, x1);
    const double v = -2.0 + 4.0 * d(rng);
    CHECK(g.squared_error(v, x0, x1) == doctest::Approx(oracle::squared_error(ref, v, x0, x1)).epsilon(1e-10));
    const auto m = g.moments(x0, x1);
    // int (v - g)^2 = v^2 L - 2 v int g + int g^2
    CHECK(v * v * m.length - 2 * v * m.sum + m.sum_sq ==
          doctest::Approx(oracle::squared_error(ref, v, x0, x1)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("pieces tile the requested window") {
  const auto g = Signal::sample([](double x) { return x * x; }, 0.0, 1.0, 5, 1.0, Interpolation::PiecewiseLinearNodes);
  double covered = 0.0;
  double last = 0.2;
  g.for_each_piece(0.2, 0.8, [&](double lo, double hi, double, double) {
    CHECK(lo == doctest::Approx(last));
    covered += hi - lo;
    last = hi;
  });
  CHECK(covered == doctest::Approx(0.6));
}

TEST_CASE("canonicalize merges equal facets and drops empty ones") {
  PiecewiseConstantFn u{0.0, 1.0, {0.2, 0.2, 0.5, 0.7}, {1.0, 9.0, 2.0, 2.0, 3.0}};
  const auto c = canonicalize(u);
  CHECK(c.breakpoints == std::vector<double>{0.2, 0.7});
  CHECK(c.values == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(c.num_jumps() == 2);
  CHECK(c.value_at(0.2) == 2.0);
  CHECK(c.jump_sizes() == std::vector<double>{1.0, 1.0});
  CHECK(c.nondecreasing());

  CHECK_THROWS_AS(canonicalize({0.0, 1.0, {0.6, 0.3}, {1, 2, 3}}), ValidationError);
  CHECK_THROWS_AS(canonicalize({0.0, 1.0, {0.5}, {1}}), ValidationError);
}

TEST_CASE("energy of a step against a step") {
  const auto k = JumpPenalty::rho_over_one_plus_rho();
  const Signal g(0.0, 1.0, {0.0, 1.0}, 4.0);
  const PiecewiseConstantFn exact{0.0, 1.0, {0.5}, {0.0, 1.0}};
  CHECK(tv_k_energy(exact, k) == doctest::Approx(0.5));
  CHECK(fidelity(exact, g) == 0.0);
  const auto flat = PiecewiseConstantFn::constant(0.0, 1.0, 0.5);
  // (4/2) * 0.25
  CHECK(total_energy(flat, g, k).total == doctest::Approx(0.5));
  CHECK_THROWS_AS(fidelity(PiecewiseConstantFn::constant(0.0, 2.0, 0.0), g), ValidationError);
}
