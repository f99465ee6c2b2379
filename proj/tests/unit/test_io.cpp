#include <doctest.h>

#include <sstream>

#include "tvk/errors.hpp"
#include "tvk/io.hpp"

using namespace tvk;

namespace {

io::SignalFile parse(const std::string& text) {
  std::istringstream in(text);
  return io::parse_signal_csv(in);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("bare sample column") {
  const auto f = parse("g\n1\n2\n 3 \n");
  CHECK(f.a == 0.0);
  CHECK(f.b == 1.0);
  CHECK(f.samples == std::vector<double>{1, 2, 3});
  CHECK_FALSE(f.lambda.has_value());
  CHECK(f.interp == Interpolation::PiecewiseConstantCells);
}

TEST_CASE("cell centers determine the interval") {
  const auto f = parse("x,g\n0.5,1\n1.5,2\n2.5,4\n");
  CHECK(f.a == doctest::Approx(0.0));
  CHECK(f.b == doctest::Approx(3.0));
  CHECK(f.samples == std::vector<double>{1, 2, 4});
}

TEST_CASE("metadata comment overrides the defaults") {
  const auto f = parse("# a=-1,b=1,lambda=7.5,interp=linear\n# free text\n0\n1\n");
  CHECK(f.a == -1.0);
  CHECK(f.b == 1.0);
  CHECK(f.lambda == 7.5);
  CHECK(f.interp == Interpolation::PiecewiseLinearNodes);
}

TEST_CASE("malformed signal files report the line") {
  CHECK(parse_error_line("g\n1\nabc\n") == 3);
  CHECK(parse_error_line("x,g\n0.1,1\n0.3,2\n0.4,3\n") > 0);
  CHECK(parse_error_line("x,g\n0.5,1\n0.5,2\n") == 3);
  CHECK(parse_error_line("x,g\n0.5,1\n7\n") == 3);
  CHECK(parse_error_line("# interp=cubic\n1\n") == 1);
  CHECK_THROWS_AS(parse("g\n"), ParseError);
  CHECK_THROWS_AS(parse("# a=2,b=1\n1\n"), ParseError);
}

TEST_CASE("signal round trip") {
  const Signal g(-2.0, 3.0, {0.25, -1.5, 8.0}, 4.5, Interpolation::PiecewiseLinearNodes);
  std::stringstream s;
  io::write_signal_csv(s, g);
  const auto f = io::parse_signal_csv(s);
  CHECK(f.a == -2.0);
  CHECK(f.b == 3.0);
  CHECK(f.lambda == 4.5);
  CHECK(f.interp == Interpolation::PiecewiseLinearNodes);
  CHECK(f.samples == std::vector<double>{0.25, -1.5, 8.0});
}

TEST_CASE("potential table") {
  std::istringstream in("x,F\n0,1\n0.5,0.25\n1,0\n2,1\n");
  const auto F = io::parse_potential_csv(in);
  CHECK(F.F(0.25) == doctest::Approx(0.625));
  CHECK(F.x_max() == 2.0);

  std::istringstream bad("x,F\n0,1\n0.5,0.2\n0.4,0\n");
  try {
    io::parse_potential_csv(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(io::read_potential_csv("/nonexistent/potential.csv"), std::runtime_error);
}

TEST_CASE("JSON round trips") {
  const PiecewiseConstantFn u{0.0, 2.0, {0.5, 1.25}, {0.1, 0.7, -0.3}};
  const auto back = io::function_from_json(io::to_json(u));
  CHECK(back.breakpoints == u.breakpoints);
  CHECK(back.values == u.values);

  const auto cert = certify(JumpPenalty::rho_over_one_plus_rho(), 1.0);
  const auto c = io::certificate_from_json(io::to_json(cert));
  CHECK(c.C_M == cert.C_M);
  CHECK(c.c_M == cert.c_M);
  CHECK(c.A_M == cert.A_M);
  CHECK(c.M == cert.M);
}

TEST_CASE("plot rows at cell centers") {
  const Signal g(0.0, 1.0, {0.0, 1.0}, 1.0);
  std::ostringstream out;
  io::write_plot_csv(out, g, PiecewiseConstantFn{0.0, 1.0, {0.5}, {0.2, 0.8}});
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,g,u");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
}
