#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "tvk/io.hpp"

namespace fs = std::filesystem;
using tvk::io::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = tvk::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(TVK_EXAMPLE_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "tvk_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("kernel certifies rho/(1+rho)") {
  const auto r = run({"kernel", "--penalty", "rho-over-1+rho", "--M", "1"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["certificate"]["c_M"].get<double>() == doctest::Approx(0.5).epsilon(0.02));
  CHECK(j["certificate"]["C_M"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(0.02));
  CHECK(j["lower_gap"]["pass"].get<bool>());
}

TEST_CASE("kernel from the quadratic well matches the closed form") {
  const auto a = json::parse(run({"kernel", "--penalty", "rho-over-1+rho", "--M", "1"}).out);
  const auto r = run({"kernel", "--potential", "quadratic-well", "--s", "1", "--M", "1"});
  REQUIRE(r.code == 0);
  const auto b = json::parse(r.out);
  for (const char* key : {"c_M", "C_M", "A_M"}) {
    CHECK(b["certificate"][key].get<double>() == doctest::Approx(a["certificate"][key].get<double>()).epsilon(1e-6));
  }
  CHECK(b["potential_check"]["pass"].get<bool>());

  const auto csv = run({"kernel", "--penalty", "potential:" + data("quadratic_well.csv"), "--M", "1"});
  CHECK(csv.code == 0);
}

TEST_CASE("kernel refuses the linear penalty") {
  const auto r = run({"kernel", "--penalty", "linear", "--M", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("(K2) certification failed") != std::string::npos);
}

TEST_CASE("malformed potential CSV names its line") {
  const auto p = scratch("bad_potential.csv");
  write(p, "x,F\n0,1\n1,zero\n");
  const auto r = run({"kernel", "--penalty", "potential:" + p.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("solve on the ramp staircases and round-trips") {
  const auto plot = scratch("ramp_plot.csv");
  const auto r = run({"solve", "--signal", data("ramp64.csv"), "--lambda", "10", "--penalty", "rho-over-1+rho",
                      "--levels", "129", "--refine", "--plot", plot.string()});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["jumps"].get<std::size_t>() >= 1);
  CHECK(j["jumps"].get<std::size_t>() <= j["budget_m"].get<std::size_t>());
  CHECK(j["energy"]["total"].get<double>() <= j["dp"]["energy"].get<double>());

  // Re-evaluating the emitted function reproduces the reported energy exactly.
  const auto file = tvk::io::read_signal_csv(data("ramp64.csv"));
  const tvk::Signal g(file.a, file.b, file.samples, 10.0, file.interp);
  const auto u = tvk::io::function_from_json(j);
  const auto e = tvk::total_energy(u, g, tvk::JumpPenalty::rho_over_one_plus_rho());
  CHECK(e.total == j["energy"]["total"].get<double>());

  std::ifstream in(plot);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,g,u");

  // Same flags, same bytes.
  const auto again = run({"solve", "--signal", data("ramp64.csv"), "--lambda", "10", "--penalty", "rho-over-1+rho",
                          "--levels", "129", "--refine", "--plot", plot.string()});
  CHECK(again.out == r.out);
}

TEST_CASE("solve on constant data") {
  const auto p = scratch("const.csv");
  write(p, "g\n0.25\n0.25\n0.25\n0.25\n");
  const auto r = run({"solve", "--signal", p.string(), "--lambda", "3"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["jumps"].get<int>() == 0);
  CHECK(j["energy"]["total"].get<double>() == 0.0);
  CHECK(j["values"][0].get<double>() == 0.25);
}

TEST_CASE("classical baseline barely jumps") {
  const auto r = run({"solve", "--signal", data("ramp64.csv"), "--baseline", "rof"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["baseline"] == "rof");
  CHECK(j["max_jump"].get<double>() <= 3.0 / 64.0);
}

TEST_CASE("flags beat the config file, which beats defaults") {
  const auto cfg = scratch("cfg.json");
  write(cfg, R"({"lambda": 40, "levels": 17})");
  const auto from_cfg = json::parse(run({"solve", "--signal", data("step8.csv"), "--config", cfg.string()}).out);
  CHECK(from_cfg["lambda"].get<double>() == 40.0);
  CHECK(from_cfg["dp"]["levels"].get<int>() == 17);
  const auto flagged =
      json::parse(run({"solve", "--signal", data("step8.csv"), "--config", cfg.string(), "--lambda", "2"}).out);
  CHECK(flagged["lambda"].get<double>() == 2.0);
  CHECK(flagged["dp"]["levels"].get<int>() == 17);
  const auto defaults = json::parse(run({"solve", "--signal", data("step8.csv"), "--lambda", "2"}).out);
  CHECK(defaults["dp"]["levels"].get<int>() == 129);

  write(cfg, "{not json");
  CHECK(run({"solve", "--signal", data("step8.csv"), "--config", cfg.string()}).code == 2);
}

TEST_CASE("solve input errors") {
  CHECK(run({"solve", "--signal", data("step8.csv")}).code == 2);  // no lambda anywhere
  CHECK(run({"solve", "--signal", "/nonexistent.csv", "--lambda", "1"}).code != 0);
  CHECK(run({"solve", "--signal", data("step8.csv"), "--lambda", "1", "--penalty", "bogus"}).code == 2);
  CHECK(run({"solve", "--signal", data("step8.csv"), "--lambda", "1", "--levels", "9", "--eta", "0.1"}).code == 2);
  CHECK(run({"solve", "--signal", data("step8.csv"), "--lambda", "1", "--penalty", "linear", "--refine"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("check suites") {
  const auto r = run({"check", "--seed", "7", "--n", "6", "--levels", "5", "--oracle"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["pass"].get<bool>());

  const auto mono = run({"check", "--suite", "monotone"});
  CHECK(mono.code == 0);

  const auto neg = run({"check", "--negative-control"});
  CHECK(neg.code == 3);
  CHECK_FALSE(json::parse(neg.out)["pass"].get<bool>());

  // 8^12 assignments is past the enumeration bound; without the oracle it runs.
  CHECK(run({"check", "--seed", "1", "--n", "12", "--levels", "8", "--trials", "2", "--oracle"}).code == 2);
  CHECK(run({"check", "--seed", "1", "--n", "12", "--levels", "8", "--trials", "2", "--no-oracle"}).code == 0);

  CHECK(run({"check", "--seed", "3", "--n", "5", "--levels", "4", "--trials", "4"}).out ==
        run({"check", "--seed", "3", "--n", "5", "--levels", "4", "--trials", "4"}).out);
}

TEST_CASE("bound") {
  const auto general = json::parse(run({"bound", "--lambda", "10", "--length", "1"}).out);
  CHECK(general["m"].get<int>() == 21);
  const auto mono = json::parse(run({"bound", "--lambda", "10", "--length", "1", "--monotone"}).out);
  CHECK(mono["m"].get<int>() == 8);
  const auto from_signal = run({"bound", "--signal", data("ramp64.csv"), "--monotone"});
  REQUIRE(from_signal.code == 0);
  CHECK(json::parse(from_signal.out)["m"].get<int>() == 8);
  CHECK(run({"bound"}).code == 2);
}
