#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "tvk/diagnostics.hpp"
#include "tvk/errors.hpp"
#include "tvk/io.hpp"
#include "tvk/penalty.hpp"
#include "tvk/potential.hpp"
#include "tvk/rof.hpp"
#include "tvk/signal.hpp"
#include "tvk/solver_dp.hpp"
#include "tvk/solver_refine.hpp"

namespace tvk::cli {

namespace {

using json = nlohmann::json;

// A penalty request: a named closed form, a potential CSV, or a builtin potential.
struct PenaltySpec {
  std::string name = "rho-over-1+rho";
  std::optional<std::string> potential;  // builtin potential name
  double s = 1.0;
};

Potential builtin_potential(const std::string& name) {
  if (name == "quadratic-well") return Potential::quadratic_well();
  const std::string prefix = "abs-power:";
  if (name.rfind(prefix, 0) == 0) return Potential::abs_power(std::stod(name.substr(prefix.size())));
  throw ValidationError("unknown potential '" + name + "' (expected quadratic-well or abs-power:<m>)");
}

struct ResolvedPenalty {
  JumpPenalty penalty;
  std::optional<Potential> potential;
};

// rho_max bounds the tabulated range for potential-based penalties.
ResolvedPenalty resolve_penalty(const PenaltySpec& spec, double rho_max) {
  if (spec.potential) {
    Potential f = builtin_potential(*spec.potential);
    JumpPenalty k = build_from_potential(f, spec.s, rho_max);
    return {k, std::move(f)};
  }
  if (spec.name == "linear") return {JumpPenalty::linear(), std::nullopt};
  if (spec.name == "rho-over-1+rho" || spec.name == "rho-over-one-plus-rho") {
    return {JumpPenalty::rho_over_one_plus_rho(), std::nullopt};
  }
  const std::string prefix = "potential:";
  if (spec.name.rfind(prefix, 0) == 0) {
    Potential f = io::read_potential_csv(spec.name.substr(prefix.size()));
    JumpPenalty k = build_from_potential(f, spec.s, rho_max);
    return {k, std::move(f)};
  }
  throw ValidationError("unknown penalty '" + spec.name +
                        "' (expected linear, rho-over-1+rho or potential:<file>)");
}

void add_penalty_options(CLI::App& cmd, PenaltySpec& spec) {
  cmd.add_option("--penalty", spec.name, "linear | rho-over-1+rho | potential:<csv>");
  cmd.add_option("--potential", spec.potential, "builtin potential: quadratic-well | abs-power:<m>");
  cmd.add_option("--s", spec.s, "coefficient of the order-parameter term")->check(CLI::PositiveNumber);
}

void emit(const json& j, std::ostream& out, const std::optional<std::string>& path) {
  if (path) {
    std::ofstream f(*path);
    if (!f) throw std::runtime_error("cannot write " + *path);
    f << j.dump(2) << "\n";
    return;
  }
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------- kernel

struct KernelArgs {
  PenaltySpec penalty;
  double M = 1.0;
  double grid_step = kDefaultCertifyStep;
  std::optional<std::string> out;
};

int cmd_kernel(const KernelArgs& a, std::ostream& out) {
  const ResolvedPenalty r = resolve_penalty(a.penalty, a.M);
  json j;
  j["penalty"] = r.penalty.name();
  if (r.potential) {
    j["potential"] = r.potential->name();
    const PotentialReport v = verify_potential(*r.potential, default_probe_steps());
    j["potential_check"] = {{"pass", v.pass},
                            {"limsup_ratio", v.limsup_ratio},
                            {"ratio_slope", v.ratio_slope},
                            {"liminf_quotient", v.liminf_quotient},
                            {"quotient_slope", v.quotient_slope}};
  }
  const PenaltyCertificate cert = certify(r.penalty, a.M, a.grid_step);
  j["certificate"] = io::to_json(cert);
  const LowerGapReport gap = check_lower_gap(r.penalty, cert, a.grid_step);
  j["lower_gap"] = {{"pass", gap.pass}, {"worst_margin", gap.worst_margin}, {"worst_rho", gap.worst_rho},
                    {"points", gap.points}};
  emit(j, out, a.out);
  return kOk;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string signal;
  std::optional<std::string> config;
  std::optional<double> lambda;
  std::optional<std::string> penalty;
  std::optional<std::string> potential;
  std::optional<double> s;
  std::optional<std::size_t> levels;
  std::optional<double> eta;
  std::optional<double> M;
  bool refine = false;
  std::optional<std::size_t> restarts;
  std::optional<double> tol;
  std::optional<std::size_t> max_iters;
  std::optional<std::string> baseline;
  std::optional<std::string> plot;
  std::optional<std::string> out;
};

// Flags win over the config file, which wins over the built-in default.
template <class T>
T pick(const std::optional<T>& flag, const json& config, const char* key, T fallback) {
  if (flag) return *flag;
  if (config.contains(key)) return config.at(key).get<T>();
  return fallback;
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  json config = json::object();
  if (a.config) {
    std::ifstream f(*a.config);
    if (!f) throw std::runtime_error("cannot open " + *a.config);
    try {
      config = json::parse(f);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("config is not valid JSON: ") + e.what(), 0);
    }
  }

  const io::SignalFile file = io::read_signal_csv(a.signal);
  std::optional<double> lambda = a.lambda;
  if (!lambda && config.contains("lambda")) lambda = config.at("lambda").get<double>();
  if (!lambda) lambda = file.lambda;
  if (!lambda) throw ValidationError("lambda is required (flag, config or signal metadata)");
  const Signal g(file.a, file.b, file.samples, *lambda, file.interp);

  if (pick<std::string>(a.baseline, config, "baseline", "") == "rof") {
    const RofSolution rof = solve_rof(g);
    json j = io::to_json(rof.u);
    j["baseline"] = "rof";
    j["energy"] = rof.energy;
    j["jumps"] = rof.u.num_jumps();
    j["max_jump"] = max_jump(rof.cell_values);
    if (a.plot) {
      std::ofstream f(*a.plot);
      io::write_plot_csv(f, g, rof.u);
    }
    emit(j, out, a.out);
    return kOk;
  }

  PenaltySpec spec;
  spec.name = pick<std::string>(a.penalty, config, "penalty", spec.name);
  if (a.potential) spec.potential = a.potential;
  else if (config.contains("potential")) spec.potential = config.at("potential").get<std::string>();
  spec.s = pick<double>(a.s, config, "s", 1.0);
  const double M = pick<double>(a.M, config, "M", g.osc() > 0.0 ? g.osc() : 1.0);
  const ResolvedPenalty pen = resolve_penalty(spec, std::max(M, g.osc()));

  LevelGrid levels = LevelGrid::spanning(g, 129);
  if (a.levels) levels = LevelGrid::spanning(g, *a.levels);
  else if (a.eta) levels = LevelGrid::with_spacing(g, *a.eta);
  else if (config.contains("levels")) levels = LevelGrid::spanning(g, config.at("levels").get<std::size_t>());
  else if (config.contains("eta")) levels = LevelGrid::with_spacing(g, config.at("eta").get<double>());

  const DpSolution dp = solve_dp(g, pen.penalty, levels);

  std::optional<PenaltyCertificate> cert;
  std::optional<JumpBudget> budget;
  const bool do_refine = a.refine || config.value("refine", false);
  try {
    cert = certify(pen.penalty, M);
    budget = jump_budget(g, *cert, false);
  } catch (const CertificationError&) {
    if (do_refine) throw;
  }

  json j;
  PiecewiseConstantFn u = dp.u;
  EnergyBreakdown energy = dp.energy;
  j["dp"] = {{"levels", levels.size()}, {"eta", levels.eta()}, {"energy", dp.energy.total},
             {"jumps", dp.jumps}, {"ties_broken", dp.ties_broken}};
  if (do_refine) {
    RefineConfig rc;
    rc.restarts = pick<std::size_t>(a.restarts, config, "restarts", 0);
    rc.tol = pick<double>(a.tol, config, "tol", rc.tol);
    rc.max_iters = pick<std::size_t>(a.max_iters, config, "max_iters", rc.max_iters);
    const RefineResult rr = refine(g, pen.penalty, dp.u, *budget, rc);
    u = rr.u;
    energy = rr.energy;
    j["midpoint_residuals"] = rr.midpoint_residuals;
    j["iterations"] = rr.iterations;
    j["converged"] = rr.converged;
    json pts = json::array();
    for (const auto& c : coincidence_set(u, g)) pts.push_back({c.lo, c.hi});
    j["coincidence_points"] = pts;
  }
  const json fn = io::to_json(u);
  for (const auto& [k, v] : fn.items()) j[k] = v;
  j["penalty"] = pen.penalty.name();
  j["lambda"] = g.lambda();
  j["energy"] = io::to_json(energy);
  j["jumps"] = u.num_jumps();
  j["budget_m"] = budget ? json(budget->m) : json(nullptr);
  if (a.plot) {
    std::ofstream f(*a.plot);
    if (!f) throw std::runtime_error("cannot write " + *a.plot);
    io::write_plot_csv(f, g, u);
  }
  emit(j, out, a.out);
  return kOk;
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  std::uint64_t seed = 1;
  std::size_t n = 6;
  std::size_t levels = 5;
  std::size_t trials = 20;
  bool oracle = true;
  bool negative_control = false;
  std::string suite = "random";
  std::optional<std::string> out;
};

// Merges results by check name, keeping the worst margin and its witness.
class CheckLedger {
 public:
  void add(const std::string& name, bool pass, double margin, const std::string& witness) {
    auto [it, fresh] = checks_.try_emplace(name, CheckResult{name, pass, true, margin, witness});
    if (fresh) return;
    CheckResult& c = it->second;
    if (margin < c.margin || (!pass && c.pass)) {
      c.margin = margin;
      c.witness = witness;
    }
    c.pass = c.pass && pass;
  }
  void add(const CheckResult& c, const std::string& context) {
    if (!c.hard) return;
    add(c.name, c.pass, c.margin, context + " " + c.witness);
  }
  bool pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const auto& kv) { return kv.second.pass; });
  }
  json to_json() const {
    json arr = json::array();
    for (const auto& [name, c] : checks_) {
      arr.push_back({{"name", name}, {"pass", c.pass}, {"margin", c.margin}, {"witness", c.witness}});
    }
    return arr;
  }

 private:
  std::map<std::string, CheckResult> checks_;  // ordered by name
};

std::vector<double> random_samples(std::mt19937_64& rng, std::size_t n, bool sorted) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> s(n);
  for (auto& v : s) v = unit(rng);
  if (sorted) std::sort(s.begin(), s.end());
  return s;
}

void random_suite(const CheckArgs& a, CheckLedger& ledger) {
  const JumpPenalty p = JumpPenalty::rho_over_one_plus_rho();
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> lambda_dist(1.0, 40.0);
  if (a.oracle) {
    const double states = std::pow(static_cast<double>(a.levels), static_cast<double>(a.n));
    if (states > 2e6) {
      throw RefusalError("oracle refused: " + std::to_string(a.levels) + "^" + std::to_string(a.n) +
                         " assignments exceed 2e6; use --no-oracle");
    }
  }
  for (std::size_t t = 0; t < a.trials; ++t) {
    const bool sorted = t % 2 == 1;
    const Interpolation interp =
        (t / 2) % 2 == 0 ? Interpolation::PiecewiseConstantCells : Interpolation::PiecewiseLinearNodes;
    const double lambda = lambda_dist(rng);
    const Signal g(0.0, 1.0, random_samples(rng, a.n, sorted), lambda, interp);
    const LevelGrid levels = LevelGrid::spanning(g, g.osc() > 0.0 ? a.levels : 1);
    const DpSolution dp = solve_dp(g, p, levels);
    const std::string ctx = "trial " + std::to_string(t) + ":";

    if (a.oracle) {
      const DpSolution bf = brute_force(g, p, levels);
      const double diff = std::abs(dp.energy.total - bf.energy.total);
      const double tol = 1e-12 * std::max(1.0, std::abs(bf.energy.total));
      ledger.add("oracle_energy", diff <= tol, tol - diff, ctx);
      ledger.add("oracle_assignment", dp.assignment == bf.assignment, dp.assignment == bf.assignment ? 0.0 : -1.0,
                 ctx);
    }
    if (sorted) {
      const bool mono = std::is_sorted(dp.assignment.begin(), dp.assignment.end());
      ledger.add("monotone_assignment", mono, mono ? 0.0 : -1.0, ctx);
    }
    if (g.osc() > 0.0) {
      const PenaltyCertificate cert = certify(p, g.osc());
      const StructureReport r = check_structure(dp.u, g, p, cert);
      for (const auto& c : r.checks) ledger.add(c, ctx);
    }
  }
}

void monotone_suite(CheckLedger& ledger) {
  const JumpPenalty p = JumpPenalty::rho_over_one_plus_rho();
  const PenaltyCertificate cert = certify(p, 1.0);
  const auto ramp = [](double x) { return x; };

  const Signal g1 = Signal::sample(ramp, 0.0, 1.0, 256, 1.0, Interpolation::PiecewiseLinearNodes);
  const std::vector<std::pair<double, double>> brackets{{0.0, 0.5}, {0.25, 0.75}, {0.5, 1.0}, {0.0, 1.0}};
  for (const auto& [alpha, beta] : brackets) {
    const GapAuditReport r = monotone_gap_audit(g1, alpha, beta, p, cert);
    const std::string w = "[" + std::to_string(alpha) + ", " + std::to_string(beta) + "]";
    if (r.skipped) continue;
    double two_jump = std::numeric_limits<double>::infinity();
    double fid = std::numeric_limits<double>::infinity();
    for (const auto& e : r.entries) {
      two_jump = std::min(two_jump, e.margin);
      fid = std::min(fid, e.fid_margin);
    }
    ledger.add("gap_two_jump", two_jump >= 0.0, two_jump, w);
    ledger.add("gap_fidelity", fid >= 0.0, fid, w);
    const CompetitorAuditReport c = competitor_audit(g1, alpha, beta, p, cert, 7, 200);
    if (!c.skipped) ledger.add("gap_competitors", c.pass, c.worst_margin, w);
  }

  const auto single = [&](const std::function<double(double)>& f, double expected, const std::string& label) {
    const Signal g = Signal::sample(f, 0.0, 1.0, 256, 1.0);
    const SingleJump s = best_single_jump(g, 0.0, 1.0, 0.0, 1.0);
    const double margin = g.cell_width() - std::abs(s.location - expected);
    ledger.add("midpoint_single_jump", margin >= 0.0, margin, label);
  };
  single(ramp, 0.5, "g=x");
  single([](double x) { return x * x; }, std::sqrt(0.5), "g=x^2");

  const Signal g10 = Signal::sample(ramp, 0.0, 1.0, 256, 10.0);
  const DpSolution dp = solve_dp(g10, p, LevelGrid::with_spacing(g10, 1.0 / 64.0));
  const RefineResult rr = refine(g10, p, dp.u, jump_budget(g10, cert, true));
  for (const auto* u : {&dp.u, &rr.u}) {
    const StructureReport r = check_structure(*u, g10, p, cert);
    for (const auto& c : r.checks) ledger.add(c, u == &dp.u ? "dp:" : "refined:");
  }
  const double drop = dp.energy.total - rr.energy.total;
  ledger.add("refine_descent", drop >= 0.0, drop, "g=x lambda=10");
}

// A ramp projected onto the nearest of 51 levels (50 jumps) with small lambda,
// and a true minimizer with one jump dragged off the midpoint.
json negative_control(CheckLedger& ledger) {
  const JumpPenalty p = JumpPenalty::rho_over_one_plus_rho();
  const PenaltyCertificate cert = certify(p, 1.0);
  json cases = json::array();

  const Signal g = Signal::sample([](double x) { return x; }, 0.0, 1.0, 256, 1.0);
  const LevelGrid levels = LevelGrid::spanning(g, 51);
  std::vector<std::uint32_t> nearest(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = (g.samples()[i] - g.min()) / levels.eta();
    nearest[i] = static_cast<std::uint32_t>(std::clamp(std::lround(t), 0L, 50L));
  }
  const PiecewiseConstantFn projected = assignment_to_function(g, levels, nearest);

  const Signal g10 = g.with_lambda(10.0);
  PiecewiseConstantFn dragged = solve_dp(g10, p, LevelGrid::with_spacing(g10, 1.0 / 64.0)).u;
  if (dragged.num_jumps() > 0) dragged.breakpoints[0] = std::max(dragged.a + 0.05, dragged.breakpoints[0] - 0.2);

  const std::vector<std::tuple<std::string, const Signal*, PiecewiseConstantFn>> controls{
      {"nearest_level_projection", &g, projected}, {"dragged_jump", &g10, dragged}};
  for (const auto& [name, sig, u] : controls) {
    const StructureReport r = check_structure(u, *sig, p, cert);
    json failed = json::array();
    for (const auto& c : r.checks) {
      if (c.hard && !c.pass) failed.push_back(c.name);
      ledger.add(c, name + ":");
    }
    cases.push_back({{"name", name}, {"jumps", r.jumps}, {"failed_checks", failed}, {"detected", !r.pass}});
  }
  return cases;
}

int cmd_check(const CheckArgs& a, std::ostream& out) {
  CheckLedger ledger;
  json j;
  if (a.negative_control) {
    j["suite"] = "negative-control";
    j["cases"] = negative_control(ledger);
  } else if (a.suite == "monotone") {
    j["suite"] = "monotone";
    monotone_suite(ledger);
  } else if (a.suite == "random") {
    j["suite"] = "random";
    j["seed"] = a.seed;
    j["n"] = a.n;
    j["levels"] = a.levels;
    j["trials"] = a.trials;
    j["oracle"] = a.oracle;
    random_suite(a, ledger);
  } else {
    throw ValidationError("unknown suite '" + a.suite + "' (expected random or monotone)");
  }
  j["checks"] = ledger.to_json();
  j["pass"] = ledger.pass();
  emit(j, out, a.out);
  return ledger.pass() ? kOk : kCheckFailure;
}

// ---------------------------------------------------------------- bound

struct BoundArgs {
  std::optional<std::string> signal;
  std::optional<double> lambda;
  double length = 1.0;
  PenaltySpec penalty;
  std::optional<double> M;
  bool monotone = false;
  std::optional<std::string> out;
};

int cmd_bound(const BoundArgs& a, std::ostream& out) {
  json j;
  JumpBudget b;
  if (a.signal) {
    const io::SignalFile file = io::read_signal_csv(*a.signal);
    const std::optional<double> lambda = a.lambda ? a.lambda : file.lambda;
    if (!lambda) throw ValidationError("lambda is required (flag or signal metadata)");
    const Signal g(file.a, file.b, file.samples, *lambda, file.interp);
    const double M = a.M.value_or(g.osc() > 0.0 ? g.osc() : 1.0);
    const ResolvedPenalty pen = resolve_penalty(a.penalty, M);
    b = jump_budget(g, certify(pen.penalty, M), a.monotone);
  } else {
    if (!a.lambda) throw ValidationError("bound needs --signal or --lambda");
    const double M = a.M.value_or(1.0);
    const ResolvedPenalty pen = resolve_penalty(a.penalty, M);
    b = jump_budget(a.length, *a.lambda, certify(pen.penalty, M), a.monotone);
  }
  j = {{"m", b.m},           {"constant", b.constant}, {"A_M", b.A_M},       {"C_M", b.C_M},
       {"M", b.M},           {"lambda", b.lambda},     {"length", b.length}, {"monotone", b.monotone}};
  emit(j, out, a.out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Piecewise-constant minimizers of TV_K energies in one dimension", "tvk"};
  app.require_subcommand(1);

  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "certify a jump penalty");
  add_penalty_options(*kernel, ka.penalty);
  kernel->add_option("--M", ka.M, "upper end of the certified jump range")->check(CLI::PositiveNumber);
  kernel->add_option("--grid-step", ka.grid_step, "certification grid step")->check(CLI::PositiveNumber);
  kernel->add_option("--out", ka.out, "write JSON here instead of stdout");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "minimize the energy for a sampled signal");
  solve->add_option("--signal", sa.signal, "signal CSV")->required();
  solve->add_option("--config", sa.config, "JSON config; flags take precedence");
  solve->add_option("--lambda", sa.lambda, "fidelity weight")->check(CLI::PositiveNumber);
  solve->add_option("--penalty", sa.penalty, "linear | rho-over-1+rho | potential:<csv>");
  solve->add_option("--potential", sa.potential, "builtin potential");
  solve->add_option("--s", sa.s)->check(CLI::PositiveNumber);
  auto* lv = solve->add_option("--levels", sa.levels, "number of DP levels");
  solve->add_option("--eta", sa.eta, "DP level spacing")->check(CLI::PositiveNumber)->excludes(lv);
  solve->add_option("--M", sa.M, "certification range")->check(CLI::PositiveNumber);
  solve->add_flag("--refine", sa.refine, "refine jump locations and values after the DP");
  solve->add_option("--restarts", sa.restarts);
  solve->add_option("--tol", sa.tol);
  solve->add_option("--max-iters", sa.max_iters);
  solve->add_option("--baseline", sa.baseline, "rof: classical total variation instead")
      ->check(CLI::IsMember({"rof"}));
  solve->add_option("--plot", sa.plot, "CSV of x, g(x), u(x)");
  solve->add_option("--out", sa.out);

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "run the property suite");
  check->add_option("--seed", ca.seed);
  check->add_option("--n", ca.n, "cells per random instance")->check(CLI::PositiveNumber);
  check->add_option("--levels", ca.levels, "levels per random instance")->check(CLI::PositiveNumber);
  check->add_option("--trials", ca.trials);
  check->add_flag("--oracle,!--no-oracle", ca.oracle, "compare with exhaustive enumeration");
  check->add_flag("--negative-control", ca.negative_control, "run the checks on known non-minimizers");
  check->add_option("--suite", ca.suite)->check(CLI::IsMember({"random", "monotone"}));
  check->add_option("--out", ca.out);

  BoundArgs ba;
  auto* bound = app.add_subcommand("bound", "jump-count bound");
  bound->add_option("--signal", ba.signal);
  bound->add_option("--lambda", ba.lambda)->check(CLI::PositiveNumber);
  bound->add_option("--length", ba.length)->check(CLI::PositiveNumber);
  add_penalty_options(*bound, ba.penalty);
  bound->add_option("--M", ba.M)->check(CLI::PositiveNumber);
  bound->add_flag("--monotone", ba.monotone);
  bound->add_option("--out", ba.out);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationFailure;  // bad usage is invalid input
  }

  try {
    if (*kernel) return cmd_kernel(ka, out);
    if (*solve) return cmd_solve(sa, out);
    if (*check) return cmd_check(ca, out);
    if (*bound) return cmd_bound(ba, out);
  } catch (const CertificationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const RefusalError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kRuntimeError;
}

}  // namespace tvk::cli
