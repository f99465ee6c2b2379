#include "tvk/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tvk/errors.hpp"

namespace tvk::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(trim(field));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

// Numeric rows of a CSV, skipping comments and an optional header line.
// Calls on_comment for every '#' line.
template <class Comment, class Row>
void scan_csv(std::istream& in, Comment on_comment, Row on_row) {
  std::string line;
  std::size_t lineno = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      on_comment(t.substr(1), lineno);
      continue;
    }
    const auto fields = split(t, ',');
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && parse_double(fields[i], values[i]);
    if (!numeric) {
      if (!seen_row) {
        seen_row = true;  // header
        continue;
      }
      throw ParseError("non-numeric field in '" + t + "'", lineno);
    }
    seen_row = true;
    on_row(values, lineno);
  }
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

}  // namespace

SignalFile parse_signal_csv(std::istream& in) {
  SignalFile f;
  std::optional<double> meta_a, meta_b;
  std::vector<double> xs;
  std::size_t width = 0;
  std::size_t first_line = 0;

  scan_csv(
      in,
      [&](const std::string& comment, std::size_t lineno) {
        if (comment.find('=') == std::string::npos) return;
        for (const auto& kv : split(comment, ',')) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) continue;
          const std::string key = trim(kv.substr(0, eq));
          const std::string val = trim(kv.substr(eq + 1));
          if (key == "interp") {
            if (val == "linear") f.interp = Interpolation::PiecewiseLinearNodes;
            else if (val == "constant") f.interp = Interpolation::PiecewiseConstantCells;
            else throw ParseError("unknown interpolation '" + val + "'", lineno);
            continue;
          }
          double v = 0.0;
          if (key != "a" && key != "b" && key != "lambda") continue;
          if (!parse_double(val, v)) throw ParseError("bad value for " + key, lineno);
          if (key == "a") meta_a = v;
          if (key == "b") meta_b = v;
          if (key == "lambda") f.lambda = v;
        }
      },
      [&](const std::vector<double>& row, std::size_t lineno) {
        if (width == 0) {
          if (row.size() != 1 && row.size() != 2) throw ParseError("expected 'g' or 'x,g' rows", lineno);
          width = row.size();
          first_line = lineno;
        } else if (row.size() != width) {
          throw ParseError("row has " + std::to_string(row.size()) + " fields, expected " +
                               std::to_string(width),
                           lineno);
        }
        if (width == 2) {
          if (!xs.empty() && !(row[0] > xs.back())) throw ParseError("x must be strictly increasing", lineno);
          xs.push_back(row[0]);
        }
        f.samples.push_back(row.back());
      });

  if (f.samples.empty()) throw ParseError("signal file has no data rows", first_line);
  if (width == 2 && xs.size() >= 2) {
    const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      if (std::abs((xs[i] - xs[i - 1]) - h) > 1e-6 * h) {
        throw ParseError("x must be uniformly spaced cell centers", first_line + i);
      }
    }
    f.a = xs.front() - h / 2.0;
    f.b = xs.back() + h / 2.0;
  }
  if (meta_a) f.a = *meta_a;
  if (meta_b) f.b = *meta_b;
  if (!(f.a < f.b)) throw ParseError("signal interval needs a < b", first_line);
  return f;
}

SignalFile read_signal_csv(const std::string& path) {
  auto in = open(path);
  return parse_signal_csv(in);
}

void write_signal_csv(std::ostream& out, const Signal& g) {
  out.precision(17);
  out << "# a=" << g.a() << ",b=" << g.b() << ",lambda=" << g.lambda() << ",interp="
      << (g.interpolation() == Interpolation::PiecewiseLinearNodes ? "linear" : "constant") << "\n";
  out << "x,g\n";
  for (std::size_t i = 0; i < g.size(); ++i) out << g.cell_center(i) << "," << g.samples()[i] << "\n";
}

Potential parse_potential_csv(std::istream& in) {
  std::vector<double> x;
  std::vector<double> f;
  std::size_t last = 0;
  scan_csv(
      in, [](const std::string&, std::size_t) {},
      [&](const std::vector<double>& row, std::size_t lineno) {
        if (row.size() != 2) throw ParseError("expected 'x,F' rows", lineno);
        if (!x.empty() && !(row[0] > x.back())) throw ParseError("x must be strictly increasing", lineno);
        x.push_back(row[0]);
        f.push_back(row[1]);
        last = lineno;
      });
  if (x.size() < 2) throw ParseError("potential file needs at least two rows", last);
  return Potential::from_samples(std::move(x), std::move(f));
}

Potential read_potential_csv(const std::string& path) {
  auto in = open(path);
  return parse_potential_csv(in);
}

json to_json(const PenaltyCertificate& c) {
  return {{"M", c.M},
          {"c_M", c.c_M},
          {"C_M", c.C_M},
          {"A_M", c.A_M},
          {"grid_resolution", c.grid_resolution},
          {"safety_factor", c.safety_factor}};
}

PenaltyCertificate certificate_from_json(const json& j) {
  PenaltyCertificate c;
  c.M = j.at("M").get<double>();
  c.c_M = j.at("c_M").get<double>();
  c.C_M = j.at("C_M").get<double>();
  c.A_M = j.at("A_M").get<double>();
  c.grid_resolution = j.at("grid_resolution").get<double>();
  c.safety_factor = j.at("safety_factor").get<double>();
  return c;
}

json to_json(const PiecewiseConstantFn& u) {
  return {{"a", u.a}, {"b", u.b}, {"breakpoints", u.breakpoints}, {"values", u.values}};
}

PiecewiseConstantFn function_from_json(const json& j) {
  PiecewiseConstantFn u;
  u.a = j.at("a").get<double>();
  u.b = j.at("b").get<double>();
  u.breakpoints = j.at("breakpoints").get<std::vector<double>>();
  u.values = j.at("values").get<std::vector<double>>();
  return canonicalize(u);
}

json to_json(const EnergyBreakdown& e) {
  return {{"tv_k", e.tv_k}, {"fidelity", e.fidelity}, {"total", e.total}};
}

json to_json(const StructureReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"hard", c.hard}, {"margin", c.margin},
                      {"witness", c.witness}});
  }
  json coincidence = json::array();
  for (const auto& c : r.coincidence) coincidence.push_back({c.lo, c.hi});
  json spacing = json::array();
  for (const auto& v : r.spacing_violations) {
    spacing.push_back({{"alpha", v.alpha}, {"beta", v.beta}, {"jumps", v.jumps}, {"values", v.values}});
  }
  json out{{"pass", r.pass},
           {"jumps", r.jumps},
           {"energy", to_json(r.energy)},
           {"budget", r.budget},
           {"range_ok", r.range_ok},
           {"coincidence_points", coincidence},
           {"facet_average_margins", r.facet_average_margins},
           {"spacing_violations", spacing},
           {"pmf_residuals", r.pmf_residuals},
           {"checks", checks}};
  out["monotone_budget"] = r.monotone_budget ? json(*r.monotone_budget) : json(nullptr);
  out["monotone_ok"] = r.monotone_ok ? json(*r.monotone_ok) : json(nullptr);
  return out;
}

json to_json(const GapAuditReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"delta", e.delta},
                       {"excess", e.excess},
                       {"bound", e.bound},
                       {"margin", e.margin},
                       {"fid_decrease", e.fid_decrease},
                       {"fid_bound", e.fid_bound},
                       {"fid_margin", e.fid_margin}});
  }
  return {{"alpha", r.alpha}, {"beta", r.beta},     {"rho", r.rho},     {"c_star", r.c_star},
          {"skipped", r.skipped}, {"notice", r.notice}, {"pass", r.pass}, {"entries", entries}};
}

void write_plot_csv(std::ostream& out, const Signal& g, const PiecewiseConstantFn& u, std::size_t points) {
  out.precision(17);
  out << "x,g,u\n";
  if (points == 0) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.cell_center(i);
      out << x << "," << g.value_at(x) << "," << u.value_at(x) << "\n";
    }
    return;
  }
  for (std::size_t k = 0; k < points; ++k) {
    const double x = points == 1 ? g.a()
                                 : g.a() + g.length() * static_cast<double>(k) / static_cast<double>(points - 1);
    out << x << "," << g.value_at(x) << "," << u.value_at(x) << "\n";
  }
}

}  // namespace tvk::io
