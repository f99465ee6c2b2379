#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvk/diagnostics.hpp"
#include "tvk/penalty.hpp"
#include "tvk/potential.hpp"
#include "tvk/signal.hpp"

namespace tvk::io {

using json = nlohmann::json;

/// Contents of a signal CSV.
///
/// Rows are either "g" or "x,g" (x at cell centers, uniformly spaced). An
/// optional header row and '#' comment lines are allowed; a comment of the
/// form "# a=0,b=1,lambda=10,interp=linear" supplies metadata.
struct SignalFile {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> samples;
  std::optional<double> lambda;
  Interpolation interp = Interpolation::PiecewiseConstantCells;
};

SignalFile parse_signal_csv(std::istream& in);
SignalFile read_signal_csv(const std::string& path);
void write_signal_csv(std::ostream& out, const Signal& g);

/// Rows "x,F" with x strictly increasing; optional header and comments.
Potential parse_potential_csv(std::istream& in);
Potential read_potential_csv(const std::string& path);

json to_json(const PenaltyCertificate& cert);
PenaltyCertificate certificate_from_json(const json& j);

json to_json(const PiecewiseConstantFn& u);
PiecewiseConstantFn function_from_json(const json& j);

json to_json(const EnergyBreakdown& e);
json to_json(const StructureReport& r);
json to_json(const GapAuditReport& r);

/// Rows x, g(x), u(x) on a uniform grid of `points` (cell centers when zero).
void write_plot_csv(std::ostream& out, const Signal& g, const PiecewiseConstantFn& u,
                    std::size_t points = 0);

}  // namespace tvk::io
