#pragma once
// Plain-text key=value run configuration: problem parameters, mesh
// resolution, outer schedule, Newton settings, output directory, and
// optional sweep axes. Exact key names are documented in the README.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "singelliptic/model.hpp"
#include "singelliptic/solver.hpp"

namespace singelliptic {

/// Sweep axes. An absent axis keeps the base value from the scalar keys; a
/// present-but-empty axis produces an empty grid (header-only output).
struct SweepGrid {
  std::optional<std::vector<double>> gamma;
  std::optional<std::vector<double>> theta;
  std::optional<std::vector<double>> m;
  std::optional<std::vector<int>> resolution;

  bool any() const {
    return gamma.has_value() || theta.has_value() || m.has_value() ||
           resolution.has_value();
  }
};

struct RunConfig {
  ProblemSpec problem;
  int resolution = 64;
  RegularizationSchedule schedule = RegularizationSchedule::doubling(14);
  NewtonConfig newton;
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  double slack = 0.05;
  SweepGrid sweep;
};

/// Parses configuration text. Unknown keys, malformed numbers, and violated
/// invariants raise ConfigError. `#` starts a comment; blank lines are
/// ignored; later assignments win. A tabulated source with `source.path` is
/// loaded immediately (one sample per line, grid resolution inferred from
/// the sample count).
RunConfig parse_config_text(const std::string& text);

/// Reads and parses a configuration file (ConfigError if unreadable).
RunConfig parse_config_file(const std::string& path);

}  // namespace singelliptic
