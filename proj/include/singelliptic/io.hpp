#pragma once
// Deterministic serialization: fields and histories as CSV (numbers printed
// with 17 significant digits), results and reports as JSON. Re-running with
// an identical configuration must produce byte-identical files.

#include <string>

#include "json.hpp"

#include "singelliptic/estimates.hpp"
#include "singelliptic/grid.hpp"
#include "singelliptic/rearrange.hpp"
#include "singelliptic/solver.hpp"

namespace singelliptic {

/// Decimal form used in every CSV cell: printf %.17g, which round-trips
/// doubles exactly and keeps reruns byte-identical.
std::string format_double(double v);

std::string read_text_file(const std::string& path);  // throws ConfigError
void write_text_file(const std::string& path, const std::string& content);

/// Nodal field as CSV ("x,value" or "x,y,value", one row per node in node
/// order) plus a `<path>.meta.json` sidecar carrying {dim, resolution,
/// extents} so the mesh can be rebuilt on load.
void write_field_csv(const std::string& path, const DiscreteField& u);

/// Loads a field written by write_field_csv (requires the sidecar). Throws
/// ConfigError on malformed input.
DiscreteField read_field_csv(const std::string& path);

nlohmann::json problem_json(const ProblemSpec& spec);
nlohmann::json result_json(const ProblemSpec& spec, const SolveResult& result);
nlohmann::json report_json(const EstimateReport& report);
nlohmann::json exponents_json(const ExponentSet& exps);

/// Outer-loop history: stage,n,newton_iters,residual,increment (the first
/// stage has no increment; the cell is left empty).
void write_history_csv(const std::string& path, const SolveResult& result);

/// Rearrangement profile sampled at `samples` uniform points of [0, |Omega|]:
/// columns s,ustar.
void write_profile_csv(const std::string& path,
                       const RearrangementProfile& profile, int samples);

}  // namespace singelliptic
