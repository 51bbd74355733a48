// Command-line front end: solve | sweep | verify | exponents | rearrange.
// Exit codes: 0 success; 1 verification check failed (verify only);
// 2 configuration error; 3 solver failure; 4 completed without outer
// convergence; 5 non-contractive outer increments (diagnostic).

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "singelliptic/config.hpp"
#include "singelliptic/estimates.hpp"
#include "singelliptic/grid.hpp"
#include "singelliptic/io.hpp"
#include "singelliptic/model.hpp"
#include "singelliptic/rearrange.hpp"
#include "singelliptic/solver.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace singelliptic;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitNotConverged = 4;
constexpr int kExitNonContractive = 5;

struct Overrides {
  std::optional<double> gamma, theta, m, slack;
  std::optional<int> resolution, max_level;
  std::optional<std::string> output_dir;
};

void apply_overrides(RunConfig& cfg, const Overrides& ov) {
  if (ov.gamma) cfg.problem.gamma = *ov.gamma;
  if (ov.theta) cfg.problem.theta = *ov.theta;
  if (ov.m) cfg.problem.source.m = *ov.m;
  if (ov.slack) cfg.slack = *ov.slack;
  if (ov.resolution) cfg.resolution = *ov.resolution;
  if (ov.max_level) {
    const double tol = cfg.schedule.outer_tol;
    const int max_outer = cfg.schedule.max_outer;
    cfg.schedule = RegularizationSchedule::doubling(*ov.max_level, tol);
    cfg.schedule.max_outer = max_outer;
  }
  if (ov.output_dir) cfg.output_dir = *ov.output_dir;
  cfg.problem.validate();
  cfg.schedule.validate();
  if (cfg.resolution < 2) throw ConfigError("mesh.resolution must be >= 2");
}

int result_exit_code(const SolveResult& res) {
  if (res.non_contractive) return kExitNonContractive;
  if (!res.converged) return kExitNotConverged;
  return kExitOk;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.output_dir) / name).string();
}

/// Runs the full pipeline for one configuration. Throws on solver failure.
struct PipelineOutput {
  SolveResult result;
  EstimateReport report;
};

PipelineOutput run_pipeline(const RunConfig& cfg) {
  auto mesh = build_mesh(cfg.problem.dim, cfg.problem.extents, cfg.resolution);
  PipelineOutput out{
      solve_singular(cfg.problem, mesh, cfg.schedule, cfg.newton), {}};
  out.report = verify(cfg.problem, out.result,
                      GeometryConstants::unit_ball(cfg.problem.dim), cfg.slack);
  return out;
}

int cmd_solve(const std::string& config_path, const Overrides& ov,
              bool want_verify_exit) {
  RunConfig cfg = parse_config_file(config_path);
  apply_overrides(cfg, ov);
  fs::create_directories(cfg.output_dir);

  PipelineOutput out;
  try {
    out = run_pipeline(cfg);
  } catch (const NewtonDivergence& e) {
    json diag;
    diag["error"] = e.what();
    diag["last_residual"] = e.last_residual;
    write_text_file(out_path(cfg, "diagnostic.json"), diag.dump(2) + "\n");
    std::cerr << "solver failure: " << e.what()
              << " (last residual " << format_double(e.last_residual) << ")\n";
    return kExitSolver;
  } catch (const SingularJacobian& e) {
    json diag;
    diag["error"] = e.what();
    write_text_file(out_path(cfg, "diagnostic.json"), diag.dump(2) + "\n");
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  }

  write_field_csv(out_path(cfg, "solution.csv"), out.result.field);
  write_history_csv(out_path(cfg, "history.csv"), out.result);
  write_text_file(out_path(cfg, "result.json"),
                  result_json(cfg.problem, out.result).dump(2) + "\n");
  write_text_file(out_path(cfg, "report.json"),
                  report_json(out.report).dump(2) + "\n");

  json summary = result_json(cfg.problem, out.result);
  summary["report"] = report_json(out.report);
  std::cout << summary.dump(2) << "\n";

  if (want_verify_exit)
    return out.report.all_applicable_pass() ? kExitOk : kExitCheckFailed;
  return result_exit_code(out.result);
}

int cmd_exponents(int N, double p, double theta, double gamma, double m) {
  if (N < 2) throw ConfigError("requires N >= 2");
  if (!(p > 1.0)) throw ConfigError("requires p > 1");
  if (!(static_cast<double>(N) > p)) throw ConfigError("requires N > p");
  if (theta < 0.0 || theta > 1.0) throw ConfigError("requires 0 <= theta <= 1");
  if (!(gamma > 0.0)) throw ConfigError("requires gamma > 0");
  if (!(m >= 1.0)) throw ConfigError("requires m >= 1");

  ProblemSpec spec;  // exponent formulas only: no mesh validation applies
  spec.dim = N;
  spec.p = p;
  spec.theta = theta;
  spec.gamma = gamma;
  spec.source.m = m;
  std::cout << exponents_json(exponents(spec)).dump(2) << "\n";
  return kExitOk;
}

int cmd_rearrange(const std::string& field_path, const std::string& out_csv,
                  int samples) {
  const DiscreteField u = read_field_csv(field_path);
  const RearrangementProfile prof = decreasing_rearrangement(u);
  write_profile_csv(out_csv, prof, samples);

  json j;
  j["max_value"] = prof.max_value;
  j["support_measure"] = prof.support_measure;
  j["total_measure"] = prof.total_measure;
  j["pieces"] = prof.pieces.size();
  j["jumps"] = prof.jumps.size();
  json eq;
  for (double q : {1.0, 2.0}) {
    const auto [mesh_side, profile_side] = equimeasurability_power(u, q);
    json e;
    e["mesh"] = mesh_side;
    e["profile"] = profile_side;
    e["abs_diff"] = std::abs(mesh_side - profile_side);
    eq[q == 1.0 ? "q1" : "q2"] = e;
  }
  j["equimeasurability"] = eq;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

struct SweepCell {
  double gamma, theta, m;
  int resolution;
};

std::string csv_opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string sweep_row(const RunConfig& base, const SweepCell& cell) {
  RunConfig cfg = base;
  cfg.problem.gamma = cell.gamma;
  cfg.problem.theta = cell.theta;
  cfg.problem.source.m = cell.m;
  cfg.resolution = cell.resolution;

  std::ostringstream row;
  row << format_double(cell.gamma) << ',' << format_double(cell.theta) << ','
      << format_double(cell.m) << ',' << cell.resolution << ',';
  try {
    cfg.problem.validate();
    const PipelineOutput out = run_pipeline(cfg);
    const SolveResult& res = out.result;
    const EstimateReport& rep = out.report;
    const auto status_of = [&rep](std::size_t i) {
      return check_status_name(rep.checks[i].status);
    };
    row << regime_name(rep.regime) << ','
        << (res.converged ? "true" : "false") << ','
        << (res.non_contractive ? "true" : "false") << ','
        << res.n_values.size() << ','
        << (res.increments.empty() ? std::string()
                                   : format_double(res.increments.back()))
        << ',' << format_double(res.residual) << ','
        << csv_opt(rep.linf_observed) << ',' << csv_opt(rep.energy_observed)
        << ',' << csv_opt(rep.c_inf) << ',' << csv_opt(rep.energy_printed)
        << ',' << csv_opt(rep.energy_sharper) << ','
        << csv_opt(rep.power_exponent) << ',' << csv_opt(rep.power_bound)
        << ',' << csv_opt(rep.power_observed) << ','
        << csv_opt(rep.critical_bound) << ',' << csv_opt(rep.lr_norm_observed)
        << ',' << status_of(0) << ',' << status_of(1) << ',' << status_of(2)
        << ',' << status_of(3) << ',' << status_of(4) << ',';
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == ',' || c == '\n') c = ';';
    row << ",,,,,,,,,,,,,,,,,,,,," << msg;
    return row.str();
  }
  return row.str();
}

constexpr const char* kSweepHeader =
    "gamma,theta,m,resolution,regime,converged,non_contractive,stages,"
    "final_increment,residual,max_u,energy,c_inf,energy_bound,"
    "energy_bound_sharper,power_exponent,power_bound,power_observed,"
    "critical_bound,lr_norm_observed,linf_status,energy_status,"
    "critical_status,power_status,lr_status,error";

int cmd_sweep(const std::string& config_path, int jobs) {
  const RunConfig base = parse_config_file(config_path);
  fs::create_directories(base.output_dir);

  const std::vector<double> gammas =
      base.sweep.gamma.value_or(std::vector<double>{base.problem.gamma});
  const std::vector<double> thetas =
      base.sweep.theta.value_or(std::vector<double>{base.problem.theta});
  const std::vector<double> ms =
      base.sweep.m.value_or(std::vector<double>{base.problem.source.m});
  const std::vector<int> resolutions =
      base.sweep.resolution.value_or(std::vector<int>{base.resolution});

  std::vector<SweepCell> cells;
  for (double g : gammas)
    for (double t : thetas)
      for (double m : ms)
        for (int r : resolutions) cells.push_back({g, t, m, r});

  std::vector<std::string> rows(cells.size());
  if (jobs < 1) jobs = 1;
  const int workers = std::min<int>(jobs, std::max<std::size_t>(cells.size(), 1));
  std::atomic<std::size_t> next{0};
  const auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      rows[i] = sweep_row(base, cells[i]);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  std::ostringstream out;
  out << kSweepHeader << '\n';
  std::size_t succeeded = 0;
  for (const auto& r : rows) {
    out << r << '\n';
    if (!r.empty() && r.back() == ',') ++succeeded;  // empty error cell
  }
  write_text_file(out_path(base, "sweep.csv"), out.str());
  std::cout << "rows: " << rows.size() << ", succeeded: " << succeeded << "\n";
  if (cells.empty()) return kExitOk;  // header-only output
  return succeeded > 0 ? kExitOk : kExitSolver;
}

int dispatch(int argc, char** argv) {
  CLI::App app{
      "Solver and verification harness for a degenerate singular elliptic "
      "problem"};
  app.require_subcommand(1);

  std::string config_path, field_path;
  std::string rearrange_out = "profile.csv";
  int samples = 257;
  Overrides ov;
  int jobs = 0;

  int exp_N = 3;
  double exp_p = 2.0, exp_theta = 0.0, exp_gamma = 1.0, exp_m = 2.0;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file")->required();
    cmd->add_option("--resolution", ov.resolution, "override mesh.resolution");
    cmd->add_option("--gamma", ov.gamma, "override gamma");
    cmd->add_option("--theta", ov.theta, "override theta");
    cmd->add_option("--m", ov.m, "override source.m");
    cmd->add_option("--slack", ov.slack, "override slack");
    cmd->add_option("--max-level", ov.max_level,
                    "override schedule.max_level (doubling schedule)");
    cmd->add_option("--output-dir", ov.output_dir, "override output.dir");
  };

  CLI::App* solve = app.add_subcommand(
      "solve", "solve one problem and write solution/result/history/report");
  add_common(solve);

  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "solve one problem and gate on the verification checks");
  add_common(verify_cmd);

  CLI::App* exponents_cmd =
      app.add_subcommand("exponents", "print the closed-form exponent set");
  exponents_cmd->add_option("--N", exp_N, "spatial dimension (N > p)");
  exponents_cmd->add_option("--p", exp_p, "growth exponent");
  exponents_cmd->add_option("--theta", exp_theta, "degeneracy strength");
  exponents_cmd->add_option("--gamma", exp_gamma, "singularity strength");
  exponents_cmd->add_option("--m", exp_m, "source Lebesgue exponent");

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid");
  sweep->add_option("--config", config_path, "configuration file")->required();
  sweep->add_option("--jobs", jobs,
                    "worker threads (default: SINGELLIPTIC_JOBS or 1)");

  CLI::App* rearrange =
      app.add_subcommand("rearrange", "profile of a stored field CSV");
  rearrange->add_option("--field", field_path, "field CSV path")->required();
  rearrange->add_option("--output", rearrange_out, "profile CSV output path");
  rearrange->add_option("--samples", samples, "profile sample count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (sweep->parsed() && jobs == 0) {
    if (const char* env = std::getenv("SINGELLIPTIC_JOBS")) {
      try {
        jobs = std::stoi(env);
      } catch (const std::exception&) {
        throw ConfigError("SINGELLIPTIC_JOBS is not an integer");
      }
    }
    if (jobs == 0) jobs = 1;
  }

  if (solve->parsed()) return cmd_solve(config_path, ov, false);
  if (verify_cmd->parsed()) return cmd_solve(config_path, ov, true);
  if (exponents_cmd->parsed())
    return cmd_exponents(exp_N, exp_p, exp_theta, exp_gamma, exp_m);
  if (sweep->parsed()) return cmd_sweep(config_path, jobs);
  if (rearrange->parsed())
    return cmd_rearrange(field_path, rearrange_out, samples);
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const OutOfRegime& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NewtonDivergence& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const SingularJacobian& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
