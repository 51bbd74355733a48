#include "singelliptic/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace singelliptic {

namespace {

using nlohmann::json;

json opt_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

void write_field_csv(const std::string& path, const DiscreteField& u) {
  const Mesh& mesh = *u.mesh;
  std::ostringstream out;
  out << (mesh.dim == 1 ? "x,value\n" : "x,y,value\n");
  for (std::size_t v = 0; v < mesh.n_nodes(); ++v) {
    out << format_double(mesh.nodes[v][0]);
    if (mesh.dim == 2) out << ',' << format_double(mesh.nodes[v][1]);
    out << ',' << format_double(u.values[v]) << '\n';
  }
  write_text_file(path, out.str());

  json meta;
  meta["dim"] = mesh.dim;
  meta["resolution"] = mesh.resolution;
  meta["extents"] = {mesh.extents[0], mesh.extents[1]};
  write_text_file(path + ".meta.json", meta.dump(2) + "\n");
}

DiscreteField read_field_csv(const std::string& path) {
  json meta;
  try {
    meta = json::parse(read_text_file(path + ".meta.json"));
  } catch (const json::exception& e) {
    throw ConfigError("malformed field sidecar for " + path + ": " + e.what());
  }
  int dim = 0, resolution = 0;
  std::array<double, 2> extents{1.0, 1.0};
  try {
    dim = meta.at("dim").get<int>();
    resolution = meta.at("resolution").get<int>();
    const auto ext = meta.at("extents");
    extents[0] = ext.at(0).get<double>();
    extents[1] = ext.at(1).get<double>();
  } catch (const json::exception& e) {
    throw ConfigError("incomplete field sidecar for " + path + ": " + e.what());
  }
  auto mesh = build_mesh(dim, extents, resolution);

  DiscreteField u(mesh);
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("empty field file: " + path);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= mesh->n_nodes())
      throw ConfigError("field file has more rows than mesh nodes: " + path);
    const std::size_t comma = line.rfind(',');
    if (comma == std::string::npos)
      throw ConfigError("malformed field row in " + path + ": " + line);
    try {
      std::size_t idx = 0;
      const std::string cell = line.substr(comma + 1);
      u.values[row] = std::stod(cell, &idx);
      if (idx != cell.size())
        throw ConfigError("malformed field value in " + path + ": " + cell);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("malformed field row in " + path + ": " + line);
    }
    ++row;
  }
  if (row != mesh->n_nodes())
    throw ConfigError("field file has fewer rows than mesh nodes: " + path);
  return u;
}

json problem_json(const ProblemSpec& spec) {
  json j;
  j["p"] = spec.p;
  j["theta"] = spec.theta;
  j["alpha"] = spec.alpha;
  j["gamma"] = spec.gamma;
  j["C"] = spec.C;
  j["dim"] = spec.dim;
  j["extents"] = {spec.extents[0], spec.extents[1]};
  json src;
  switch (spec.source.kind) {
    case SourceSpec::Kind::Constant:
      src["kind"] = "constant";
      src["value"] = spec.source.value;
      break;
    case SourceSpec::Kind::RadialPower:
      src["kind"] = "radial_power";
      src["exponent"] = spec.source.exponent;
      break;
    case SourceSpec::Kind::Tabulated:
      src["kind"] = "tabulated";
      src["sample_res"] = spec.source.sample_res;
      src["sample_count"] = spec.source.samples.size();
      break;
  }
  src["m"] = spec.source.m;
  j["source"] = src;
  return j;
}

json result_json(const ProblemSpec& spec, const SolveResult& result) {
  json j;
  j["problem"] = problem_json(spec);
  j["n_values"] = result.n_values;
  j["increments"] = result.increments;
  j["newton_iters"] = result.newton_iters;
  j["residuals"] = result.residuals;
  j["stages"] = result.n_values.size();
  j["residual"] = result.residual;
  j["converged"] = result.converged;
  j["non_contractive"] = result.non_contractive;
  return j;
}

json exponents_json(const ExponentSet& exps) {
  json j;
  j["p_star"] = opt_json(exps.p_star);
  j["p_prime"] = exps.p_prime;
  j["kappa"] = exps.kappa;
  j["m1"] = opt_json(exps.m1);
  j["r"] = opt_json(exps.r);
  j["sigma"] = opt_json(exps.sigma);
  j["nu"] = opt_json(exps.nu);
  j["lambda"] = opt_json(exps.lambda);
  j["m_floor"] = exps.m_floor;
  j["regime"] = regime_name(exps.regime);
  return j;
}

json report_json(const EstimateReport& report) {
  json j;
  j["regime"] = regime_name(report.regime);
  j["slack"] = report.slack;
  j["exponents"] = exponents_json(report.exps);
  j["c_inf"] = opt_json(report.c_inf);
  j["linf_observed"] = opt_json(report.linf_observed);
  j["energy_printed"] = opt_json(report.energy_printed);
  j["energy_sharper"] = opt_json(report.energy_sharper);
  j["energy_observed"] = opt_json(report.energy_observed);
  j["lr_norm_observed"] = opt_json(report.lr_norm_observed);
  j["power_exponent"] = opt_json(report.power_exponent);
  j["power_bound"] = opt_json(report.power_bound);
  j["power_observed"] = opt_json(report.power_observed);
  j["critical_bound"] = opt_json(report.critical_bound);
  j["critical_observed"] = opt_json(report.critical_observed);
  j["all_applicable_pass"] = report.all_applicable_pass();
  json checks = json::array();
  for (const auto& c : report.checks) {
    json cj;
    cj["name"] = c.name;
    cj["status"] = check_status_name(c.status);
    cj["observed"] = opt_json(c.observed);
    cj["bound"] = opt_json(c.bound);
    cj["margin"] = opt_json(c.margin);
    cj["reason"] = c.reason;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  return j;
}

void write_history_csv(const std::string& path, const SolveResult& result) {
  std::ostringstream out;
  out << "stage,n,newton_iters,residual,increment\n";
  for (std::size_t k = 0; k < result.n_values.size(); ++k) {
    out << k << ',' << format_double(result.n_values[k]) << ','
        << result.newton_iters[k] << ',' << format_double(result.residuals[k])
        << ',';
    if (k > 0) out << format_double(result.increments[k - 1]);
    out << '\n';
  }
  write_text_file(path, out.str());
}

void write_profile_csv(const std::string& path,
                       const RearrangementProfile& profile, int samples) {
  if (samples < 2) throw ConfigError("profile sampling needs >= 2 points");
  std::ostringstream out;
  out << "s,ustar\n";
  for (int i = 0; i < samples; ++i) {
    const double s =
        profile.total_measure * static_cast<double>(i) / (samples - 1);
    out << format_double(s) << ',' << format_double(profile.ustar(s)) << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace singelliptic
