#include "singelliptic/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace singelliptic {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) throw ConfigError("empty value for key '" + key + "'");
  try {
    std::size_t idx = 0;
    const double d = std::stod(v, &idx);
    if (idx != v.size())
      throw ConfigError("trailing characters in value for key '" + key + "'");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse number '" + v + "' for key '" + key + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("cannot parse integer '" + v + "' for key '" + key + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("cannot parse integer '" + v + "' for key '" + key + "'");
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(value);
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  for (const auto& tok : split_list(value)) out.push_back(parse_double(key, tok));
  return out;
}

std::vector<int> parse_int_list(const std::string& key,
                                const std::string& value) {
  std::vector<int> out;
  for (const auto& tok : split_list(value)) out.push_back(parse_int(key, tok));
  return out;
}

double parse_m_value(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "inf" || v == "infinity" || v == "Inf")
    return 1e6;  // bounded-source convention: large finite exponent
  return parse_double(key, v);
}

std::vector<double> load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open source sample file: " + path);
  std::vector<double> samples;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    samples.push_back(parse_double("source.path sample", line));
  }
  if (samples.empty())
    throw ConfigError("source sample file is empty: " + path);
  return samples;
}

int infer_sample_res(std::size_t count, int dim) {
  if (dim == 1) {
    if (count < 2)
      throw ConfigError("tabulated source needs at least 2 samples");
    return static_cast<int>(count) - 1;
  }
  const int side = static_cast<int>(std::llround(std::sqrt(
      static_cast<double>(count))));
  if (side < 2 ||
      static_cast<std::size_t>(side) * static_cast<std::size_t>(side) != count)
    throw ConfigError(
        "tabulated 2D source needs a perfect-square sample count");
  return side - 1;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::string source_kind = "constant";
  std::string source_path;
  bool schedule_levels_set = false;
  int schedule_max_level = 14;
  double schedule_tol = cfg.schedule.outer_tol;
  int schedule_max_outer = cfg.schedule.max_outer;
  std::vector<double> explicit_levels;
  std::vector<double> domain;

  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key=value, got: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "p") cfg.problem.p = parse_double(key, value);
    else if (key == "theta") cfg.problem.theta = parse_double(key, value);
    else if (key == "alpha") cfg.problem.alpha = parse_double(key, value);
    else if (key == "gamma") cfg.problem.gamma = parse_double(key, value);
    else if (key == "C") cfg.problem.C = parse_double(key, value);
    else if (key == "dim") cfg.problem.dim = parse_int(key, value);
    else if (key == "domain") domain = parse_double_list(key, value);
    else if (key == "mesh.resolution") cfg.resolution = parse_int(key, value);
    else if (key == "source.kind") source_kind = value;
    else if (key == "source.value") cfg.problem.source.value = parse_double(key, value);
    else if (key == "source.exponent") cfg.problem.source.exponent = parse_double(key, value);
    else if (key == "source.path") source_path = value;
    else if (key == "source.m") cfg.problem.source.m = parse_m_value(key, value);
    else if (key == "schedule.levels") {
      explicit_levels = parse_double_list(key, value);
      schedule_levels_set = true;
    } else if (key == "schedule.max_level") schedule_max_level = parse_int(key, value);
    else if (key == "schedule.outer_tol") schedule_tol = parse_double(key, value);
    else if (key == "schedule.max_outer") schedule_max_outer = parse_int(key, value);
    else if (key == "newton.residual_tol") cfg.newton.residual_tol = parse_double(key, value);
    else if (key == "newton.max_iter") cfg.newton.max_iter = parse_int(key, value);
    else if (key == "newton.damping") cfg.newton.damping = parse_double(key, value);
    else if (key == "newton.positivity_floor") cfg.newton.positivity_floor = parse_double(key, value);
    else if (key == "output.dir") cfg.output_dir = value;
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "slack") cfg.slack = parse_double(key, value);
    else if (key == "sweep.gamma") cfg.sweep.gamma = parse_double_list(key, value);
    else if (key == "sweep.theta") cfg.sweep.theta = parse_double_list(key, value);
    else if (key == "sweep.m") cfg.sweep.m = parse_double_list(key, value);
    else if (key == "sweep.resolution") cfg.sweep.resolution = parse_int_list(key, value);
    else throw ConfigError("unknown config key: " + key);
  }

  if (!domain.empty()) {
    if (domain.size() > 2)
      throw ConfigError("domain accepts at most 2 extents");
    cfg.problem.extents[0] = domain[0];
    cfg.problem.extents[1] = domain.size() > 1 ? domain[1] : domain[0];
  }

  if (source_kind == "constant") {
    cfg.problem.source.kind = SourceSpec::Kind::Constant;
  } else if (source_kind == "radial_power") {
    cfg.problem.source.kind = SourceSpec::Kind::RadialPower;
  } else if (source_kind == "tabulated") {
    cfg.problem.source.kind = SourceSpec::Kind::Tabulated;
    if (!source_path.empty()) {
      cfg.problem.source.samples = load_samples(source_path);
      cfg.problem.source.sample_res =
          infer_sample_res(cfg.problem.source.samples.size(), cfg.problem.dim);
    }
  } else {
    throw ConfigError("unknown source.kind: " + source_kind);
  }

  if (schedule_levels_set) {
    cfg.schedule.n_values = explicit_levels;
  } else {
    if (schedule_max_level < 0 || schedule_max_level > 60)
      throw ConfigError("schedule.max_level must be in [0, 60]");
    cfg.schedule = RegularizationSchedule::doubling(schedule_max_level);
  }
  cfg.schedule.outer_tol = schedule_tol;
  cfg.schedule.max_outer = schedule_max_outer;
  cfg.schedule.validate();

  if (cfg.resolution < 2) throw ConfigError("mesh.resolution must be >= 2");
  if (!(cfg.slack >= 0.0)) throw ConfigError("slack must be nonnegative");
  cfg.problem.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace singelliptic
