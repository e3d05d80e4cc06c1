#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <set>
#include <sstream>

#include "radcav/errors.hpp"

namespace radcav::cli {

namespace {

double to_real(const std::string& key, const std::string& text) {
  try {
    size_t pos = 0;
    const double v = std::stod(text, &pos);
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not a number: '" + text + "'");
  }
}

int to_int(const std::string& key, const std::string& text) {
  const double v = to_real(key, text);
  if (v != std::floor(v)) throw ConfigError("config: key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config: key '" + key + "' must be a boolean, got '" + text + "'");
}

std::vector<double> split_reals(const std::string& key, std::istringstream& is) {
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(to_real(key, tok));
  return out;
}

}  // namespace

ScalarModel parse_scalar_model(const std::string& text) {
  std::istringstream is(text);
  std::string family;
  if (!(is >> family)) throw ConfigError("config: empty scalar family");
  const std::vector<double> nums = split_reals(family, is);
  auto triples = [&](size_t from) {
    if ((nums.size() - from) % 3 != 0)
      throw ConfigError("config: family '" + family +
                        "' expects coefficient triples (coeff exponent shift)");
    std::vector<ScalarTerm> t;
    for (size_t i = from; i < nums.size(); i += 3)
      t.push_back({nums[i], nums[i + 1], nums[i + 2]});
    return t;
  };
  try {
    if (family == "quadratic") {
      if (nums.size() != 1) throw ConfigError("config: quadratic expects one coefficient");
      return ScalarModel::quadratic(nums[0]);
    }
    if (family == "log_entropy") {
      if (nums.size() != 1) throw ConfigError("config: log_entropy expects one coefficient");
      return ScalarModel::log_entropy(nums[0]);
    }
    if (family == "power_sum") return ScalarModel::power_sum(triples(0));
    if (family == "inverse_power_sum") {
      if (nums.empty())
        throw ConfigError("config: inverse_power_sum expects the linear coefficient first");
      return ScalarModel::inverse_power_sum(nums[0], triples(1));
    }
    if (family == "custom") return ScalarModel::custom(triples(0));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  throw ConfigError("config: unknown scalar family '" + family + "'");
}

std::vector<double> RunConfig::phi0_grid() const {
  if (phi0_count < 1) throw ConfigError("config: sweep count must be >= 1");
  if (!(phi0_min > 0.0) || !(phi0_max >= phi0_min))
    throw ConfigError("config: sweep needs 0 < phi0_min <= phi0_max");
  std::vector<double> g(static_cast<size_t>(phi0_count));
  if (phi0_count == 1) {
    g[0] = phi0_min;
    return g;
  }
  for (int i = 0; i < phi0_count; ++i) {
    const double t = static_cast<double>(i) / (phi0_count - 1);
    g[static_cast<size_t>(i)] = log_spacing
                                    ? phi0_min * std::pow(phi0_max / phi0_min, t)
                                    : phi0_min + (phi0_max - phi0_min) * t;
  }
  return g;
}

RunConfig load_config(const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  static const std::set<std::string> known = {
      "energy.d", "energy.g", "energy.h",
      "boundary.kind", "boundary.G0", "boundary.G1", "boundary.v0",
      "solver.rel_tol", "solver.abs_tol", "solver.s0_factor", "solver.s0",
      "solver.eps_Q_rel", "solver.eps_ab", "solver.bracket_tol", "solver.xi_max",
      "solver.inner_s0_factor", "solver.max_sample_spacing",
      "solver.inner_max_sample_spacing", "solver.t_max_factor", "solver.max_steps",
      "sweep.phi0_min", "sweep.phi0_max", "sweep.count", "sweep.spacing", "sweep.tau",
      "output.dir", "output.svg", "output.threads"};

  RunConfig cfg;
  for (const auto& [section, child] : tree) {
    if (child.empty() && !child.data().empty())
      throw ConfigError("config: top-level key '" + section + "' outside any section");
    for (const auto& [key, value] : child) {
      const std::string full = section + "." + key;
      if (known.find(full) == known.end())
        throw ConfigError("config: unknown key '" + full + "'");
      const std::string& v = value.data();
      if (full == "energy.d") cfg.d = to_int(full, v);
      else if (full == "energy.g") cfg.g = parse_scalar_model(v);
      else if (full == "energy.h") cfg.h = parse_scalar_model(v);
      else if (full == "boundary.kind") {
        if (v == "stress_free") cfg.boundary.kind = BoundaryKind::stress_free;
        else if (v == "with_content") cfg.boundary.kind = BoundaryKind::with_content;
        else throw ConfigError("config: boundary.kind must be stress_free or with_content");
      } else if (full == "boundary.G0") cfg.boundary.G0 = to_real(full, v);
      else if (full == "boundary.G1") cfg.boundary.G1 = to_real(full, v);
      else if (full == "boundary.v0") cfg.v0_override = to_real(full, v);
      else if (full == "solver.rel_tol") cfg.solver.rel_tol = to_real(full, v);
      else if (full == "solver.abs_tol") cfg.solver.abs_tol = to_real(full, v);
      else if (full == "solver.s0_factor") cfg.solver.s0_factor = to_real(full, v);
      else if (full == "solver.s0") cfg.s0_override = to_real(full, v);
      else if (full == "solver.eps_Q_rel") cfg.solver.eps_Q_rel = to_real(full, v);
      else if (full == "solver.eps_ab") cfg.solver.eps_ab = to_real(full, v);
      else if (full == "solver.bracket_tol") cfg.solver.bracket_tol = to_real(full, v);
      else if (full == "solver.xi_max") cfg.solver.xi_max = to_real(full, v);
      else if (full == "solver.inner_s0_factor") cfg.solver.inner_s0_factor = to_real(full, v);
      else if (full == "solver.max_sample_spacing")
        cfg.solver.max_sample_spacing = to_real(full, v);
      else if (full == "solver.inner_max_sample_spacing")
        cfg.solver.inner_max_sample_spacing = to_real(full, v);
      else if (full == "solver.t_max_factor") cfg.solver.t_max_factor = to_real(full, v);
      else if (full == "solver.max_steps") cfg.solver.max_steps = to_int(full, v);
      else if (full == "sweep.phi0_min") cfg.phi0_min = to_real(full, v);
      else if (full == "sweep.phi0_max") cfg.phi0_max = to_real(full, v);
      else if (full == "sweep.count") cfg.phi0_count = to_int(full, v);
      else if (full == "sweep.spacing") {
        if (v == "linear") cfg.log_spacing = false;
        else if (v == "log") cfg.log_spacing = true;
        else throw ConfigError("config: sweep.spacing must be linear or log");
      } else if (full == "sweep.tau") cfg.tau = to_real(full, v);
      else if (full == "output.dir") cfg.out_dir = v;
      else if (full == "output.svg") cfg.svg = to_bool(full, v);
      else if (full == "output.threads") cfg.threads = to_int(full, v);
    }
  }

  if (cfg.d < 2) throw ConfigError("config: energy.d must be >= 2");
  if (!(cfg.solver.rel_tol > 0.0) || !(cfg.solver.abs_tol > 0.0))
    throw ConfigError("config: tolerances must be positive");
  if (cfg.solver.eps_ab < 0.0 || !(cfg.solver.eps_Q_rel > 0.0))
    throw ConfigError("config: stop tolerances out of range");
  if (!(cfg.solver.xi_max > 0.0)) throw ConfigError("config: solver.xi_max must be positive");
  if (!(cfg.tau > 0.0)) throw ConfigError("config: sweep.tau must be positive");
  if (cfg.threads < 0) throw ConfigError("config: output.threads must be >= 0");
  return cfg;
}

}  // namespace radcav::cli
