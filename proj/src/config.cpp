#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace vecgarch {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': not a number: '" + v + "'");
  }
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': not an integer: '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': not an unsigned integer: '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw config_error("config key '" + key + "': not a boolean: '" + v + "'");
}

}  // namespace

optimizer::OptimizerConfig RunConfig::optimizer_config() const {
  optimizer::OptimizerConfig oc;
  oc.constraints = constraints;
  oc.f_tol = f_tol;
  oc.max_outer = max_iter;
  oc.use_bfgs = bfgs;
  oc.rho_full_model = rho_full_model;
  return oc;
}

void apply_config_key(RunConfig& cfg, const std::string& key,
                      const std::string& value) {
  if (key == "input") cfg.input = value;
  else if (key == "out") cfg.out = value;
  else if (key == "params") cfg.params_dir = value;
  else if (key == "n") cfg.n = static_cast<int>(parse_int(key, value));
  else if (key == "T") cfg.T = static_cast<int>(parse_int(key, value));
  else if (key == "seed") cfg.seed = parse_u64(key, value);
  else if (key == "date_from") cfg.date_from = value;
  else if (key == "date_to") cfg.date_to = value;
  else if (key == "eps_ab") cfg.constraints.eps_AB = parse_double(key, value);
  else if (key == "eps_a") cfg.constraints.eps_A = parse_double(key, value);
  else if (key == "eps_b") cfg.constraints.eps_B = parse_double(key, value);
  else if (key == "eps_c") cfg.constraints.eps_c = parse_double(key, value);
  else if (key == "eps_b_tilde") cfg.constraints.eps_tilde_B = parse_double(key, value);
  else if (key == "K") cfg.K = parse_double(key, value);
  else if (key == "f_tol") cfg.f_tol = parse_double(key, value);
  else if (key == "max_iter") cfg.max_iter = static_cast<int>(parse_int(key, value));
  else if (key == "bfgs") cfg.bfgs = parse_bool(key, value);
  else if (key == "grad") {
    if (value == "closed") cfg.grad = optimizer::GradBackend::Closed;
    else if (value == "recursive") cfg.grad = optimizer::GradBackend::Recursive;
    else throw config_error("config key 'grad': expected closed|recursive");
  } else if (key == "trunc_delta") cfg.trunc_delta = parse_double(key, value);
  else if (key == "prelim") {
    if (value == "ewma") cfg.prelim_method = prelim::ProxyMethod::Ewma;
    else if (value == "ogarch") cfg.prelim_method = prelim::ProxyMethod::Ogarch;
    else if (value == "dcc") cfg.prelim_method = prelim::ProxyMethod::Dcc;
    else if (value == "gogarch") cfg.prelim_method = prelim::ProxyMethod::GoGarch;
    else if (value == "ica") cfg.prelim_method = prelim::ProxyMethod::Ica;
    else throw config_error("config key 'prelim': expected ewma|ogarch "
                            "(dcc|gogarch|ica are declared but not implemented)");
  } else if (key == "lambda") cfg.lambda = parse_double(key, value);
  else if (key == "n_trials") cfg.n_trials = static_cast<int>(parse_int(key, value));
  else if (key == "rho_full_model") cfg.rho_full_model = parse_bool(key, value);
  else if (key == "net_return_literal") cfg.net_return_literal = parse_bool(key, value);
  else if (key == "std_errors") cfg.std_errors = parse_bool(key, value);
  else throw config_error("unknown config key '" + key + "'");
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw config_error("config line " + std::to_string(lineno) + ": empty key");
    try {
      apply_config_key(cfg, key, value);
    } catch (const config_error& e) {
      throw config_error("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  const auto& c = cfg.constraints;
  if (!(c.eps_AB > 0 && c.eps_AB < 1) || !(c.eps_tilde_B > 0 && c.eps_tilde_B < 1))
    throw config_error("stationarity/contraction tolerances must lie in (0,1)");
  if (!(c.eps_A > 0) || !(c.eps_B > 0) || !(c.eps_c > 0))
    throw config_error("positivity tolerances must be > 0");
  if (cfg.K < 0) throw config_error("K must be >= 0 (0 = derive from data)");
  if (!(cfg.f_tol > 0)) throw config_error("f_tol must be > 0");
  if (cfg.max_iter < 1) throw config_error("max_iter must be >= 1");
  if (!(cfg.lambda > 0 && cfg.lambda < 1))
    throw config_error("lambda must lie in (0,1)");
  if (cfg.trunc_delta < 0) throw config_error("trunc_delta must be >= 0");
  if (cfg.n < 0) throw config_error("n must be >= 0");
  if (cfg.T < 1) throw config_error("T must be >= 1");
  if (cfg.n_trials < 1) throw config_error("n_trials must be >= 1");
}

}  // namespace vecgarch
