#pragma once

#include <cstdint>
#include <string>

#include "constraints.hpp"
#include "optimizer.hpp"
#include "prelim.hpp"

namespace vecgarch {

// One run of a pipeline command.  Every knob lives in the flat key=value
// config file; CLI flags override individual keys.
struct RunConfig {
  std::string input;     // price CSV (estimate / portfolio)
  std::string out = "out";
  std::string params_dir;  // parameter CSVs (simulate / spectrum input)
  int n = 0;               // asset count; 0 = every column
  int T = 1000;            // simulated series length
  std::uint64_t seed = 0;
  std::string date_from, date_to;

  constraints::ConstraintConfig constraints;  // K here is the resolved value
  double K = 0.0;                             // 0 = derive from the sample

  double f_tol = 1e-5;
  int max_iter = 500;
  bool bfgs = true;
  optimizer::GradBackend grad = optimizer::GradBackend::Closed;
  double trunc_delta = 0.0;  // 0 = exact gradient recursion

  prelim::ProxyMethod prelim_method = prelim::ProxyMethod::Ogarch;
  double lambda = 0.94;

  int n_trials = 1000;
  bool rho_full_model = false;
  bool net_return_literal = false;
  bool std_errors = true;

  optimizer::OptimizerConfig optimizer_config() const;
};

// Parses `key = value` lines; '#' starts a comment; unknown keys and
// malformed values are configuration errors naming the line.
RunConfig parse_config_file(const std::string& path);

// Applies one key=value override (same key set as the file).
void apply_config_key(RunConfig& cfg, const std::string& key,
                      const std::string& value);

// Range checks that do not depend on the data.
void validate_config(const RunConfig& cfg);

}  // namespace vecgarch
