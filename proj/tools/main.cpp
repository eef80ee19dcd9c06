// Command-line front end.  All work happens behind the C API; this file only
// maps flags onto config keys and statuses onto exit codes.

#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "vecgarch.h"

namespace {

struct ConfigDeleter {
  void operator()(vg_config* c) const { vg_config_free(c); }
};
using ConfigPtr = std::unique_ptr<vg_config, ConfigDeleter>;

// One subcommand's pending overrides, applied in command-line order on top
// of the config file.
struct CommandState {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  vg_status (*runner)(const vg_config*) = nullptr;
};

void add_key_option(CLI::App* cmd, CommandState& st, const std::string& flag,
                    const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      flag,
      [&st, key](const std::string& v) { st.overrides.emplace_back(key, v); },
      help);
}

void add_common(CLI::App* cmd, CommandState& st) {
  cmd->add_option("--config", st.config_path,
                  "key=value configuration file applied first");
  add_key_option(cmd, st, "--seed", "seed", "random seed (u64)");
  add_key_option(cmd, st, "--out", "out", "output directory");
  add_key_option(cmd, st, "--n", "n", "number of series");
}

int fail(vg_status st) {
  std::fprintf(stderr, "error: %s\n", vg_last_error());
  return static_cast<int>(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Multivariate volatility toolkit: simulation, constrained "
      "quasi-likelihood estimation, and covariance-forecast comparison "
      "for the VEC conditional-covariance model."};
  app.require_subcommand(1);

  CommandState sim, est, port, spec;
  sim.runner = &vg_run_simulate;
  est.runner = &vg_run_estimate;
  port.runner = &vg_run_portfolio;
  spec.runner = &vg_run_spectrum;

  auto* c_sim = app.add_subcommand(
      "simulate", "Draw a return series from the model and write price, "
                  "return and parameter CSVs");
  add_common(c_sim, sim);
  add_key_option(c_sim, sim, "--T", "T", "series length");
  add_key_option(c_sim, sim, "--params", "params",
                 "directory with c.csv, A.csv, B.csv (default: seeded draw)");

  auto* c_est = app.add_subcommand(
      "estimate", "Fit the model to a price CSV by constrained maximum "
                  "likelihood and write estimates, trace and diagnostics");
  add_common(c_est, est);
  add_key_option(c_est, est, "--input", "input", "price CSV to fit");
  add_key_option(c_est, est, "--method", "prelim",
                 "preliminary fit: ewma or ogarch");
  add_key_option(c_est, est, "--grad", "grad",
                 "gradient backend: closed or recursive");
  c_est->add_flag_callback(
      "--no-bfgs",
      [&] { est.overrides.emplace_back("bfgs", "false"); },
      "disable the quasi-Newton curvature correction");

  auto* c_port = app.add_subcommand(
      "portfolio", "Compare covariance forecasts (smoother, orthogonal "
                   "components, full model) on portfolio tasks");
  add_common(c_port, port);
  add_key_option(c_port, port, "--input", "input", "price CSV to fit");
  add_key_option(c_port, port, "--method", "prelim",
                 "preliminary fit: ewma or ogarch");
  add_key_option(c_port, port, "--grad", "grad",
                 "gradient backend: closed or recursive");
  c_port->add_flag_callback(
      "--no-bfgs",
      [&] { port.overrides.emplace_back("bfgs", "false"); },
      "disable the quasi-Newton curvature correction");

  auto* c_spec = app.add_subcommand(
      "spectrum", "Eigenvalue spectra of the quadratic-form representations "
                  "of the dynamic parameters");
  add_common(c_spec, spec);
  add_key_option(c_spec, spec, "--params", "params",
                 "directory with c.csv, A.csv, B.csv");

  CLI11_PARSE(app, argc, argv);

  const CommandState* state = nullptr;
  if (c_sim->parsed()) state = &sim;
  if (c_est->parsed()) state = &est;
  if (c_port->parsed()) state = &port;
  if (c_spec->parsed()) state = &spec;
  if (state == nullptr) return static_cast<int>(VG_ERR_CONFIG);

  ConfigPtr cfg(vg_config_new());
  if (!cfg) {
    std::fprintf(stderr, "error: out of memory\n");
    return static_cast<int>(VG_ERR_NUMERIC);
  }
  if (!state->config_path.empty()) {
    const vg_status st = vg_config_load(cfg.get(), state->config_path.c_str());
    if (st != VG_OK) return fail(st);
  }
  for (const auto& [key, value] : state->overrides) {
    const vg_status st = vg_config_set(cfg.get(), key.c_str(), value.c_str());
    if (st != VG_OK) return fail(st);
  }
  const vg_status st = state->runner(cfg.get());
  if (st != VG_OK) return fail(st);
  return 0;
}
