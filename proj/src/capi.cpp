#include "vecgarch.h"

#include <exception>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "pipeline.hpp"
#include "portfolio.hpp"

namespace {

thread_local std::string g_last_error;

struct Cleared {
  Cleared() { g_last_error.clear(); }
};

vg_status capture(const std::exception& e, vg_status code) {
  g_last_error = e.what();
  return code;
}

template <typename Fn>
vg_status guarded(Fn&& fn) {
  Cleared clear;
  try {
    fn();
    return VG_OK;
  } catch (const vecgarch::config_error& e) {
    return capture(e, VG_ERR_CONFIG);
  } catch (const vecgarch::data_error& e) {
    return capture(e, VG_ERR_DATA);
  } catch (const vecgarch::numeric_error& e) {
    return capture(e, VG_ERR_NUMERIC);
  } catch (const std::exception& e) {
    return capture(e, VG_ERR_NUMERIC);
  } catch (...) {
    g_last_error = "unknown error";
    return VG_ERR_NUMERIC;
  }
}

vg_status run(const vg_config* cfg,
              void (*runner)(const vecgarch::RunConfig&));

}  // namespace

struct vg_config {
  vecgarch::RunConfig cfg;
};

namespace {

vg_status run(const vg_config* cfg,
              void (*runner)(const vecgarch::RunConfig&)) {
  return guarded([&] {
    if (cfg == nullptr) throw vecgarch::config_error("null configuration");
    vecgarch::validate_config(cfg->cfg);
    runner(cfg->cfg);
  });
}

}  // namespace

extern "C" {

vg_config* vg_config_new(void) {
  try {
    return new vg_config{};
  } catch (...) {
    return nullptr;
  }
}

void vg_config_free(vg_config* cfg) { delete cfg; }

vg_status vg_config_load(vg_config* cfg, const char* path) {
  return guarded([&] {
    if (cfg == nullptr || path == nullptr)
      throw vecgarch::config_error("null argument to vg_config_load");
    cfg->cfg = vecgarch::parse_config_file(path);
  });
}

vg_status vg_config_set(vg_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    if (cfg == nullptr || key == nullptr || value == nullptr)
      throw vecgarch::config_error("null argument to vg_config_set");
    vecgarch::apply_config_key(cfg->cfg, key, value);
  });
}

vg_status vg_run_simulate(const vg_config* cfg) {
  return run(cfg, &vecgarch::pipeline::run_simulate);
}

vg_status vg_run_estimate(const vg_config* cfg) {
  return run(cfg, &vecgarch::pipeline::run_estimate);
}

vg_status vg_run_portfolio(const vg_config* cfg) {
  return run(cfg, &vecgarch::pipeline::run_portfolio);
}

vg_status vg_run_spectrum(const vg_config* cfg) {
  return run(cfg, &vecgarch::pipeline::run_spectrum);
}

const char* vg_last_error(void) { return g_last_error.c_str(); }

long vg_parameter_count(int n) {
  if (n < 1) return 0;
  return vecgarch::portfolio::parameter_count(n);
}

const char* vg_version(void) { return "1.0.0"; }

}  // extern "C"
