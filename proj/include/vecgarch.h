/* C interface of the multivariate volatility estimation library.
 *
 * Every entry point returns a vg_status; anything but VG_OK left a
 * thread-local message readable through vg_last_error().  The status values
 * double as the CLI exit codes.
 */
#ifndef VECGARCH_H
#define VECGARCH_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vg_status {
  VG_OK = 0,
  VG_ERR_CONFIG = 1,  /* bad option, bad config file, bad combination */
  VG_ERR_DATA = 2,    /* unreadable or invalid input data */
  VG_ERR_NUMERIC = 3  /* the computation itself broke down */
} vg_status;

/* A run configuration: the full key=value set of the config file format.
 * Opaque; create with vg_config_new, release with vg_config_free. */
typedef struct vg_config vg_config;

vg_config* vg_config_new(void);
void vg_config_free(vg_config* cfg);

/* Replaces cfg with the contents of a key=value file ('#' comments). */
vg_status vg_config_load(vg_config* cfg, const char* path);

/* Applies one key=value override on top of whatever cfg already holds. */
vg_status vg_config_set(vg_config* cfg, const char* key, const char* value);

/* The four pipeline commands.  Each validates cfg, runs, and writes its
 * result files under the configured output directory; on failure partial
 * outputs are removed. */
vg_status vg_run_simulate(const vg_config* cfg);
vg_status vg_run_estimate(const vg_config* cfg);
vg_status vg_run_portfolio(const vg_config* cfg);
vg_status vg_run_spectrum(const vg_config* cfg);

/* Message of the most recent failure on the calling thread ("" if none). */
const char* vg_last_error(void);

/* Free parameters of the n-dimensional model, N(2N+1) with N = n(n+1)/2;
 * 0 when n < 1. */
long vg_parameter_count(int n);

const char* vg_version(void);

#ifdef __cplusplus
}
#endif

#endif /* VECGARCH_H */
