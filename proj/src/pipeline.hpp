#pragma once

#include "config.hpp"

namespace vecgarch::pipeline {

// Each runner creates cfg.out (and any subdirectories) and writes its result
// files there.  If a run throws, every file it already wrote is removed so a
// failed run never leaves partial output behind.

// Draws parameters (from cfg.params_dir, else a seeded feasible draw), then
// simulates T observations.  Writes prices.csv, returns.csv, H0.csv and
// params_true/{c,A,B}.csv.
void run_simulate(const RunConfig& cfg);

// Price CSV -> log returns -> preliminary fit -> constrained maximum
// likelihood.  Writes params_hat/{c,A,B}.csv, trace.csv, summary.txt,
// spectrum_A.csv, spectrum_B.csv and (unless disabled) std_errors.csv.
void run_estimate(const RunConfig& cfg);

// Fits the exponentially weighted, orthogonal-components and full
// multivariate models to the same returns and compares them: equal-weight
// volatility MSE, random-portfolio R^2 wins, minimum-variance portfolios.
// Writes comparison.csv, comparison.txt, weights_*.csv, params_vec/ and the
// fitted model's spectra.
void run_portfolio(const RunConfig& cfg);

// Eigenvalue spectra of the quadratic-form representations of A and B
// (from cfg.params_dir, else the canonical feasible point at cfg.n).
// Writes spectrum_A.csv, spectrum_B.csv and summary.txt.
void run_spectrum(const RunConfig& cfg);

}  // namespace vecgarch::pipeline
