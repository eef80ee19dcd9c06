#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "types.hpp"

namespace vecgarch::portfolio {

// Covariance of net returns exp(z) - 1 implied by a log-return covariance H.
// Default: the lognormal second-moment identity entrywise, exp(H_ij) - 1.
// The literal elementwise-sum reading (exp((H^2)_ij) - 1) is kept behind a
// switch for comparison.
Matrix net_return_cov(const Matrix& H, bool literal_second_moment = false);

// argmin w'Aw subject to sum(w) = 1.  Near-singular A falls back to the
// null-space branch: the projection of the ones vector onto the null space,
// normalized to unit sum.
Vector min_variance_weights(const Matrix& A);

// Mean squared deviation between a predicted volatility path and the
// absolute-return proxy.
double mse_vs_proxy(const std::vector<double>& vol,
                    const std::vector<double>& returns);

struct ModelComparison {
  std::vector<std::string> names;
  std::vector<double> mse;
  std::vector<long> r2_wins;
  std::vector<double> r2_win_pct;
  std::vector<double> opt_variance;
  int n_trials = 0;
};

// Random-portfolio R^2 contest: per trial, normal weights normalized to unit
// sum, |portfolio net return| regressed (with intercept) on each model's
// predicted portfolio volatility; the highest R^2 wins, ties to the lowest
// index.  Trial streams are derived from (seed, trial) so ordering is
// reproducible.
ModelComparison r2_ranking(const std::vector<std::string>& names,
                           const std::vector<std::vector<Matrix>>& H_paths,
                           const Sample& sample, int n_trials,
                           std::uint64_t seed,
                           bool literal_second_moment = false);

struct SpectrumReport {
  Vector eig_A;  // eigenvalues of sigma(A), descending
  Vector eig_B;
  int rank_A = 0;  // count above 1e-8 of the top eigenvalue
  int rank_B = 0;
};

SpectrumReport spectrum_report(const VecParams& params);

// Free parameters of the model at dimension n: N(2N+1), N = n(n+1)/2.
long parameter_count(int n);

}  // namespace vecgarch::portfolio
