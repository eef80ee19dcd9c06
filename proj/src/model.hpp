#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "constraints.hpp"
#include "types.hpp"

namespace vecgarch::model {

// Conditional covariance path of the recursion h_t = c + A eta_{t-1}
// + B h_{t-1}, t = 1..T.  Index t-1 of each array holds time t.
struct FilterOutput {
  std::vector<Matrix> H;
  std::vector<Vector> h;
  std::vector<Vector> eta;  // eta_t = vech(z_t z_t'), t = 1..T
};

// math((I - A - B)^{-1} c).  Requires sigma_max(A+B) < 1.
Matrix stationary_variance(const VecParams& params);

// Presample resolution order: explicit argument, then sample.H0, then the
// stationary variance of params.
FilterOutput filter(const VecParams& params, const Sample& sample,
                    const std::optional<Matrix>& H0 = std::nullopt);

struct LoglikDiag {
  int floored = 0;       // observations whose H_t needed an eigenvalue floor
  double max_cond = 0.0; // largest condition number encountered
};

// Gaussian quasi negative log-likelihood
//   (T n / 2) log(2 pi) + 1/2 sum_t [ log det H_t + z_t' H_t^{-1} z_t ].
// H_t is solved by eigendecomposition with an eigenvalue floor of
// 1e-12 trace(H_t)/n; condition numbers above 1e12 raise an error naming t.
double neg_loglik(const VecParams& params, const Sample& sample,
                  const std::optional<Matrix>& H0 = std::nullopt,
                  LoglikDiag* diag = nullptr);

// Gradient of log L (not of the negative) with respect to (c, A, B).
struct GradTheta {
  Vector dc;
  Matrix dA;
  Matrix dB;
};

Vector flatten_grad(const GradTheta& g);  // [vec(dA); vec(dB); dc]

// Direct evaluation of the per-observation score sums.  When scores is
// non-null it receives the per-observation flattened score vectors.
GradTheta grad_closed_form(const VecParams& params, const Sample& sample,
                           const std::optional<Matrix>& H0 = std::nullopt,
                           std::vector<Vector>* scores = nullptr);

// Same gradient through the state-space recursions for the derivative
// operators.  truncation_depth k >= 1 switches to the sliding-window
// recursion that keeps only the k most recent lags; 0 means exact.
GradTheta grad_recursive(const VecParams& params, const Sample& sample,
                         int truncation_depth = 0,
                         const std::optional<Matrix>& H0 = std::nullopt);

// Smallest lag depth k for which the a-priori truncation bounds fall below
// delta.  Always at least 1.
int truncation_depth(const constraints::ConstraintConfig& tols, double delta);

// A-priori operator-norm bounds on the truncation error of the three
// derivative blocks (c, A, B) at depth k; the caller supplies ||c||.
std::array<double, 3> truncation_error_bounds(
    const constraints::ConstraintConfig& tols, int k, double c_norm);

// Draws z_t = H_t^{1/2} eps_t with i.i.d. standard normal innovations.
// Requires positivity of (c, A, B) and sigma_max(A+B) < 1.
Sample simulate(const VecParams& params, int T, std::uint64_t seed,
                const std::optional<Matrix>& H0 = std::nullopt);

struct AsymptoticCov {
  Matrix omega;        // sandwich A0^{-1} B0 A0^{-1}
  Matrix A0;           // minus the averaged score Jacobian (finite differences)
  Matrix B0;           // averaged outer product of per-observation scores
  bool pseudo_inverse = false;
};

AsymptoticCov asymptotic_covariance(const VecParams& params, const Sample& sample,
                                    const std::optional<Matrix>& H0 = std::nullopt);

}  // namespace vecgarch::model
