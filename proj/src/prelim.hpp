#pragma once

#include <cstdint>
#include <vector>

#include "optimizer.hpp"
#include "types.hpp"

namespace vecgarch::prelim {

// Exponentially weighted covariance proxy
//   H_t = lambda H_{t-1} + (1 - lambda) z_{t-1} z_{t-1}',
// seeded with the zero-mean covariance of the first min(30, T/4)
// observations.
std::vector<Matrix> ewma_path(const Sample& sample, double lambda = 0.94);

// Orthogonal-components proxy: PCA rotation of the sample, an n=1 fit of
// this library's own estimator per retained component, recomposed as
// W diag(h_t) W'.  n_factors = 0 keeps every component whose eigenvalue
// exceeds 1e-10 of the largest.
std::vector<Matrix> ogarch_path(const Sample& sample,
                                const optimizer::OptimizerConfig& cfg,
                                int n_factors = 0, double lambda = 0.94);

// Least squares on the variance recursion against a covariance proxy path:
//   s(theta) = sum_{t>=2} || vech(proxy_t) - c - A eta_{t-1} - B h_{t-1} ||^2.
class OlsObjective : public optimizer::Objective {
 public:
  OlsObjective(const Sample& sample, const std::vector<Matrix>& proxy);
  int dim_n() const override { return n_; }
  double value(const VecParams& theta) const override;
  Vector gradient(const VecParams& theta) const override;

 private:
  int n_ = 0;
  std::vector<Vector> h_;    // vech of the proxy path
  std::vector<Vector> eta_;  // vech(z_t z_t')
};

// Deterministic strictly feasible parameter point: sigma(A) = a I,
// sigma(B) = b I, math(c) = gamma I, with (a, b) stability-scaled and gamma
// chosen so the stationary variance matches var_scale.
VecParams canonical_feasible_start(int n,
                                   const constraints::ConstraintConfig& cfg,
                                   double var_scale = 1.0);

// Random strictly feasible parameters: a seeded perturbation of the
// canonical point, shrunk until the constraint check passes.
VecParams random_feasible(int n, const constraints::ConstraintConfig& cfg,
                          std::uint64_t seed, double var_scale = 1.0);

// Dcc, GoGarch and Ica are declared interface points but intentionally not
// implemented; selecting one raises a configuration error.
enum class ProxyMethod { Ewma, Ogarch, Dcc, GoGarch, Ica };

// Proxy path -> least-squares fit through the constrained optimizer.
// The returned point is strictly feasible and serves as the estimation
// starting point.
VecParams preliminary_estimate(const Sample& sample, ProxyMethod method,
                               const optimizer::OptimizerConfig& cfg,
                               double lambda = 0.94);

}  // namespace vecgarch::prelim
