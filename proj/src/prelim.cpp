#include "prelim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bregman.hpp"
#include "errors.hpp"
#include "matops.hpp"
#include "model.hpp"

namespace vecgarch::prelim {

namespace {

using matops::vech;

Vector diag_indicator(int n) {
  // vech(I_n): 1 at diagonal pairs
  return vech(Matrix(Matrix::Identity(n, n)));
}

}  // namespace

std::vector<Matrix> ewma_path(const Sample& sample, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw config_error("ewma lambda must lie in (0,1)");
  const int T = sample.T();
  const int burn = std::min(30, T / 4);
  if (burn < 1) throw data_error("sample too short for the EWMA burn-in window");
  Matrix H = Matrix::Zero(sample.n, sample.n);
  for (int t = 0; t < burn; ++t)
    H += sample.z[t] * sample.z[t].transpose();
  H /= double(burn);
  std::vector<Matrix> path;
  path.reserve(T);
  path.push_back(H);
  for (int t = 2; t <= T; ++t) {
    H = lambda * H +
        (1.0 - lambda) * sample.z[t - 2] * sample.z[t - 2].transpose();
    path.push_back(H);
  }
  return path;
}

std::vector<Matrix> ogarch_path(const Sample& sample,
                                const optimizer::OptimizerConfig& cfg,
                                int n_factors, double lambda_ewma) {
  const int n = sample.n;
  const int T = sample.T();
  const Matrix C = constraints::sample_covariance(sample);
  Eigen::SelfAdjointEigenSolver<Matrix> es(C);
  if (es.info() != Eigen::Success)
    throw numeric_error("ogarch: eigendecomposition of the sample covariance failed");

  // descending order with a deterministic sign convention per column
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = n - 1 - i;
  Matrix W(n, n);
  Vector lambda(n);
  for (int i = 0; i < n; ++i) {
    Vector col = es.eigenvectors().col(order[i]);
    int arg = 0;
    for (int r = 1; r < n; ++r)
      if (std::abs(col(r)) > std::abs(col(arg))) arg = r;
    if (col(arg) < 0.0) col = -col;
    W.col(i) = col;
    lambda(i) = es.eigenvalues()(order[i]);
  }

  int k = n_factors;
  if (k <= 0) {
    const double cutoff = 1e-10 * std::max(lambda(0), 0.0);
    k = 0;
    while (k < n && lambda(k) > cutoff) ++k;
    if (k == 0) throw data_error("ogarch: sample covariance has no usable components");
  }
  if (k > n) throw config_error("ogarch: more factors requested than dimensions");

  // per-component univariate fits on the rotated series
  std::vector<std::vector<double>> var_paths(k);
  for (int c = 0; c < k; ++c) {
    Sample comp;
    comp.n = 1;
    comp.z.reserve(T);
    for (int t = 0; t < T; ++t)
      comp.z.push_back(Vector::Constant(1, W.col(c).dot(sample.z[t])));

    optimizer::OptimizerConfig ccfg = cfg;
    ccfg.iterate_observer = {};
    ccfg.constraints.K = constraints::default_K(comp);
    const Matrix H0 = constraints::sample_covariance(comp);

    VecParams start = preliminary_estimate(comp, ProxyMethod::Ewma, ccfg, lambda_ewma);
    optimizer::LikelihoodObjective obj(comp, H0, optimizer::GradBackend::Recursive);
    optimizer::EstimationResult fit = optimizer::estimate(obj, start, ccfg);
    const model::FilterOutput f = model::filter(fit.theta, comp, H0);
    var_paths[c].reserve(T);
    for (int t = 0; t < T; ++t) var_paths[c].push_back(f.h[t](0));
  }

  std::vector<Matrix> path;
  path.reserve(T);
  const Matrix Wk = W.leftCols(k);
  for (int t = 0; t < T; ++t) {
    Vector d(k);
    for (int c = 0; c < k; ++c) d(c) = var_paths[c][t];
    path.push_back(Wk * d.asDiagonal() * Wk.transpose());
  }
  return path;
}

OlsObjective::OlsObjective(const Sample& sample, const std::vector<Matrix>& proxy)
    : n_(sample.n) {
  const int T = sample.T();
  if (static_cast<int>(proxy.size()) != T)
    throw std::invalid_argument("proxy path length must match the sample");
  if (T < 2) throw data_error("least-squares fit requires T >= 2");
  h_.reserve(T);
  eta_.reserve(T);
  for (int t = 0; t < T; ++t) {
    h_.push_back(vech(matops::project_symmetric(proxy[t])));
    eta_.push_back(vech(Matrix(sample.z[t] * sample.z[t].transpose())));
  }
}

double OlsObjective::value(const VecParams& theta) const {
  double s = 0.0;
  for (size_t t = 1; t < h_.size(); ++t) {
    const Vector r =
        h_[t] - theta.c - theta.A * eta_[t - 1] - theta.B * h_[t - 1];
    s += r.squaredNorm();
  }
  return s;
}

Vector OlsObjective::gradient(const VecParams& theta) const {
  const int N = theta.N();
  Vector dc = Vector::Zero(N);
  Matrix dA = Matrix::Zero(N, N);
  Matrix dB = Matrix::Zero(N, N);
  for (size_t t = 1; t < h_.size(); ++t) {
    const Vector r =
        h_[t] - theta.c - theta.A * eta_[t - 1] - theta.B * h_[t - 1];
    dc -= 2.0 * r;
    dA -= 2.0 * r * eta_[t - 1].transpose();
    dB -= 2.0 * r * h_[t - 1].transpose();
  }
  Vector g(2 * N * N + N);
  g.segment(0, N * N) = Eigen::Map<const Vector>(dA.data(), N * N);
  g.segment(N * N, N * N) = Eigen::Map<const Vector>(dB.data(), N * N);
  g.segment(2 * N * N, N) = dc;
  return g;
}

VecParams canonical_feasible_start(int n,
                                   const constraints::ConstraintConfig& cfg,
                                   double var_scale) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(var_scale > 0.0)) throw std::invalid_argument("variance scale must be > 0");
  const Vector d = diag_indicator(n);
  // sigma(a d d') = a I, and sigma_max(d d') = n, so scale (a, b) to keep
  // A + B a comfortable contraction.
  double a = 0.05, b = 0.85;
  const double cap = 0.95 * std::sqrt(std::max(1e-12, 1.0 - cfg.eps_AB));
  const double scale = std::min(1.0, cap / ((a + b) * double(n)));
  a *= scale;
  b *= scale;

  for (int attempt = 0; attempt < 60; ++attempt) {
    double gamma =
        std::max(2.0 * cfg.eps_c, var_scale * (1.0 - (a + b) * double(n)));
    gamma = std::min(gamma, 0.5 * cfg.K);
    VecParams p;
    p.n = n;
    p.A = a * d * d.transpose();
    p.B = b * d * d.transpose();
    p.c = gamma * d;
    if (bregman::strictly_feasible(p, cfg)) return p;
    a *= 0.5;
    b *= 0.5;
  }
  throw numeric_error(
      "canonical start: no feasible point for these constraint tolerances");
}

VecParams random_feasible(int n, const constraints::ConstraintConfig& cfg,
                          std::uint64_t seed, double var_scale) {
  const VecParams base = canonical_feasible_start(n, cfg, var_scale);
  const int N = base.N();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix dA(N, N), dB(N, N);
  Vector dC(N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      dA(i, j) = unif(rng);
      dB(i, j) = unif(rng);
    }
  for (int i = 0; i < N; ++i) dC(i) = unif(rng);

  double tau = 0.1;
  for (int attempt = 0; attempt < 60; ++attempt) {
    VecParams p = base;
    p.A += tau * dA;
    p.B += tau * dB;
    p.c += (tau * var_scale) * dC;
    if (bregman::strictly_feasible(p, cfg)) return p;
    tau *= 0.5;
  }
  return base;
}

VecParams preliminary_estimate(const Sample& sample, ProxyMethod method,
                               const optimizer::OptimizerConfig& cfg,
                               double lambda) {
  std::vector<Matrix> proxy;
  switch (method) {
    case ProxyMethod::Ewma:
      proxy = ewma_path(sample, lambda);
      break;
    case ProxyMethod::Ogarch:
      proxy = ogarch_path(sample, cfg, 0, lambda);
      break;
    default:
      throw config_error("this preliminary method is not implemented; use ewma or ogarch");
  }
  OlsObjective ols(sample, proxy);
  const double var_scale =
      std::max(constraints::sample_covariance(sample).trace() / sample.n,
               4.0 * cfg.constraints.eps_c);
  VecParams start = canonical_feasible_start(sample.n, cfg.constraints, var_scale);
  optimizer::OptimizerConfig pcfg = cfg;
  pcfg.iterate_observer = {};
  optimizer::EstimationResult fit = optimizer::estimate(ols, start, pcfg);
  return fit.theta;
}

}  // namespace vecgarch::prelim
