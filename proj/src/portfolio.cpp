#include "portfolio.hpp"

#include <cmath>
#include <random>

#include "errors.hpp"
#include "matops.hpp"

namespace vecgarch::portfolio {

namespace {

// R^2 of a simple regression with intercept equals the squared correlation.
double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t m = x.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(m);
  my /= double(m);
  double sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return 0.0;
  return (sxy * sxy) / (sxx * syy);
}

}  // namespace

Matrix net_return_cov(const Matrix& H, bool literal_second_moment) {
  if (H.rows() != H.cols())
    throw std::invalid_argument("net_return_cov: matrix must be square");
  const Matrix& base = H;
  Matrix arg = literal_second_moment ? Matrix(base * base) : base;
  return arg.array().exp().matrix() - Matrix::Ones(H.rows(), H.cols());
}

Vector min_variance_weights(const Matrix& A) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("min_variance_weights: matrix must be square");
  const int n = static_cast<int>(A.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(matops::project_symmetric(A));
  const Vector lam = es.eigenvalues();
  const double norm = lam.cwiseAbs().maxCoeff();
  const Vector ones = Vector::Ones(n);
  const double tol = 1e-10 * norm;

  if (norm == 0.0 || lam.cwiseAbs().minCoeff() <= tol) {
    // null-space branch: project the ones vector onto the kernel
    Vector proj = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (std::abs(lam(i)) <= tol) {
        const Vector v = es.eigenvectors().col(i);
        proj += v.dot(ones) * v;
      }
    }
    const double s = proj.sum();
    if (std::abs(s) <= 1e-8)
      throw data_error(
          "degenerate portfolio: covariance kernel is orthogonal to the ones vector");
    return proj / s;
  }

  const Vector x = es.eigenvectors() *
                   (es.eigenvectors().transpose() * ones).cwiseQuotient(lam);
  const double denom = ones.dot(x);
  if (std::abs(denom) <= 1e-14 * x.cwiseAbs().sum())
    throw numeric_error("min_variance_weights: normalization degenerates");
  return x / denom;
}

double mse_vs_proxy(const std::vector<double>& vol,
                    const std::vector<double>& returns) {
  if (vol.size() != returns.size() || vol.empty())
    throw std::invalid_argument("mse_vs_proxy: length mismatch");
  double acc = 0.0;
  for (size_t t = 0; t < vol.size(); ++t) {
    const double d = vol[t] - std::abs(returns[t]);
    acc += d * d;
  }
  return acc / double(vol.size());
}

ModelComparison r2_ranking(const std::vector<std::string>& names,
                           const std::vector<std::vector<Matrix>>& H_paths,
                           const Sample& sample, int n_trials,
                           std::uint64_t seed, bool literal_second_moment) {
  const size_t n_models = H_paths.size();
  if (names.size() != n_models || n_models == 0)
    throw std::invalid_argument("r2_ranking: model lists are inconsistent");
  const int T = sample.T();
  const int n = sample.n;
  if (n_trials < 1) throw config_error("r2_ranking: need at least one trial");
  for (const auto& path : H_paths)
    if (static_cast<int>(path.size()) != T)
      throw std::invalid_argument("r2_ranking: path length mismatch");

  // net returns and net-return covariances are trial-independent
  Matrix R(T, n);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i) R(t, i) = std::exp(sample.z[t](i)) - 1.0;
  std::vector<std::vector<Matrix>> cov(n_models);
  for (size_t m = 0; m < n_models; ++m) {
    cov[m].reserve(T);
    for (int t = 0; t < T; ++t)
      cov[m].push_back(net_return_cov(H_paths[m][t], literal_second_moment));
  }

  ModelComparison out;
  out.names = names;
  out.n_trials = n_trials;
  out.r2_wins.assign(n_models, 0);
  out.r2_win_pct.assign(n_models, 0.0);

  std::vector<double> proxy(T), vol(T);
  for (int trial = 0; trial < n_trials; ++trial) {
    std::seed_seq seq{static_cast<std::uint64_t>(seed),
                      static_cast<std::uint64_t>(trial)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector w(n);
    double s = 0.0;
    do {
      for (int i = 0; i < n; ++i) w(i) = gauss(rng);
      s = w.sum();
    } while (std::abs(s) < 1e-6);
    w /= s;

    for (int t = 0; t < T; ++t) proxy[t] = std::abs(R.row(t).dot(w));

    double best = -1.0;
    size_t winner = 0;
    for (size_t m = 0; m < n_models; ++m) {
      for (int t = 0; t < T; ++t)
        vol[t] = std::sqrt(std::max(0.0, w.dot(cov[m][t] * w)));
      const double r2 = r_squared(vol, proxy);
      if (r2 > best) {
        best = r2;
        winner = m;
      }
    }
    ++out.r2_wins[winner];
  }
  for (size_t m = 0; m < n_models; ++m)
    out.r2_win_pct[m] = 100.0 * double(out.r2_wins[m]) / double(n_trials);
  return out;
}

SpectrumReport spectrum_report(const VecParams& params) {
  SpectrumReport rep;
  auto spectrum = [](const Matrix& S, Vector& eig, int& rank) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(matops::project_symmetric(S),
                                             Eigen::EigenvaluesOnly);
    eig = es.eigenvalues().reverse();
    const double top = eig(0);
    rank = 0;
    if (top > 0.0)
      for (int i = 0; i < eig.size(); ++i)
        if (eig(i) > 1e-8 * top) ++rank;
  };
  spectrum(matops::sigma(params.A), rep.eig_A, rep.rank_A);
  spectrum(matops::sigma(params.B), rep.eig_B, rep.rank_B);
  return rep;
}

long parameter_count(int n) {
  if (n < 1) throw std::invalid_argument("parameter_count: n must be >= 1");
  const long N = half_vec_dim(n);
  return N * (2 * N + 1);
}

}  // namespace vecgarch::portfolio
