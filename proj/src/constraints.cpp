#include "constraints.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "matops.hpp"

namespace vecgarch::constraints {

namespace {

double lambda_min(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(matops::project_symmetric(S),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double lambda_max(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(matops::project_symmetric(S),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

double FeasibilityReport::min_margin() const {
  return std::min({sc, pc_c, pc_A, pc_B, cc, kc});
}

FeasibilityReport check(const VecParams& params, const ConstraintConfig& cfg) {
  FeasibilityReport r;
  const Matrix M = params.A + params.B;
  // lambda_min((1-eps) I - MM') = (1-eps) - sigma_max(M)^2
  r.sc = (1.0 - cfg.eps_AB) - lambda_max(M * M.transpose());
  const Matrix Mc = matops::math(params.c);
  r.pc_c = lambda_min(Mc) - cfg.eps_c;
  r.pc_A = lambda_min(matops::sigma(params.A)) - cfg.eps_A;
  r.pc_B = lambda_min(matops::sigma(params.B)) - cfg.eps_B;
  r.cc = (1.0 - cfg.eps_tilde_B) - lambda_max(params.B * params.B.transpose());
  r.kc = cfg.K - lambda_max(Mc);
  r.feasible = r.min_margin() >= 0.0;
  return r;
}

Matrix sample_covariance(const Sample& sample) {
  const int T = sample.T();
  if (T < 2) throw data_error("sample covariance requires at least 2 observations");
  Vector mean = Vector::Zero(sample.n);
  for (const Vector& z : sample.z) mean += z;
  mean /= double(T);
  Matrix C = Matrix::Zero(sample.n, sample.n);
  for (const Vector& z : sample.z) {
    Vector d = z - mean;
    C += d * d.transpose();
  }
  return C / double(T - 1);
}

double default_K(const Sample& sample) {
  const Matrix C = sample_covariance(sample);
  const double norm = C.norm();
  if (!(norm > 0.0))
    throw data_error("degenerate sample: covariance has zero norm");
  return 4.0 * norm;
}

}  // namespace vecgarch::constraints
