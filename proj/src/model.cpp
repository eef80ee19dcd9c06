#include "model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "errors.hpp"
#include "matops.hpp"

namespace vecgarch::model {

namespace {

using matops::math;
using matops::math_adj;
using matops::vech;

struct Presample {
  Vector z0;
  Matrix H0;
  Vector h0;
  Vector eta0;
};

Presample resolve_presample(const VecParams& params, const Sample& sample,
                            const std::optional<Matrix>& H0) {
  Presample p;
  p.z0 = sample.z0 ? *sample.z0 : Vector::Zero(params.n);
  if (H0)
    p.H0 = *H0;
  else if (sample.H0)
    p.H0 = *sample.H0;
  else
    p.H0 = stationary_variance(params);
  p.h0 = vech(p.H0);
  p.eta0 = vech(Matrix(p.z0 * p.z0.transpose()));
  return p;
}

void require_shapes(const VecParams& params, const Sample& sample) {
  const int N = params.N();
  if (params.n != sample.n)
    throw std::invalid_argument("parameter/sample dimension mismatch");
  if (params.c.size() != N || params.A.rows() != N || params.A.cols() != N ||
      params.B.rows() != N || params.B.cols() != N)
    throw std::invalid_argument("parameter block sizes are inconsistent");
}

// Eigendecomposition of H_t with the likelihood floor applied.  Returns the
// (floored) eigenvalues and vectors; flags the floor through diag.
struct SolvedH {
  Vector lambda;
  Matrix V;
};

SolvedH solve_ht(const Matrix& H, int t, LoglikDiag* diag) {
  const int n = static_cast<int>(H.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  Vector lam = es.eigenvalues();
  const double tr = H.trace();
  if (!(tr > 0.0))
    throw numeric_error("conditional covariance has nonpositive trace at t=" +
                        std::to_string(t));
  const double floor = 1e-12 * tr / double(n);
  bool floored = false;
  for (int i = 0; i < n; ++i) {
    if (lam(i) < floor) {
      lam(i) = floor;
      floored = true;
    }
  }
  const double cond = lam(n - 1) / lam(0);
  if (diag) {
    if (floored) ++diag->floored;
    diag->max_cond = std::max(diag->max_cond, cond);
  }
  if (cond > 1e12)
    throw numeric_error("conditional covariance is numerically singular at t=" +
                        std::to_string(t));
  return SolvedH{std::move(lam), es.eigenvectors()};
}

// Per-observation gradient of l_t with respect to H_t, mapped to vech
// coordinates: g_t = math*( (Lambda_t - H_t^{-1}) / 2 ) with
// Lambda_t = H_t^{-1} z_t z_t' H_t^{-1}.
Vector score_vs_ht(const SolvedH& s, const Vector& z) {
  const Matrix Hinv = s.V * s.lambda.cwiseInverse().asDiagonal() * s.V.transpose();
  const Vector w = Hinv * z;
  Matrix G = 0.5 * (w * w.transpose() - Hinv);
  G = matops::project_symmetric(G);
  return math_adj(G);
}

// (v kron M): stacks v(r) * M, an (N rows(M)) x cols(M) matrix.
Matrix kron_vec(const Vector& v, const Matrix& M) {
  const int N = static_cast<int>(v.size());
  Matrix R(N * M.rows(), M.cols());
  for (int r = 0; r < N; ++r) R.middleRows(r * M.rows(), M.rows()) = v(r) * M;
  return R;
}

}  // namespace

Matrix stationary_variance(const VecParams& params) {
  const int N = params.N();
  const Matrix M = params.A + params.B;
  Eigen::JacobiSVD<Matrix> svd(M);
  if (!(svd.singularValues()(0) < 1.0))
    throw numeric_error("A+B is not a contraction; no stationary variance");
  const Matrix I = Matrix::Identity(N, N);
  Vector gamma = (I - M).partialPivLu().solve(params.c);
  return math(gamma);
}

FilterOutput filter(const VecParams& params, const Sample& sample,
                    const std::optional<Matrix>& H0) {
  require_shapes(params, sample);
  const Presample pre = resolve_presample(params, sample, H0);
  const int T = sample.T();
  FilterOutput out;
  out.H.reserve(T);
  out.h.reserve(T);
  out.eta.reserve(T);
  Vector h_prev = pre.h0;
  Vector eta_prev = pre.eta0;
  for (int t = 1; t <= T; ++t) {
    Vector h = params.c + params.A * eta_prev + params.B * h_prev;
    out.h.push_back(h);
    out.H.push_back(math(h));
    const Vector& z = sample.z[t - 1];
    out.eta.push_back(vech(Matrix(z * z.transpose())));
    h_prev = out.h.back();
    eta_prev = out.eta.back();
  }
  return out;
}

double neg_loglik(const VecParams& params, const Sample& sample,
                  const std::optional<Matrix>& H0, LoglikDiag* diag) {
  const FilterOutput f = filter(params, sample, H0);
  const int T = sample.T();
  const int n = sample.n;
  double acc = 0.0;
  for (int t = 1; t <= T; ++t) {
    const SolvedH s = solve_ht(f.H[t - 1], t, diag);
    const Vector& z = sample.z[t - 1];
    const Vector u = s.V.transpose() * z;
    double logdet = 0.0, quad = 0.0;
    for (int i = 0; i < n; ++i) {
      logdet += std::log(s.lambda(i));
      quad += u(i) * u(i) / s.lambda(i);
    }
    acc += 0.5 * (logdet + quad);
  }
  return 0.5 * double(T) * double(n) * std::log(2.0 * std::numbers::pi) + acc;
}

Vector flatten_grad(const GradTheta& g) {
  const int N = static_cast<int>(g.dc.size());
  Vector v(2 * N * N + N);
  v.segment(0, N * N) = Eigen::Map<const Vector>(g.dA.data(), N * N);
  v.segment(N * N, N * N) = Eigen::Map<const Vector>(g.dB.data(), N * N);
  v.segment(2 * N * N, N) = g.dc;
  return v;
}

GradTheta grad_closed_form(const VecParams& params, const Sample& sample,
                           const std::optional<Matrix>& H0,
                           std::vector<Vector>* scores) {
  require_shapes(params, sample);
  const Presample pre = resolve_presample(params, sample, H0);
  const FilterOutput f = filter(params, sample, H0);
  const int T = sample.T();
  const int N = params.N();
  const Matrix Bt = params.B.transpose();

  if (scores) {
    scores->clear();
    scores->reserve(T);
  }

  GradTheta total{Vector::Zero(N), Matrix::Zero(N, N), Matrix::Zero(N, N)};
  // S_t = sum_{i<t} B^i, built as a prefix recursion.
  Matrix S = Matrix::Zero(N, N);
  // eta_s and h_s with s = 0 meaning the presample values.
  auto eta_at = [&](int s) -> const Vector& { return s == 0 ? pre.eta0 : f.eta[s - 1]; };
  auto h_at = [&](int s) -> const Vector& { return s == 0 ? pre.h0 : f.h[s - 1]; };

  for (int t = 1; t <= T; ++t) {
    const SolvedH sh = solve_ht(f.H[t - 1], t, nullptr);
    const Vector g = score_vs_ht(sh, sample.z[t - 1]);
    S = Matrix::Identity(N, N) + params.B * S;

    Vector dc = S.transpose() * g;
    Matrix dA = Matrix::Zero(N, N);
    Matrix dB = Matrix::Zero(N, N);
    Vector v = g;  // v = (B')^i g_t
    for (int i = 0; i < t; ++i) {
      dA += v * eta_at(t - 1 - i).transpose();
      dB += v * h_at(t - 1 - i).transpose();
      if (i + 1 < t) v = Bt * v;
    }
    total.dc += dc;
    total.dA += dA;
    total.dB += dB;
    if (scores) scores->push_back(flatten_grad(GradTheta{dc, dA, dB}));
  }
  return total;
}

GradTheta grad_recursive(const VecParams& params, const Sample& sample,
                         int truncation_depth, const std::optional<Matrix>& H0) {
  require_shapes(params, sample);
  if (truncation_depth < 0)
    throw std::invalid_argument("truncation depth must be >= 0");
  const Presample pre = resolve_presample(params, sample, H0);
  const FilterOutput f = filter(params, sample, H0);
  const int T = sample.T();
  const int N = params.N();
  const int k = truncation_depth;
  const Matrix Bt = params.B.transpose();
  const Matrix I = Matrix::Identity(N, N);

  Matrix BkT;  // (B^k)' for the sliding-window correction
  if (k > 0) {
    Matrix Bk = I;
    for (int i = 0; i < k; ++i) Bk = params.B * Bk;
    BkT = Bk.transpose();
  }

  auto eta_at = [&](int s) -> const Vector& { return s == 0 ? pre.eta0 : f.eta[s - 1]; };
  auto h_at = [&](int s) -> const Vector& { return s == 0 ? pre.h0 : f.h[s - 1]; };

  // State-space recursions for the adjoint derivative operators:
  //   C_t = I + C_{t-1} B',  A_t = (eta_{t-1} kron I) + A_{t-1} B',
  //   B_t = (h_{t-1} kron I) + B_{t-1} B'.
  Matrix Ct = Matrix::Zero(N, N);
  Matrix At = Matrix::Zero(N * N, N);
  Matrix Btm = Matrix::Zero(N * N, N);

  GradTheta total{Vector::Zero(N), Matrix::Zero(N, N), Matrix::Zero(N, N)};
  for (int t = 1; t <= T; ++t) {
    if (k == 0 || t <= k) {
      Ct = I + Ct * Bt;
      At = kron_vec(eta_at(t - 1), I) + At * Bt;
      Btm = kron_vec(h_at(t - 1), I) + Btm * Bt;
    } else {
      // depth-k window: drop the lag that falls out, keep C_t frozen at C_k
      At = kron_vec(eta_at(t - 1), I) + At * Bt - kron_vec(eta_at(t - 1 - k), BkT);
      Btm = kron_vec(h_at(t - 1), I) + Btm * Bt - kron_vec(h_at(t - 1 - k), BkT);
    }
    const SolvedH sh = solve_ht(f.H[t - 1], t, nullptr);
    const Vector g = score_vs_ht(sh, sample.z[t - 1]);
    total.dc += Ct * g;
    total.dA += matops::mat(Vector(At * g));
    total.dB += matops::mat(Vector(Btm * g));
  }
  return total;
}

int truncation_depth(const constraints::ConstraintConfig& tols, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("truncation delta must be > 0");
  const double eb = tols.eps_tilde_B;
  if (!(eb > 0.0 && eb < 1.0 && tols.eps_AB > 0.0 && tols.eps_c > 0.0))
    throw std::invalid_argument("truncation tolerances must be positive");
  const double den = std::log(1.0 - eb);
  const double k1 = std::log(eb * delta / 2.0) / den;
  const double k2 = std::log(eb * tols.eps_AB * delta / (2.0 * tols.eps_c)) / den;
  const double k = std::ceil(std::max(k1, k2));
  return std::max(1, static_cast<int>(k));
}

std::array<double, 3> truncation_error_bounds(
    const constraints::ConstraintConfig& tols, int k, double c_norm) {
  if (k < 1) throw std::invalid_argument("truncation depth must be >= 1");
  const double eb = tols.eps_tilde_B;
  const double decay = std::pow(1.0 - eb, k);
  const double ub_c = 2.0 * decay / eb;
  const double ub_ab = 2.0 * decay * c_norm / tols.eps_AB;
  return {ub_c, ub_ab, ub_ab};
}

Sample simulate(const VecParams& params, int T, std::uint64_t seed,
                const std::optional<Matrix>& H0) {
  if (T < 1) throw std::invalid_argument("simulation length must be >= 1");
  const int n = params.n;
  // positivity + stationarity of the generator
  {
    auto lmin = [](const Matrix& S) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(matops::project_symmetric(S),
                                               Eigen::EigenvaluesOnly);
      return es.eigenvalues().minCoeff();
    };
    const Matrix mc = math(params.c);
    const double scale = std::max(1.0, mc.norm());
    if (lmin(mc) < -1e-10 * scale ||
        lmin(matops::sigma(params.A)) < -1e-10 ||
        lmin(matops::sigma(params.B)) < -1e-10)
      throw numeric_error("simulate: parameters violate positivity");
    Eigen::JacobiSVD<Matrix> svd(Matrix(params.A + params.B));
    if (!(svd.singularValues()(0) < 1.0))
      throw numeric_error("simulate: A+B is not a contraction");
  }

  Sample s;
  s.n = n;
  s.z0 = Vector::Zero(n);
  s.H0 = H0 ? *H0 : stationary_variance(params);
  s.z.reserve(T);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Vector h_prev = vech(*s.H0);
  Vector eta_prev = Vector::Zero(params.N());
  for (int t = 1; t <= T; ++t) {
    const Vector h = params.c + params.A * eta_prev + params.B * h_prev;
    const Matrix H = math(h);
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < -1e-10 * std::max(1.0, H.norm()))
      throw numeric_error("simulate: covariance lost positive semidefiniteness at t=" +
                          std::to_string(t));
    Vector sqrt_lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Matrix root = es.eigenvectors() * sqrt_lam.asDiagonal() *
                  es.eigenvectors().transpose();
    Vector eps(n);
    for (int i = 0; i < n; ++i) eps(i) = gauss(rng);
    Vector z = root * eps;
    s.z.push_back(z);
    h_prev = h;
    eta_prev = vech(Matrix(z * z.transpose()));
  }
  return s;
}

AsymptoticCov asymptotic_covariance(const VecParams& params, const Sample& sample,
                                    const std::optional<Matrix>& H0) {
  require_shapes(params, sample);
  const int T = sample.T();
  const int dim = theta_dim(params.n);
  // Fix the presample so the score is a function of theta alone.
  const Matrix H0fix = H0 ? *H0
                          : (sample.H0 ? *sample.H0 : stationary_variance(params));

  std::vector<Vector> scores;
  grad_closed_form(params, sample, H0fix, &scores);

  AsymptoticCov out;
  out.B0 = Matrix::Zero(dim, dim);
  for (const Vector& s : scores) out.B0 += s * s.transpose();
  out.B0 /= double(T);

  // A0 = -(1/T) d(total score)/dtheta by central differences.
  const Vector theta = flatten(params);
  Matrix J(dim, dim);
  for (int p = 0; p < dim; ++p) {
    const double hstep = 1e-5 * (1.0 + std::abs(theta(p)));
    Vector tp = theta, tm = theta;
    tp(p) += hstep;
    tm(p) -= hstep;
    const Vector gp = flatten_grad(
        grad_closed_form(unflatten(params.n, tp), sample, H0fix, nullptr));
    const Vector gm = flatten_grad(
        grad_closed_form(unflatten(params.n, tm), sample, H0fix, nullptr));
    J.col(p) = (gp - gm) / (2.0 * hstep);
  }
  out.A0 = -0.5 * (J + J.transpose()) / double(T);

  Eigen::FullPivLU<Matrix> lu(out.A0);
  if (lu.isInvertible()) {
    const Matrix Ainv = lu.inverse();
    out.omega = Ainv * out.B0 * Ainv;
    out.pseudo_inverse = false;
  } else {
    const Matrix Apinv =
        out.A0.completeOrthogonalDecomposition().pseudoInverse();
    out.omega = Apinv * out.B0 * Apinv;
    out.pseudo_inverse = true;
  }
  out.omega = 0.5 * (out.omega + out.omega.transpose());
  return out;
}

}  // namespace vecgarch::model
