#include "bregman.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"
#include "matops.hpp"

namespace vecgarch::bregman {

namespace {

using matops::math;
using matops::math_adj;
using matops::sigma;
using matops::sigma_adj;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cholesky with a positive-definiteness verdict; logdet on success.
bool chol_logdet(const Matrix& X, double* logdet, Matrix* inverse = nullptr) {
  Eigen::LLT<Matrix> llt(matops::project_symmetric(X));
  if (llt.info() != Eigen::Success) return false;
  const Matrix& L = llt.matrixLLT();
  double acc = 0.0;
  for (int i = 0; i < L.rows(); ++i) {
    if (!(L(i, i) > 0.0)) return false;
    acc += std::log(L(i, i));
  }
  if (logdet) *logdet = 2.0 * acc;
  if (inverse)
    *inverse = llt.solve(Matrix::Identity(X.rows(), X.cols()));
  return true;
}

Matrix lam(const Matrix& M) {
  return Matrix::Identity(M.cols(), M.cols()) - M.transpose() * M;
}

struct Barrier {
  Matrix X;            // current argument
  const Matrix* Yinv;  // anchor inverse
  double logdet_Y;
  double weight;
};

// Columns of M with the swap (i,j) <-> (j,i) applied, i.e. M K_{N,N}.
Matrix apply_commutation_right(const Matrix& M, int N) {
  Matrix R(M.rows(), M.cols());
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) R.col(i * N + j) = M.col(j * N + i);
  return R;
}

Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix R(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      R.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return R;
}

Matrix xi_matrix_cached(const Matrix& lam_anchor_inv, const Matrix& M) {
  const int N = static_cast<int>(M.rows());
  double ld;
  Matrix lam_inv;
  if (!chol_logdet(lam(M), &ld, &lam_inv))
    throw numeric_error("xi_matrix: I - M'M is not positive definite");
  const Matrix D = lam_anchor_inv - lam_inv;
  const Matrix MLi = M * lam_inv;
  const Matrix I = Matrix::Identity(N, N);
  Matrix R = -kron(D, I);
  R += apply_commutation_right(kron(MLi.transpose(), MLi), N);
  R += kron(lam_inv, Matrix(MLi * M.transpose()));
  return R;
}

}  // namespace

double burg_divergence(const Matrix& X, const Matrix& Y) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols() || X.rows() != X.cols())
    throw std::invalid_argument("burg_divergence: size mismatch");
  double ldx, ldy;
  Matrix Yinv;
  if (!chol_logdet(Y, &ldy, &Yinv))
    throw numeric_error("burg_divergence: second argument is not positive definite");
  if (!chol_logdet(X, &ldx))
    throw numeric_error("burg_divergence: first argument is not positive definite");
  const double n = double(X.rows());
  return (matops::project_symmetric(X).cwiseProduct(Yinv)).sum() - (ldx - ldy) - n;
}

LocalModel::LocalModel(const VecParams& anchor_, double f0_, const Vector& g0_,
                       const Weights& L_, double K_)
    : anchor(anchor_), anchor_flat(flatten(anchor_)), f0(f0_), g0(g0_), L(L_), K(K_) {
  const int n = anchor.n;
  const Matrix mc = math(anchor.c);
  const Matrix kmc = K * Matrix::Identity(n, n) - mc;
  bool ok = chol_logdet(lam(anchor.A + anchor.B), &logdet_lam_AB, &lam_AB_inv);
  ok = ok && chol_logdet(sigma(anchor.A), &logdet_sigA, &sigA_inv);
  ok = ok && chol_logdet(sigma(anchor.B), &logdet_sigB, &sigB_inv);
  ok = ok && chol_logdet(lam(anchor.B), &logdet_lam_B, &lam_B_inv);
  ok = ok && chol_logdet(mc, &logdet_mc, &mc_inv);
  ok = ok && chol_logdet(kmc, &logdet_kmc, &kmc_inv);
  if (!ok)
    throw numeric_error("local model anchor is not strictly feasible");
}

double local_model_value(const LocalModel& lm, const VecParams& theta) {
  const int n = theta.n;
  const Vector d = flatten(theta) - lm.anchor_flat;
  double val = lm.f0 + lm.g0.dot(d);

  const Barrier terms[] = {
      {lam(theta.A + theta.B), &lm.lam_AB_inv, lm.logdet_lam_AB, lm.L.L1},
      {sigma(theta.A), &lm.sigA_inv, lm.logdet_sigA, lm.L.L2},
      {sigma(theta.B), &lm.sigB_inv, lm.logdet_sigB, lm.L.L3},
      {lam(theta.B), &lm.lam_B_inv, lm.logdet_lam_B, lm.L.L4},
      {math(theta.c), &lm.mc_inv, lm.logdet_mc, lm.L.L5},
      {lm.K * Matrix::Identity(n, n) - math(theta.c), &lm.kmc_inv, lm.logdet_kmc,
       lm.L.L6},
  };
  for (const Barrier& b : terms) {
    double ldx;
    if (!chol_logdet(b.X, &ldx)) return kInf;
    const double dim = double(b.X.rows());
    const double div =
        (matops::project_symmetric(b.X).cwiseProduct(*b.Yinv)).sum() -
        (ldx - b.logdet_Y) - dim;
    val += 0.5 * b.weight * div;
  }
  return val;
}

Vector local_model_grad(const LocalModel& lm, const VecParams& theta) {
  const int n = theta.n;
  const int N = theta.N();

  Matrix lam_AB_cur, lam_B_cur, sigA_cur, sigB_cur, mc_cur, kmc_cur;
  double ld;
  bool ok = chol_logdet(lam(theta.A + theta.B), &ld, &lam_AB_cur);
  ok = ok && chol_logdet(sigma(theta.A), &ld, &sigA_cur);
  ok = ok && chol_logdet(sigma(theta.B), &ld, &sigB_cur);
  ok = ok && chol_logdet(lam(theta.B), &ld, &lam_B_cur);
  ok = ok && chol_logdet(math(theta.c), &ld, &mc_cur);
  ok = ok && chol_logdet(
                 Matrix(lm.K * Matrix::Identity(n, n) - math(theta.c)), &ld,
                 &kmc_cur);
  if (!ok)
    throw numeric_error("local_model_grad: point is outside the barrier domain");

  const Matrix M = theta.A + theta.B;
  // d/dM of L/2 D(I - M'M, anchor) = L M (Lam(M)^{-1} - Lam(anchor)^{-1})
  const Matrix common_AB = lm.L.L1 * M * (lam_AB_cur - lm.lam_AB_inv);

  Matrix dA = common_AB +
              0.5 * lm.L.L2 * sigma_adj(Matrix(lm.sigA_inv - sigA_cur));
  Matrix dB = common_AB +
              0.5 * lm.L.L3 * sigma_adj(Matrix(lm.sigB_inv - sigB_cur)) +
              lm.L.L4 * theta.B * (lam_B_cur - lm.lam_B_inv);
  Vector dc = 0.5 * lm.L.L5 * math_adj(Matrix(lm.mc_inv - mc_cur)) -
              0.5 * lm.L.L6 * math_adj(Matrix(lm.kmc_inv - kmc_cur));

  Vector g(2 * N * N + N);
  g.segment(0, N * N) = Eigen::Map<const Vector>(dA.data(), N * N);
  g.segment(N * N, N * N) = Eigen::Map<const Vector>(dB.data(), N * N);
  g.segment(2 * N * N, N) = dc;
  return lm.g0 + g;
}

Matrix xi_matrix(const Matrix& M_anchor, const Matrix& M) {
  double ld;
  Matrix lam_anchor_inv;
  if (!chol_logdet(lam(M_anchor), &ld, &lam_anchor_inv))
    throw numeric_error("xi_matrix: anchor I - M'M is not positive definite");
  return xi_matrix_cached(lam_anchor_inv, M);
}

Matrix frakX_matrix(const Matrix& M) {
  const int N = static_cast<int>(M.rows());
  const int n = static_cast<int>(std::lround((std::sqrt(8.0 * N + 1.0) - 1.0) / 2.0));
  const auto& ix = matops::SigmaIndex::get(n);
  double ld;
  Matrix Si;
  if (!chol_logdet(sigma(M), &ld, &Si))
    throw numeric_error("frakX_matrix: sigma(M) is not positive definite");

  Matrix R(N * N, N * N);
  // Column for the canonical direction E_{pq}: sigma(E) has at most four
  // nonzero entries, so sigma(M)^{-1} sigma(E) sigma(M)^{-1} is a short sum
  // of outer products of columns of the inverse.
  for (int q = 0; q < N; ++q) {
    for (int p = 0; p < N; ++p) {
      const auto [bk, bl] = ix.pair_of[p];  // block pair of the E row index
      const auto [ea, eb] = ix.pair_of[q];  // entry pair of the E column index
      struct Ent { int i, j; double v; };
      Ent inner[2];
      int n_inner = 0;
      if (ea == eb) {
        inner[n_inner++] = {ea, ea, 1.0};
      } else {
        inner[n_inner++] = {ea, eb, 0.5};
        inner[n_inner++] = {eb, ea, 0.5};
      }
      Matrix Mq = Matrix::Zero(n * n, n * n);
      for (int s = 0; s < n_inner; ++s) {
        const int gi = bk * n + inner[s].i;
        const int gj = bl * n + inner[s].j;
        Mq += inner[s].v * Si.col(gi) * Si.row(gj);
        if (bk != bl) {
          const int mi = bl * n + inner[s].i;
          const int mj = bk * n + inner[s].j;
          Mq += inner[s].v * Si.col(mi) * Si.row(mj);
        }
      }
      const Matrix col = sigma_adj(Mq);
      R.col(q * N + p) = Eigen::Map<const Vector>(col.data(), N * N);
    }
  }
  return R;
}

Matrix jacobian(const LocalModel& lm, const VecParams& theta) {
  const int n = theta.n;
  const int N = theta.N();
  const int dim = 2 * N * N + N;

  const Matrix XiAB = xi_matrix_cached(lm.lam_AB_inv, theta.A + theta.B);
  const Matrix XiB = xi_matrix_cached(lm.lam_B_inv, theta.B);
  const Matrix XA = frakX_matrix(theta.A);
  const Matrix XB = frakX_matrix(theta.B);

  Matrix J = Matrix::Zero(dim, dim);
  J.block(0, 0, N * N, N * N) = lm.L.L1 * XiAB + 0.5 * lm.L.L2 * XA;
  J.block(0, N * N, N * N, N * N) = lm.L.L1 * XiAB;
  J.block(N * N, 0, N * N, N * N) = lm.L.L1 * XiAB;
  J.block(N * N, N * N, N * N, N * N) =
      lm.L.L1 * XiAB + 0.5 * lm.L.L3 * XB + lm.L.L4 * XiB;

  // c block, assembled columnwise against canonical directions.
  double ld;
  Matrix mc_cur, kmc_cur;
  if (!chol_logdet(math(theta.c), &ld, &mc_cur) ||
      !chol_logdet(Matrix(lm.K * Matrix::Identity(n, n) - math(theta.c)), &ld,
                   &kmc_cur))
    throw numeric_error("jacobian: point is outside the barrier domain");
  for (int p = 0; p < N; ++p) {
    Vector e = Vector::Zero(N);
    e(p) = 1.0;
    const Matrix E = math(e);
    const Vector col = 0.5 * lm.L.L5 * math_adj(Matrix(mc_cur * E * mc_cur)) +
                       0.5 * lm.L.L6 * math_adj(Matrix(kmc_cur * E * kmc_cur));
    J.block(2 * N * N, 2 * N * N + p, N, 1) = col;
  }
  return 0.5 * (J + J.transpose());
}

bool strictly_feasible(const VecParams& params,
                       const constraints::ConstraintConfig& cfg) {
  const auto report = constraints::check(params, cfg);
  if (!report.feasible) return false;
  const int n = params.n;
  const Matrix mc = math(params.c);
  const Matrix args[] = {
      lam(params.A + params.B),
      sigma(params.A),
      sigma(params.B),
      lam(params.B),
      mc,
      Matrix(cfg.K * Matrix::Identity(n, n) - mc),
  };
  for (const Matrix& X : args) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(matops::project_symmetric(X),
                                             Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < 1e-12 * (1.0 + X.norm())) return false;
  }
  return true;
}

NewtonResult newton_solve(const LocalModel& lm,
                          const constraints::ConstraintConfig& cfg,
                          const Matrix* H, int max_iter, double tol,
                          const std::function<void(const VecParams&)>& observer) {
  const int n = lm.anchor.n;
  const int dim = static_cast<int>(lm.anchor_flat.size());
  const double g0_norm = lm.g0.norm();

  NewtonResult res;
  res.theta = lm.anchor;
  Vector th = lm.anchor_flat;
  VecParams cur = lm.anchor;
  double best_gn = std::numeric_limits<double>::infinity();

  for (int k = 0; k < max_iter; ++k) {
    Vector g = local_model_grad(lm, cur);
    if (H) g += (*H) * (th - lm.anchor_flat);
    const double gn = g.norm();
    if (gn < best_gn) {
      best_gn = gn;
      res.theta = cur;
      res.grad_norm = gn;
    }
    if (gn <= tol * (1.0 + g0_norm)) {
      res.converged = true;
      res.iterations = k;
      return res;
    }

    Matrix J = jacobian(lm, cur);
    if (H) J += *H;
    Vector step = J.partialPivLu().solve(-g);
    if (!step.allFinite()) {
      // one-shot diagonal regularization, then give up
      J.diagonal().array() += 1e-8 * J.trace() / double(dim);
      step = J.partialPivLu().solve(-g);
      if (!step.allFinite())
        throw numeric_error("newton_solve: linear solve failed");
    }

    Vector trial = th + step;
    VecParams trial_p = unflatten(n, trial);
    int halvings = 0;
    while (!strictly_feasible(trial_p, cfg) && halvings < 60) {
      trial = 0.5 * (th + trial);
      trial_p = unflatten(n, trial);
      ++halvings;
    }
    res.halvings += halvings;
    if (halvings == 60 && !strictly_feasible(trial_p, cfg)) {
      // no feasible progress along this direction; stop at the previous point
      res.iterations = k + 1;
      return res;
    }
    th = trial;
    cur = trial_p;
    if (observer) observer(cur);
    res.iterations = k + 1;
  }
  // max_iter exhausted: res already holds the best iterate seen
  Vector g = local_model_grad(lm, res.theta);
  if (H) g += (*H) * (flatten(res.theta) - lm.anchor_flat);
  res.grad_norm = g.norm();
  return res;
}

}  // namespace vecgarch::bregman
