#pragma once

#include <functional>

#include "constraints.hpp"
#include "types.hpp"

namespace vecgarch::bregman {

// Burg (LogDet) matrix divergence
//   D(X, Y) = trace(X Y^{-1}) - log det(X Y^{-1}) - n
// for symmetric positive definite X, Y of equal size.
double burg_divergence(const Matrix& X, const Matrix& Y);

// One weight per divergence term; the trust-region loop drives all six with
// a single scalar.
struct Weights {
  double L1, L2, L3, L4, L5, L6;
  static Weights uniform(double L) { return {L, L, L, L, L, L}; }
};

// Model of the objective around a strictly feasible anchor theta^n:
//   f(theta^n) + <g0, theta - theta^n>
//   + L1/2 D(I - (A+B)'(A+B), .) + L2/2 D(sigma(A), .) + L3/2 D(sigma(B), .)
//   + L4/2 D(I - B'B, .) + L5/2 D(math(c), .) + L6/2 D(K I - math(c), .)
// with each second slot evaluated at the anchor.
struct LocalModel {
  VecParams anchor;
  Vector anchor_flat;
  double f0 = 0.0;
  Vector g0;  // flattened objective gradient at the anchor
  Weights L{};
  double K = 0.0;

  // cached anchor quantities
  Matrix lam_AB_inv;  // (I - (A+B)'(A+B))^{-1}
  Matrix sigA_inv;    // sigma(A)^{-1}
  Matrix sigB_inv;    // sigma(B)^{-1}
  Matrix lam_B_inv;   // (I - B'B)^{-1}
  Matrix mc_inv;      // math(c)^{-1}
  Matrix kmc_inv;     // (K I - math(c))^{-1}
  double logdet_lam_AB = 0, logdet_sigA = 0, logdet_sigB = 0;
  double logdet_lam_B = 0, logdet_mc = 0, logdet_kmc = 0;

  LocalModel(const VecParams& anchor, double f0, const Vector& g0,
             const Weights& L, double K);
};

// Model value at theta; +infinity when any divergence argument fails to be
// positive definite.
double local_model_value(const LocalModel& lm, const VecParams& theta);

// Flattened model gradient [vec(dA); vec(dB); dc]; errors on infeasible theta.
Vector local_model_grad(const LocalModel& lm, const VecParams& theta);

// Matrix of the directional derivative of M (I-M'M)^{-1}-type gradient terms
// in vec coordinates: the operator
//   Delta -> -Delta (Lam(M_anchor)^{-1} - Lam(M)^{-1})
//            + M Lam(M)^{-1} (Delta' M + M' Delta) Lam(M)^{-1}
// with Lam(M) = I - M'M.
Matrix xi_matrix(const Matrix& M_anchor, const Matrix& M);

// Matrix of Delta -> sigma_adj(sigma(M)^{-1} sigma(Delta) sigma(M)^{-1}) in
// vec coordinates, assembled columnwise over the canonical basis.
Matrix frakX_matrix(const Matrix& M);

// Symmetrized Jacobian of the model gradient at theta (BFGS term excluded).
Matrix jacobian(const LocalModel& lm, const VecParams& theta);

// Constraint margins nonnegative and every barrier argument safely positive
// definite (lambda_min >= 1e-12 (1 + ||arg||_F)).
bool strictly_feasible(const VecParams& params,
                       const constraints::ConstraintConfig& cfg);

struct NewtonResult {
  VecParams theta;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
  int halvings = 0;  // total step halvings across the run
};

// Newton-Raphson on grad(theta) = local_model_grad + H (theta - anchor) with
// Jacobian jacobian + H.  Raw steps are halved back toward the previous
// iterate until strictly_feasible passes; on a failed linear solve the
// Jacobian diagonal is regularized once.  H may be null.
NewtonResult newton_solve(
    const LocalModel& lm, const constraints::ConstraintConfig& cfg,
    const Matrix* H = nullptr, int max_iter = 50, double tol = 1e-8,
    const std::function<void(const VecParams&)>& observer = {});

}  // namespace vecgarch::bregman
