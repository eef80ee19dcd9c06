#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "types.hpp"

// Half-vectorization operator algebra on symmetric matrices.
//
// Conventions, used consistently everywhere:
//  * vech stacks the lower triangle column by column:
//    (1,1),(2,1),...,(n,1),(2,2),...,(n,2),...,(n,n).
//  * vec stacks full columns; mat is its inverse on square matrices.
//  * An n^2 x n^2 matrix is addressed blockwise: block (i,j) entry (k,l)
//    lives at global ((i-1)n + k, (j-1)n + l) with 1-based indices.
namespace vecgarch::matops {

// Index tables for the vech ordering at a fixed dimension n.
struct SigmaIndex {
  int n = 0;
  int N = 0;
  // flat index of the pair (i,j); symmetric in (i,j).  0-based.
  Eigen::MatrixXi flat_of;
  // inverse map: flat index -> (i,j) with i >= j.  0-based.
  std::vector<std::pair<int, int>> pair_of;
  // whether the flat index comes from a diagonal pair (i,i).
  std::vector<bool> diag_pair;

  explicit SigmaIndex(int n);
  static const SigmaIndex& get(int n);  // cached per dimension
};

Vector vech(const Matrix& H);
Matrix math(const Vector& m);
Vector vec(const Matrix& A);
Matrix mat(const Vector& v);

// Adjoints with respect to the Frobenius / Euclidean pairings:
//   <math(m), A>_F = <m, math_adj(A)>,  <vech(A), m> = <A, vech_adj(m)>_F.
Vector math_adj(const Matrix& A);
Matrix vech_adj(const Vector& m);

Matrix diag_part(const Matrix& A);

// The block operator Sigma: an N x N matrix acting on vech coordinates is
// rewritten as an n^2 x n^2 matrix of n x n symmetric blocks such that
//   A vech(H) = vech(bullet(sigma(A), H))  for all symmetric H.
Matrix sigma(const Matrix& A);

// bullet(S, H)_{kl} = trace(S_{kl} H), blockwise.
Matrix bullet(const Matrix& S, const Matrix& H);

// Adjoint of sigma, totalized over all of R^{n^2 x n^2} by first projecting
// onto the subspace of blockwise-symmetric symmetric matrices.
Matrix sigma_adj(const Matrix& S);

// Inverse of sigma on its image.  Pre: S blockwise symmetric (validated).
Matrix sigma_inv(const Matrix& S);

Matrix project_symmetric(const Matrix& A);
// Orthogonal projection onto matrices that are symmetric globally, blockwise
// symmetric, and have symmetric blocks.
Matrix project_nsymmetric(const Matrix& A);
bool is_nsymmetric(const Matrix& A, double rel_tol = 1e-10);

// K_{N,N} with K vec(A) = vec(A') for N x N matrices A.
Matrix commutation_matrix(int N);

enum class OpTag { Vech, Math, VechAdj, MathAdj, Diag };

// Frobenius operator norm of one of the basic operators, estimated by power
// iteration on op*op.  Used by the test suite to pin the norm table.
double operator_norm_estimate(OpTag op, int n, int iters = 500,
                              std::uint64_t seed = 12345);

}  // namespace vecgarch::matops
