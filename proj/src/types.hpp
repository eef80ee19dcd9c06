#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace vecgarch {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Number of free entries of an n x n symmetric matrix.
inline int half_vec_dim(int n) { return n * (n + 1) / 2; }

// Parameters of the VEC(1,1) conditional-covariance recursion
//
//   h_t = c + A eta_{t-1} + B h_{t-1},
//
// where h_t = vech(H_t) and eta_t = vech(z_t z_t').  c has length
// N = n(n+1)/2, A and B are N x N.
struct VecParams {
  int n = 0;
  Vector c;
  Matrix A;
  Matrix B;

  int N() const { return half_vec_dim(n); }
};

inline VecParams zero_params(int n) {
  const int N = half_vec_dim(n);
  return VecParams{n, Vector::Zero(N), Matrix::Zero(N, N), Matrix::Zero(N, N)};
}

// Flat parameter layout used by the optimizer and the asymptotics:
// [vec(A); vec(B); c], total length 2N^2 + N.
inline int theta_dim(int n) {
  const int N = half_vec_dim(n);
  return 2 * N * N + N;
}

inline Vector flatten(const VecParams& p) {
  const int N = p.N();
  Vector th(2 * N * N + N);
  th.segment(0, N * N) = Eigen::Map<const Vector>(p.A.data(), N * N);
  th.segment(N * N, N * N) = Eigen::Map<const Vector>(p.B.data(), N * N);
  th.segment(2 * N * N, N) = p.c;
  return th;
}

inline VecParams unflatten(int n, const Vector& theta) {
  const int N = half_vec_dim(n);
  VecParams p;
  p.n = n;
  p.A = Eigen::Map<const Matrix>(theta.data(), N, N);
  p.B = Eigen::Map<const Matrix>(theta.data() + N * N, N, N);
  p.c = theta.segment(2 * N * N, N);
  return p;
}

// A return series plus optional presample state.  z[t] holds z_{t+1} in the
// 1-based notation of the recursion; the presample return z0 defaults to
// zero, the presample covariance H0 to the stationary variance of whatever
// parameters the series is filtered with.
struct Sample {
  int n = 0;
  std::vector<Vector> z;
  std::optional<Vector> z0;
  std::optional<Matrix> H0;

  int T() const { return static_cast<int>(z.size()); }
};

}  // namespace vecgarch
