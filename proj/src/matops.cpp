#include "matops.hpp"

#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "errors.hpp"

namespace vecgarch::matops {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void require_symmetric(const Matrix& A, const char* who) {
  require(A.rows() == A.cols(), who);
  const double scale = std::max(1.0, A.norm());
  if ((A - A.transpose()).norm() > 1e-10 * scale)
    throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
}

int block_dim(const Matrix& S, const char* who) {
  require(S.rows() == S.cols(), who);
  const int n2 = static_cast<int>(S.rows());
  const int n = static_cast<int>(std::lround(std::sqrt(double(n2))));
  require(n * n == n2, who);
  return n;
}

}  // namespace

SigmaIndex::SigmaIndex(int n_) : n(n_), N(half_vec_dim(n_)) {
  flat_of.resize(n, n);
  pair_of.reserve(N);
  diag_pair.resize(N);
  int p = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      flat_of(i, j) = p;
      flat_of(j, i) = p;
      pair_of.emplace_back(i, j);
      diag_pair[p] = (i == j);
      ++p;
    }
  }
}

const SigmaIndex& SigmaIndex::get(int n) {
  static std::mutex mu;
  static std::unordered_map<int, SigmaIndex> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, SigmaIndex(n)).first;
  return it->second;
}

Vector vech(const Matrix& H) {
  require_symmetric(H, "vech");
  const int n = static_cast<int>(H.rows());
  const SigmaIndex& ix = SigmaIndex::get(n);
  Vector m(ix.N);
  for (int p = 0; p < ix.N; ++p) m(p) = H(ix.pair_of[p].first, ix.pair_of[p].second);
  return m;
}

Matrix math(const Vector& m) {
  const int N = static_cast<int>(m.size());
  // invert N = n(n+1)/2
  const int n = static_cast<int>(std::lround((std::sqrt(8.0 * N + 1.0) - 1.0) / 2.0));
  require(half_vec_dim(n) == N, "math: length is not a triangular number");
  const SigmaIndex& ix = SigmaIndex::get(n);
  Matrix H(n, n);
  for (int p = 0; p < N; ++p) {
    const auto [i, j] = ix.pair_of[p];
    H(i, j) = m(p);
    H(j, i) = m(p);
  }
  return H;
}

Vector vec(const Matrix& A) {
  return Eigen::Map<const Vector>(A.data(), A.size());
}

Matrix mat(const Vector& v) {
  const int n2 = static_cast<int>(v.size());
  const int n = static_cast<int>(std::lround(std::sqrt(double(n2))));
  require(n * n == n2, "mat: length is not a perfect square");
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

Vector math_adj(const Matrix& A) {
  require_symmetric(A, "math_adj");
  // math*(A) = 2 vech(A - diag(A)/2): off-diagonal entries are picked up
  // twice by math, diagonal ones once.
  Matrix tmp = A - 0.5 * diag_part(A);
  return 2.0 * vech(tmp);
}

Matrix vech_adj(const Vector& m) {
  // vech*(m) = (math(m) + diag(math(m))) / 2
  Matrix X = math(m);
  return 0.5 * (X + diag_part(X));
}

Matrix diag_part(const Matrix& A) {
  require(A.rows() == A.cols(), "diag_part");
  return A.diagonal().asDiagonal();
}

Matrix sigma(const Matrix& A) {
  const int N = static_cast<int>(A.rows());
  require(A.cols() == N, "sigma");
  const int n = static_cast<int>(std::lround((std::sqrt(8.0 * N + 1.0) - 1.0) / 2.0));
  require(half_vec_dim(n) == N, "sigma: side is not a triangular number");
  const SigmaIndex& ix = SigmaIndex::get(n);
  Matrix S = Matrix::Zero(n * n, n * n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l <= k; ++l) {
      const int row = ix.flat_of(k, l);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double w = (i == j) ? 1.0 : 0.5;
          const double v = w * A(row, ix.flat_of(i, j));
          S(k * n + i, l * n + j) = v;
          S(l * n + i, k * n + j) = v;  // mirrored block (l,k)
        }
      }
    }
  }
  return S;
}

Matrix bullet(const Matrix& S, const Matrix& H) {
  const int n = block_dim(S, "bullet");
  require(H.rows() == n && H.cols() == n, "bullet: size mismatch");
  Matrix R(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      R(k, l) = S.block(k * n, l * n, n, n).cwiseProduct(H.transpose()).sum();
  return R;
}

Matrix project_symmetric(const Matrix& A) {
  require(A.rows() == A.cols(), "project_symmetric");
  return 0.5 * (A + A.transpose());
}

Matrix project_nsymmetric(const Matrix& A) {
  const int n = block_dim(A, "project_nsymmetric");
  Matrix P(n * n, n * n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l <= k; ++l) {
      Matrix Akl = A.block(k * n, l * n, n, n);
      Matrix Alk = A.block(l * n, k * n, n, n);
      Matrix B = 0.25 * (Akl + Akl.transpose() + Alk + Alk.transpose());
      P.block(k * n, l * n, n, n) = B;
      P.block(l * n, k * n, n, n) = B;
    }
  }
  return P;
}

bool is_nsymmetric(const Matrix& A, double rel_tol) {
  if (A.rows() != A.cols()) return false;
  const int n2 = static_cast<int>(A.rows());
  const int n = static_cast<int>(std::lround(std::sqrt(double(n2))));
  if (n * n != n2) return false;
  const double scale = std::max(1.0, A.norm());
  return (A - project_nsymmetric(A)).norm() <= rel_tol * scale;
}

Matrix sigma_adj(const Matrix& S) {
  const int n = block_dim(S, "sigma_adj");
  const SigmaIndex& ix = SigmaIndex::get(n);
  const Matrix P = project_nsymmetric(S);
  Matrix R(ix.N, ix.N);
  for (int p = 0; p < ix.N; ++p) {
    const auto [bi, bj] = ix.pair_of[p];          // block indices
    const double w = ix.diag_pair[p] ? 1.0 : 2.0;  // 2B - B~ rowwise
    for (int q = 0; q < ix.N; ++q) {
      const auto [ei, ej] = ix.pair_of[q];        // entry indices
      R(p, q) = w * P(bi * n + ei, bj * n + ej);
    }
  }
  return R;
}

Matrix sigma_inv(const Matrix& S) {
  const int n = block_dim(S, "sigma_inv");
  if (!is_nsymmetric(S))
    throw numeric_error("sigma_inv: input is not blockwise symmetric");
  const SigmaIndex& ix = SigmaIndex::get(n);
  Matrix A(ix.N, ix.N);
  for (int p = 0; p < ix.N; ++p) {
    const auto [bi, bj] = ix.pair_of[p];
    for (int q = 0; q < ix.N; ++q) {
      const auto [ei, ej] = ix.pair_of[q];
      const double w = ix.diag_pair[q] ? 1.0 : 2.0;  // undo the 1/2 halving
      A(p, q) = w * S(bi * n + ei, bj * n + ej);
    }
  }
  return A;
}

Matrix commutation_matrix(int N) {
  require(N >= 1, "commutation_matrix");
  Matrix K = Matrix::Zero(N * N, N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) K(j * N + i, i * N + j) = 1.0;
  return K;
}

double operator_norm_estimate(OpTag op, int n, int iters, std::uint64_t seed) {
  require(n >= 1 && iters >= 1, "operator_norm_estimate");
  const int N = half_vec_dim(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Power iteration on op* . op over the appropriate domain.
  const bool vector_domain = (op == OpTag::Math || op == OpTag::VechAdj);
  Vector vm(N);
  Matrix xm(n, n);
  if (vector_domain) {
    for (int i = 0; i < N; ++i) vm(i) = gauss(rng);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) xm(i, j) = gauss(rng);
    xm = project_symmetric(xm);
  }

  double norm2 = 0.0;
  for (int it = 0; it < iters; ++it) {
    switch (op) {
      case OpTag::Vech: {
        Vector y = vech(xm);
        norm2 = y.squaredNorm() / xm.squaredNorm();
        xm = vech_adj(y);
        break;
      }
      case OpTag::MathAdj: {
        Vector y = math_adj(xm);
        norm2 = y.squaredNorm() / xm.squaredNorm();
        xm = math(y);
        break;
      }
      case OpTag::Math: {
        Matrix y = math(vm);
        norm2 = y.squaredNorm() / vm.squaredNorm();
        vm = math_adj(y);
        break;
      }
      case OpTag::VechAdj: {
        Matrix y = vech_adj(vm);
        norm2 = y.squaredNorm() / vm.squaredNorm();
        vm = vech(y);
        break;
      }
      case OpTag::Diag: {
        Matrix y = diag_part(xm);
        norm2 = y.squaredNorm() / xm.squaredNorm();
        xm = diag_part(y);  // diag is self-adjoint
        break;
      }
    }
    if (vector_domain)
      vm /= vm.norm();
    else
      xm /= xm.norm();
  }
  return std::sqrt(norm2);
}

}  // namespace vecgarch::matops
