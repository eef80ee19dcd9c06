#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "constraints.hpp"
#include "doctest.h"
#include "errors.hpp"
#include "matops.hpp"
#include "oracles.hpp"
#include "prelim.hpp"

using namespace vecgarch;
using namespace vecgarch::constraints;

namespace {

// margins recomputed straight from the constraint definitions
double min_eig(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (S + S.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("identity-variance point: margins follow the definitions") {
  VecParams p = zero_params(2);
  p.c = matops::vech(Matrix::Identity(2, 2));
  ConstraintConfig cfg;
  cfg.eps_AB = cfg.eps_A = cfg.eps_B = cfg.eps_c = cfg.eps_tilde_B = 0.01;
  cfg.K = 10.0;
  const auto rep = check(p, cfg);
  CHECK(rep.sc == doctest::Approx(0.99));
  CHECK(rep.pc_c == doctest::Approx(0.99));
  CHECK(rep.cc == doctest::Approx(0.99));
  CHECK(rep.kc == doctest::Approx(9.0));
  // sigma(0) = 0 sits exactly eps below the positivity offsets
  CHECK(rep.pc_A == doctest::Approx(-0.01));
  CHECK(rep.pc_B == doctest::Approx(-0.01));
  CHECK_FALSE(rep.feasible);
  CHECK(rep.min_margin() == doctest::Approx(-0.01));

  // with the A/B positivity slack at zero the point is feasible outright
  cfg.eps_A = cfg.eps_B = 0.0;
  const auto rep2 = check(p, cfg);
  CHECK(rep2.feasible);
  CHECK(rep2.min_margin() >= 0.0);
}

TEST_CASE("a unit-spectral-norm B violates the contraction constraint") {
  VecParams p = zero_params(2);
  p.c = matops::vech(Matrix::Identity(2, 2));
  p.B = Matrix::Identity(3, 3);  // sigma_max = 1
  ConstraintConfig cfg;
  const auto rep = check(p, cfg);
  CHECK_FALSE(rep.feasible);
  CHECK(rep.cc == doctest::Approx(-cfg.eps_tilde_B));
}

TEST_CASE("constructed feasible draws pass and match an eigensolver oracle") {
  std::mt19937_64 rng(50);
  for (int n = 1; n <= 3; ++n) {
    for (int rep_i = 0; rep_i < 10; ++rep_i) {
      ConstraintConfig cfg;
      const VecParams p = prelim::random_feasible(n, cfg, rng());
      const auto rep = check(p, cfg);
      CHECK(rep.feasible);

      const int N = p.N();
      const Matrix M = p.A + p.B;
      const double sc_oracle =
          min_eig((1.0 - cfg.eps_AB) * Matrix::Identity(N, N) -
                  M * M.transpose());
      CHECK(rep.sc == doctest::Approx(sc_oracle).epsilon(1e-10));
      CHECK(rep.pc_c ==
            doctest::Approx(min_eig(matops::math(p.c)) - cfg.eps_c)
                .epsilon(1e-10));
      CHECK(rep.pc_A ==
            doctest::Approx(min_eig(matops::sigma(p.A)) - cfg.eps_A)
                .epsilon(1e-10));
      CHECK(rep.pc_B ==
            doctest::Approx(min_eig(matops::sigma(p.B)) - cfg.eps_B)
                .epsilon(1e-10));
      CHECK(rep.cc ==
            doctest::Approx(min_eig((1.0 - cfg.eps_tilde_B) *
                                        Matrix::Identity(N, N) -
                                    p.B * p.B.transpose()))
                .epsilon(1e-10));
      const double max_eig_mc = -min_eig(-matops::math(p.c));
      CHECK(rep.kc == doctest::Approx(cfg.K - max_eig_mc).epsilon(1e-10));
    }
  }
}

TEST_CASE("shrinking B never decreases the contraction margin") {
  std::mt19937_64 rng(51);
  ConstraintConfig cfg;
  for (int rep_i = 0; rep_i < 20; ++rep_i) {
    VecParams p = prelim::random_feasible(2, cfg, rng());
    const double base = check(p, cfg).cc;
    for (double s : {0.9, 0.5, 0.1}) {
      VecParams q = p;
      q.B *= s;
      CHECK(check(q, cfg).cc >= base - 1e-12);
    }
  }
}

TEST_CASE("strict margins survive small spectral perturbations") {
  std::mt19937_64 rng(52);
  ConstraintConfig cfg;
  for (int rep_i = 0; rep_i < 10; ++rep_i) {
    const VecParams p = prelim::random_feasible(2, cfg, rng());
    const auto rep = check(p, cfg);
    REQUIRE(rep.feasible);
    const double margin = rep.min_margin();
    REQUIRE(margin > 0);

    // eigenvalue perturbation bound: moving every constraint matrix by less
    // than margin/4 in spectral norm cannot flip feasibility
    const int N = p.N();
    const double scale = margin / (16.0 * N);
    VecParams q = p;
    q.A += oracles::rand_matrix(N, N, rng, scale);
    q.B += oracles::rand_matrix(N, N, rng, scale);
    q.c += oracles::rand_matrix(N, 1, rng, scale).col(0);
    CHECK(check(q, cfg).feasible);
  }
}

TEST_CASE("sample covariance and the data-driven compactness level") {
  // hand-checked 3-point sample
  Sample s;
  s.n = 2;
  Vector a(2), b(2), c(2);
  a << 1, 0;
  b << -1, 2;
  c << 0, -2;
  s.z = {a, b, c};
  const Matrix C = sample_covariance(s);
  Matrix expect(2, 2);
  expect << 1.0, -1.0, -1.0, 4.0;
  CHECK((C - expect).norm() <= 1e-14);
  CHECK(default_K(s) == doctest::Approx(4.0 * expect.norm()));

  // scaling the data by 2 quadruples K
  Sample s2 = s;
  for (auto& z : s2.z) z *= 2.0;
  CHECK(default_K(s2) == doctest::Approx(4.0 * default_K(s)));

  // constant series: zero covariance is rejected
  Sample flat;
  flat.n = 1;
  flat.z = {Vector::Constant(1, 3.0), Vector::Constant(1, 3.0),
            Vector::Constant(1, 3.0)};
  CHECK_THROWS_AS(default_K(flat), data_error);
  Sample tiny;
  tiny.n = 1;
  tiny.z = {Vector::Constant(1, 3.0)};
  CHECK_THROWS_AS(sample_covariance(tiny), data_error);
}

TEST_CASE("default K of an isotropic sample approaches 4 sqrt(2)") {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> g(0.0, 1.0);
  Sample s;
  s.n = 2;
  const int T = 20000;
  s.z.reserve(T);
  for (int t = 0; t < T; ++t) {
    Vector z(2);
    z << g(rng), g(rng);
    s.z.push_back(z);
  }
  const double K = default_K(s);
  CHECK(std::abs(K - 4.0 * std::sqrt(2.0)) <= 0.05 * 4.0 * std::sqrt(2.0));
}
