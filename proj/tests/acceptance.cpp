// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.  Each criterion re-derives its expectations from first principles
// (hand identities, finite differences, planted constructions) rather than
// from the code under test.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bregman.hpp"
#include "config.hpp"
#include "constraints.hpp"
#include "generators.hpp"
#include "io.hpp"
#include "matops.hpp"
#include "model.hpp"
#include "optimizer.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"
#include "portfolio.hpp"
#include "prelim.hpp"

using namespace vecgarch;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  std::string label;
  double budget_s;
  std::function<bool(std::string&)> run;
};

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

VecParams scalar_params(double a, double b, double c) {
  VecParams p;
  p.n = 1;
  p.A = Matrix::Constant(1, 1, a);
  p.B = Matrix::Constant(1, 1, b);
  p.c = Vector::Constant(1, c);
  return p;
}

// canonical family member a dd' with sigma(a dd') = a I
VecParams isotropic_params(int n, double a, double b, double gamma) {
  const Vector d = matops::vech(Matrix(Matrix::Identity(n, n)));
  VecParams p = zero_params(n);
  p.A = a * d * d.transpose();
  p.B = b * d * d.transpose();
  p.c = gamma * d;
  return p;
}

constraints::ConstraintConfig default_ccfg() {
  constraints::ConstraintConfig c;
  c.K = 10.0;
  return c;
}

// ---------------------------------------------------------------- criterion 1
bool operator_algebra(std::string& detail) {
  std::mt19937_64 rng(101);
  for (int n = 1; n <= 6; ++n) {
    const int N = half_vec_dim(n);
    for (int rep = 0; rep < 100; ++rep) {
      const Matrix A = oracles::rand_symmetric(n, rng);
      const Vector m = oracles::rand_matrix(N, 1, rng).col(0);
      const Matrix S = oracles::rand_symmetric(n, rng);

      // adjoint pairings of the half-vectorization pair (symmetric domain)
      const double lhs1 = oracles::frobenius_inner(matops::math(m), A);
      const double rhs1 = m.dot(matops::math_adj(A));
      if (!close_rel(lhs1, rhs1, 1e-10)) {
        detail = "math/math_adj pairing failed at n=" + std::to_string(n);
        return false;
      }
      const double lhs2 = matops::vech(A).dot(m);
      const double rhs2 = oracles::frobenius_inner(A, matops::vech_adj(m));
      if (!close_rel(lhs2, rhs2, 1e-10)) {
        detail = "vech/vech_adj pairing failed at n=" + std::to_string(n);
        return false;
      }

      // the blockwise representation acts like the vech-coordinate matrix
      const Matrix Aop = oracles::rand_matrix(N, N, rng);
      const Matrix lhs3 = matops::math(Vector(Aop * matops::vech(S)));
      const Matrix rhs3 = matops::bullet(matops::sigma(Aop), S);
      if ((lhs3 - rhs3).norm() > 1e-10 * (1.0 + rhs3.norm())) {
        detail = "blockwise action identity failed at n=" + std::to_string(n);
        return false;
      }

      // adjointness and the two-sided inverse on the structured subspace
      const Matrix Bop = oracles::rand_matrix(N, N, rng);
      const Matrix SB = matops::sigma(Bop);
      const double lhs4 = oracles::frobenius_inner(matops::sigma(Aop), SB);
      const double rhs4 =
          oracles::frobenius_inner(Aop, matops::sigma_adj(SB));
      if (!close_rel(lhs4, rhs4, 1e-10)) {
        detail = "sigma adjoint pairing failed at n=" + std::to_string(n);
        return false;
      }
      if ((matops::sigma_inv(matops::sigma(Aop)) - Aop).norm() >
          1e-10 * (1.0 + Aop.norm())) {
        detail = "sigma round trip failed at n=" + std::to_string(n);
        return false;
      }
    }

    const Matrix K = matops::commutation_matrix(N);
    if ((K * K - Matrix::Identity(N * N, N * N)).norm() != 0.0) {
      detail = "commutation involution failed at N=" + std::to_string(N);
      return false;
    }
    const Matrix M = oracles::rand_matrix(N, N, rng);
    if ((K * matops::vec(M) - matops::vec(Matrix(M.transpose()))).norm() >
        1e-14 * (1.0 + M.norm())) {
      detail = "commutation transposition failed";
      return false;
    }
  }

  // norm table; one dimension has no off-diagonal doubling
  using matops::operator_norm_estimate;
  using matops::OpTag;
  for (OpTag op : {OpTag::Vech, OpTag::Math, OpTag::VechAdj, OpTag::MathAdj,
                   OpTag::Diag})
    if (std::abs(operator_norm_estimate(op, 1) - 1.0) > 1e-3) {
      detail = "n=1 norm table mismatch";
      return false;
    }
  for (int n = 2; n <= 4; ++n) {
    const double r2 = std::sqrt(2.0);
    if (std::abs(operator_norm_estimate(OpTag::Vech, n) - 1.0) > 1e-3 ||
        std::abs(operator_norm_estimate(OpTag::Math, n) - r2) > 1e-3 ||
        std::abs(operator_norm_estimate(OpTag::VechAdj, n) - 1.0) > 1e-3 ||
        std::abs(operator_norm_estimate(OpTag::MathAdj, n) - r2) > 1e-3 ||
        std::abs(operator_norm_estimate(OpTag::Diag, n) - 1.0) > 1e-3) {
      detail = "norm table mismatch at n=" + std::to_string(n);
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- criterion 2
bool gradient_agreement(std::string& detail) {
  std::mt19937_64 rng(202);
  for (int n : {1, 2}) {
    for (int rep = 0; rep < 10; ++rep) {
      const VecParams p = generators::positive_params(n, rng);
      const Sample s = generators::gaussian_sample(n, 50, rng);
      const Matrix H0 = constraints::sample_covariance(s);

      const Vector gc = model::flatten_grad(model::grad_closed_form(p, s, H0));
      const Vector gr = model::flatten_grad(model::grad_recursive(p, s, 0, H0));
      if ((gc - gr).norm() > 1e-10 * (1.0 + gc.norm())) {
        detail = "closed and recursive gradients differ at n=" +
                 std::to_string(n);
        return false;
      }
      const Vector fd = oracles::fd_gradient(
          [&](const Vector& x) {
            return model::neg_loglik(unflatten(n, x), s, H0);
          },
          flatten(p), 1e-6);
      if (!oracles::close_rel(Vector(-gc), fd, 1e-5)) {
        detail = "finite differences disagree at n=" + std::to_string(n);
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------- criterion 3
bool truncation_bounds(std::string& detail) {
  std::mt19937_64 rng(303);
  for (double eps : {0.1, 0.5}) {
    const VecParams p = generators::positive_params(2, rng, 1.0 - eps - 0.02);
    Sample s = generators::gaussian_sample(2, 60, rng);
    const Matrix H0 = constraints::sample_covariance(s);

    Sample sH = s;
    sH.H0 = H0;
    const auto out = model::filter(p, sH);
    double scale = 0.0;
    for (int t = 0; t < s.T(); ++t) {
      const Matrix Hi = out.H[t].inverse();
      const Matrix lam = Hi * s.z[t] * s.z[t].transpose() * Hi;
      scale += matops::math_adj(0.5 * (lam - Hi)).norm();
    }

    constraints::ConstraintConfig tols;
    tols.eps_tilde_B = eps;
    const Vector full_c = model::grad_recursive(p, s, 0, H0).dc;
    double prev = 1e300;
    for (int k = 1; k <= 10; ++k) {
      const double err =
          (model::grad_recursive(p, s, k, H0).dc - full_c).norm();
      if (err > prev + 1e-12) {
        detail = "truncation error increased at k=" + std::to_string(k);
        return false;
      }
      prev = err;
      const double ub =
          model::truncation_error_bounds(tols, k, p.c.norm())[0];
      if (err > ub * scale + 1e-12) {
        detail = "a-priori bound violated at k=" + std::to_string(k);
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------- criterion 4
bool positivity_and_moments(std::string& detail) {
  std::mt19937_64 rng(404);
  for (int n : {1, 2, 3}) {
    const VecParams p = generators::positive_params(n, rng);
    const Sample s = model::simulate(p, 10000, 40 + n);
    const auto out = model::filter(p, s, model::stationary_variance(p));
    for (int t = 0; t < s.T(); ++t) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(out.H[t]);
      if (es.eigenvalues().minCoeff() < -1e-10 * out.H[t].norm()) {
        detail = "covariance lost positivity at n=" + std::to_string(n) +
                 ", t=" + std::to_string(t);
        return false;
      }
    }
  }

  // long-horizon second moment against the stationary solution
  const VecParams p = isotropic_params(2, 0.1, 0.25, 0.01);
  const Matrix gamma0 = model::stationary_variance(p);
  const Sample s = model::simulate(p, 100000, 4004);
  Matrix M = Matrix::Zero(2, 2);
  for (const auto& z : s.z) M += z * z.transpose();
  M /= double(s.T());
  const double rel = (M - gamma0).norm() / gamma0.norm();
  if (rel > 0.05) {
    std::ostringstream ss;
    ss << "second moment off by " << rel * 100.0 << "%";
    detail = ss.str();
    return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 5
bool divergence_properties(std::string& detail) {
  std::mt19937_64 rng(505);
  const double d2 = bregman::burg_divergence(
      Matrix(2.0 * Matrix::Identity(2, 2)), Matrix::Identity(2, 2));
  if (!close_rel(d2, 2.0 - 2.0 * std::log(2.0), 1e-12)) {
    detail = "pinned divergence value mismatch";
    return false;
  }
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const Matrix X = oracles::rand_spd(n, rng);
    const Matrix Y = oracles::rand_spd(n, rng);
    const double dxy = bregman::burg_divergence(X, Y);
    if (dxy < -1e-12) {
      detail = "divergence went negative";
      return false;
    }
    if (std::abs(bregman::burg_divergence(X, X)) > 1e-8) {
      detail = "divergence not zero at equality";
      return false;
    }
    // invariance under congruence by any invertible factor
    const Matrix R = oracles::rand_spd(n, rng);
    const double dcong = bregman::burg_divergence(Matrix(R * X * R.transpose()),
                                                  Matrix(R * Y * R.transpose()));
    if (!close_rel(dcong, dxy, 1e-8)) {
      detail = "congruence invariance failed";
      return false;
    }
  }

  // the proximal model anchors exactly at the current iterate
  const VecParams anchor = prelim::random_feasible(2, default_ccfg(), 55);
  std::mt19937_64 rng2(77);
  const Vector g0 = oracles::rand_matrix(theta_dim(2), 1, rng2).col(0);
  bregman::LocalModel lm(anchor, 3.25, g0, bregman::Weights::uniform(2.0),
                         default_ccfg().K);
  // the linear and divergence terms cancel at the anchor; the value is f0
  // up to the round-off of trace(X X^{-1}) - dim
  if (std::abs(bregman::local_model_value(lm, anchor) - 3.25) > 1e-13) {
    detail = "local model value does not anchor";
    return false;
  }
  if ((bregman::local_model_grad(lm, anchor) - g0).norm() != 0.0) {
    detail = "local model gradient does not anchor";
    return false;
  }
  return true;
}

// two-asset estimation fixture for criterion 6
struct FitFixture {
  Sample sample;
  Matrix H0;
  VecParams start;
  optimizer::OptimizerConfig cfg;
  bool ready = false;
};
FitFixture g_fit;

void prepare_fit() {
  if (g_fit.ready) return;
  std::mt19937_64 rng(606);
  const VecParams truth = generators::positive_params(2, rng, 0.6, 0.85);
  g_fit.sample = model::simulate(truth, 500, 66);
  g_fit.H0 = constraints::sample_covariance(g_fit.sample);

  optimizer::OptimizerConfig cfg;
  cfg.constraints.K = constraints::default_K(g_fit.sample);
  cfg.f_tol = 1e-6;
  cfg.max_outer = 500;
  g_fit.cfg = cfg;
  g_fit.start =
      prelim::preliminary_estimate(g_fit.sample, prelim::ProxyMethod::Ewma, cfg);
  g_fit.ready = true;
}

// ---------------------------------------------------------------- criterion 6
bool estimation_feasibility(std::string& detail) {
  prepare_fit();
  long iterates = 0, violations = 0;
  optimizer::OptimizerConfig cfg = g_fit.cfg;
  cfg.iterate_observer = [&](const VecParams& p, bool) {
    ++iterates;
    if (!bregman::strictly_feasible(p, cfg.constraints)) ++violations;
  };
  optimizer::LikelihoodObjective obj(g_fit.sample, g_fit.H0,
                                     optimizer::GradBackend::Recursive);
  const auto res = optimizer::estimate(obj, g_fit.start, cfg);

  if (!res.converged) {
    detail = "estimation did not converge: " + res.reason;
    return false;
  }
  if (violations != 0) {
    detail = std::to_string(violations) + " of " + std::to_string(iterates) +
             " iterates left the feasible set";
    return false;
  }
  if (iterates < 2) {
    detail = "observer saw too few iterates";
    return false;
  }
  double last = 1e300;
  for (const auto& e : res.trace) {
    if (!e.accepted) continue;
    if (e.f > last + 1e-10 * (1.0 + std::abs(last))) {
      detail = "accepted objective increased along the trace";
      return false;
    }
    last = e.f;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 7
bool scalar_recovery(std::string& detail) {
  const VecParams truth = scalar_params(0.1, 0.8, 0.01);
  const Sample sample = model::simulate(truth, 4000, 7007);
  const Matrix H0 = constraints::sample_covariance(sample);

  optimizer::OptimizerConfig cfg;
  cfg.constraints.K = constraints::default_K(sample);
  cfg.f_tol = 1e-7;
  cfg.max_outer = 500;
  optimizer::LikelihoodObjective obj(sample, H0,
                                     optimizer::GradBackend::Recursive);
  const VecParams start =
      prelim::canonical_feasible_start(1, cfg.constraints, H0(0, 0));
  const auto res = optimizer::estimate(obj, start, cfg);
  if (!res.converged) {
    detail = "fit did not converge: " + res.reason;
    return false;
  }
  const double f_hat = obj.value(res.theta);
  const double f_true = obj.value(truth);
  if (f_hat > f_true + 1e-3) {
    std::ostringstream ss;
    ss << "fitted likelihood " << f_hat << " worse than truth " << f_true;
    detail = ss.str();
    return false;
  }
  const double persistence = res.theta.A(0, 0) + res.theta.B(0, 0);
  if (std::abs(persistence - 0.9) > 0.1) {
    std::ostringstream ss;
    ss << "persistence " << persistence << " too far from 0.9";
    detail = ss.str();
    return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 8
bool parameter_counts(std::string& detail) {
  const long expected[] = {3, 21, 78, 210, 465, 903, 1596, 2628};
  for (int n = 1; n <= 8; ++n) {
    if (portfolio::parameter_count(n) != expected[n - 1]) {
      detail = "count mismatch at n=" + std::to_string(n);
      return false;
    }
    if (portfolio::parameter_count(n) != theta_dim(n)) {
      detail = "count disagrees with the flattened dimension at n=" +
               std::to_string(n);
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- criterion 9
// Scalar fixture: the uncorrected proximal iteration converges too (it does
// not on the two-asset fixture within any reasonable cap), which makes the
// gradient-call comparison a comparison between two finished runs.
bool bfgs_efficiency(std::string& detail) {
  const VecParams truth = scalar_params(0.1, 0.8, 0.01);
  const Sample sample = model::simulate(truth, 2000, 4242);
  const Matrix H0 = constraints::sample_covariance(sample);
  optimizer::OptimizerConfig cfg;
  cfg.constraints.K = constraints::default_K(sample);
  cfg.f_tol = 1e-7;
  cfg.max_outer = 5000;
  optimizer::LikelihoodObjective obj(sample, H0,
                                     optimizer::GradBackend::Recursive);
  const VecParams start =
      prelim::canonical_feasible_start(1, cfg.constraints, H0(0, 0));
  const auto corrected = optimizer::estimate(obj, start, cfg);
  cfg.use_bfgs = false;
  const auto plain = optimizer::estimate(obj, start, cfg);
  if (!corrected.converged || !plain.converged) {
    detail = "a variant did not converge: " +
             (corrected.converged ? plain.reason : corrected.reason);
    return false;
  }
  if (!close_rel(corrected.objective, plain.objective, 1e-4)) {
    detail = "the variants stopped at different objective values";
    return false;
  }
  if (!(corrected.gradient_calls < plain.gradient_calls)) {
    std::ostringstream ss;
    ss << "gradient calls " << corrected.gradient_calls << " (with) vs "
       << plain.gradient_calls << " (without)";
    detail = ss.str();
    return false;
  }
  return true;
}

// --------------------------------------------------------------- criterion 10
bool portfolio_utilities(std::string& detail) {
  std::mt19937_64 rng(1010);
  // KKT stationarity of the minimum-variance weights
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const Matrix A = oracles::rand_spd(n, rng);
    const Vector w = portfolio::min_variance_weights(A);
    if (std::abs(w.sum() - 1.0) > 1e-10) {
      detail = "weights do not sum to one";
      return false;
    }
    const Vector grad = A * w;
    for (int i = 1; i < n; ++i)
      if (std::abs(grad(i) - grad(0)) > 1e-8 * (1.0 + grad.norm())) {
        detail = "KKT stationarity violated";
        return false;
      }
  }

  // a model whose implied net-return covariance is exact wins every trial
  Sample sample = generators::gaussian_sample(2, 300, rng, 0.1);
  std::vector<Matrix> planted, flat;
  for (int t = 0; t < 300; ++t) {
    Vector R(2);
    for (int i = 0; i < 2; ++i) R(i) = std::exp(sample.z[t](i)) - 1.0;
    Matrix H(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) H(i, j) = std::log(1.0 + R(i) * R(j));
    planted.push_back(H);
    flat.push_back(0.01 * Matrix::Identity(2, 2));
  }
  const auto cmp = portfolio::r2_ranking({"planted", "flat"}, {planted, flat},
                                         sample, 40, 2024);
  if (cmp.r2_wins[0] != 40) {
    detail = "planted model won only " + std::to_string(cmp.r2_wins[0]) +
             " of 40 trials";
    return false;
  }

  // the three-model pipeline is reproducible byte for byte
  const fs::path root =
      fs::temp_directory_path() / "vecgarch_tests" / "acceptance_port";
  fs::remove_all(root);
  fs::create_directories(root);
  RunConfig sim;
  sim.out = (root / "sim").string();
  sim.n = 3;
  sim.T = 200;
  sim.seed = 10;
  pipeline::run_simulate(sim);
  RunConfig port;
  port.input = (root / "sim" / "prices.csv").string();
  port.prelim_method = prelim::ProxyMethod::Ewma;
  port.grad = optimizer::GradBackend::Recursive;
  port.n_trials = 20;
  port.seed = 3;
  for (const char* out : {"p1", "p2"}) {
    RunConfig c = port;
    c.out = (root / out).string();
    pipeline::run_portfolio(c);
  }
  auto read_bytes = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  if (read_bytes(root / "p1" / "comparison.csv") !=
      read_bytes(root / "p2" / "comparison.csv")) {
    detail = "portfolio comparison not reproducible";
    return false;
  }
  if (read_bytes(root / "p1" / "weights_vec.csv") !=
      read_bytes(root / "p2" / "weights_vec.csv")) {
    detail = "portfolio weights not reproducible";
    return false;
  }
  return true;
}

// --------------------------------------------------------------- criterion 11
bool spectrum_substitute(std::string& detail) {
  // planted-rank recovery at n=3: nine-dimensional quadratic representation
  Vector d(9);
  d << 5.0, 3.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0;
  VecParams p = zero_params(3);
  p.A = matops::sigma_inv(Matrix(d.asDiagonal()));
  p.B = matops::sigma_inv(Matrix(Vector(0.5 * Vector::Ones(9)).asDiagonal()));
  p.c = Vector::Ones(6);
  const auto rep = portfolio::spectrum_report(p);
  if (rep.rank_A != 4 || rep.rank_B != 9) {
    detail = "planted ranks not recovered";
    return false;
  }
  for (int i = 0; i < 4; ++i)
    if (!close_rel(rep.eig_A(i), d(i), 1e-9)) {
      detail = "planted eigenvalues not recovered";
      return false;
    }
  for (int i = 4; i < 9; ++i)
    if (std::abs(rep.eig_A(i)) > 1e-9) {
      detail = "phantom eigenvalue in the planted spectrum";
      return false;
    }
  return true;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "operator algebra identities and norm table", 10.0, operator_algebra},
      {2, "closed-form, recursive and finite-difference gradients agree", 60.0,
       gradient_agreement},
      {3, "truncated gradient recursion honors its a-priori bounds", 30.0,
       truncation_bounds},
      {4, "simulated covariance paths stay positive; long-run moments match",
       120.0, positivity_and_moments},
      {5, "matrix divergence properties and proximal model anchoring", 5.0,
       divergence_properties},
      {6, "constrained estimation keeps every iterate strictly feasible",
       300.0, estimation_feasibility},
      {7, "scalar model recovery on a long simulated sample", 120.0,
       scalar_recovery},
      {8, "free-parameter counts for one through eight series", 5.0,
       parameter_counts},
      {9, "curvature correction reduces the gradient-call count", 600.0,
       bfgs_efficiency},
      {10, "portfolio utilities: optimality, planted winner, reproducibility",
       300.0, portfolio_utilities},
      {11, "planted-rank spectrum recovery as the historical-table substitute",
       60.0, spectrum_substitute},
  };

  int failed = 0;
  bool prior_ok = true;
  for (auto& c : criteria) {
    std::string detail;
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (ok && dt > c.budget_s) {
      ok = false;
      detail = "exceeded the time budget";
    }
    if (c.id == 11) {
      std::printf(
          "NOTE  the published historical-data comparison values are not\n"
          "      reproduced here: that data set is not part of this\n"
          "      repository.  The substitute evidence is criteria 1-10 plus\n"
          "      the planted-rank spectrum recovery below.\n");
      if (!prior_ok && ok) {
        ok = false;
        detail = "substitute requires criteria 1-10 to pass";
      }
    }
    if (!ok) {
      ++failed;
      prior_ok = false;
    }
    std::printf("%s %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", c.id,
                c.label.c_str(), dt, detail.empty() ? "" : " -- ",
                detail.c_str());
    std::fflush(stdout);
  }

  std::printf("%d of %zu acceptance criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
