#include "pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "constraints.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "matops.hpp"
#include "model.hpp"
#include "portfolio.hpp"
#include "prelim.hpp"

namespace vecgarch::pipeline {

namespace fs = std::filesystem;

namespace {

// Registers every path it hands out; rolls the files back unless the run
// reached commit().
class OutputGuard {
 public:
  explicit OutputGuard(const std::string& dir) : root_(dir) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw data_error("cannot create output directory: " + dir);
  }

  std::string file(const std::string& rel) {
    const fs::path p = root_ / rel;
    if (p.has_parent_path()) {
      std::error_code ec;
      fs::create_directories(p.parent_path(), ec);
      if (ec)
        throw data_error("cannot create output directory: " +
                         p.parent_path().string());
    }
    created_.push_back(p);
    return p.string();
  }

  void commit() { committed_ = true; }

  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = created_.rbegin(); it != created_.rend(); ++it)
      fs::remove(*it, ec);
  }

 private:
  fs::path root_;
  std::vector<fs::path> created_;
  bool committed_ = false;
};

constraints::ConstraintConfig resolve_constraints(const RunConfig& cfg,
                                                  const Sample* sample) {
  constraints::ConstraintConfig c = cfg.constraints;
  if (cfg.K > 0.0)
    c.K = cfg.K;
  else if (sample != nullptr)
    c.K = constraints::default_K(*sample);
  return c;
}

optimizer::OptimizerConfig resolve_optimizer(const RunConfig& cfg,
                                             const Sample* sample) {
  RunConfig local = cfg;
  local.constraints = resolve_constraints(cfg, sample);
  local.K = local.constraints.K;
  return local.optimizer_config();
}

VecParams read_params_dir(const std::string& dir) {
  VecParams p;
  p.c = io::read_vector_csv((fs::path(dir) / "c.csv").string());
  p.A = io::read_matrix_csv((fs::path(dir) / "A.csv").string());
  p.B = io::read_matrix_csv((fs::path(dir) / "B.csv").string());
  const int N = static_cast<int>(p.c.size());
  int n = 0;
  while (half_vec_dim(n) < N) ++n;
  if (half_vec_dim(n) != N)
    throw data_error("c.csv length " + std::to_string(N) +
                     " is not a triangular number n(n+1)/2");
  if (p.A.rows() != N || p.A.cols() != N || p.B.rows() != N || p.B.cols() != N)
    throw data_error("A.csv/B.csv must be " + std::to_string(N) + "x" +
                     std::to_string(N) + " to match c.csv");
  p.n = n;
  return p;
}

void write_params_dir(OutputGuard& out, const std::string& sub,
                      const VecParams& p) {
  io::write_vector_csv(out.file(sub + "/c.csv"), p.c);
  io::write_matrix_csv(out.file(sub + "/A.csv"), p.A);
  io::write_matrix_csv(out.file(sub + "/B.csv"), p.B);
}

void write_spectra(OutputGuard& out, const portfolio::SpectrumReport& rep) {
  io::write_vector_csv(out.file("spectrum_A.csv"), rep.eig_A);
  io::write_vector_csv(out.file("spectrum_B.csv"), rep.eig_B);
}

Sample load_returns(const RunConfig& cfg) {
  if (cfg.input.empty())
    throw config_error("this command needs input=<price csv>");
  const io::PriceTable table = io::read_prices_csv(cfg.input);
  return io::to_log_returns(table, cfg.n, cfg.date_from, cfg.date_to);
}

int resolve_truncation(const RunConfig& cfg,
                       const constraints::ConstraintConfig& ccfg) {
  if (cfg.grad != optimizer::GradBackend::Recursive) return 0;
  if (!(cfg.trunc_delta > 0.0)) return 0;
  return model::truncation_depth(ccfg, cfg.trunc_delta);
}

void write_trace_csv(const std::string& path,
                     const std::vector<optimizer::TraceEntry>& trace) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open output file: " + path);
  out << "iter,f,rho,L,grad_norm,min_margin,accepted,elapsed_s,grad_calls\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << sep;
  };
  for (const auto& e : trace) {
    out << e.iter << ',';
    put(e.f, ',');
    put(e.rho, ',');
    put(e.L, ',');
    put(e.grad_norm, ',');
    put(e.min_margin, ',');
    out << (e.accepted ? 1 : 0) << ',';
    put(e.elapsed_s, ',');
    out << e.grad_calls << '\n';
  }
  if (!out) throw data_error("write failed: " + path);
}

void describe_feasibility(std::ostream& os, const VecParams& p,
                          const constraints::ConstraintConfig& ccfg) {
  const auto rep = constraints::check(p, ccfg);
  os << "feasible: " << (rep.feasible ? "yes" : "no") << "\n"
     << "margin stationarity:    " << rep.sc << "\n"
     << "margin positivity c:    " << rep.pc_c << "\n"
     << "margin positivity A:    " << rep.pc_A << "\n"
     << "margin positivity B:    " << rep.pc_B << "\n"
     << "margin contraction B:   " << rep.cc << "\n"
     << "margin compactness c:   " << rep.kc << "\n";
}

// Full likelihood fit used by both the estimate and portfolio commands.
struct FitResult {
  VecParams start;
  optimizer::EstimationResult result;
  Matrix H0;
  constraints::ConstraintConfig ccfg;
};

FitResult fit_sample(const Sample& sample, const RunConfig& cfg) {
  FitResult fit;
  fit.ccfg = resolve_constraints(cfg, &sample);
  fit.H0 = constraints::sample_covariance(sample);
  const auto ocfg = resolve_optimizer(cfg, &sample);
  fit.start = prelim::preliminary_estimate(sample, cfg.prelim_method, ocfg,
                                           cfg.lambda);
  optimizer::LikelihoodObjective obj(sample, fit.H0, cfg.grad,
                                     resolve_truncation(cfg, fit.ccfg));
  fit.result = optimizer::estimate(obj, fit.start, ocfg);
  return fit;
}

}  // namespace

void run_simulate(const RunConfig& cfg) {
  VecParams params;
  if (!cfg.params_dir.empty()) {
    params = read_params_dir(cfg.params_dir);
    if (cfg.n > 0 && cfg.n != params.n)
      throw config_error("n=" + std::to_string(cfg.n) +
                         " conflicts with the parameter files (n=" +
                         std::to_string(params.n) + ")");
  } else {
    if (cfg.n < 1) throw config_error("simulate needs n >= 1 or params=<dir>");
    const auto ccfg = resolve_constraints(cfg, nullptr);
    // separate stream from the innovation draw below; variance scale of a
    // plausible daily return series
    params = prelim::random_feasible(cfg.n, ccfg,
                                     cfg.seed ^ 0x9e3779b97f4a7c15ULL, 1e-4);
  }
  if (cfg.T < 2) throw config_error("simulate needs T >= 2");

  const Sample sample = model::simulate(params, cfg.T, cfg.seed);
  const int n = params.n;
  const int T = sample.T();

  OutputGuard out(cfg.out);
  write_params_dir(out, "params_true", params);
  io::write_matrix_csv(out.file("H0.csv"), *sample.H0);

  Matrix returns(T, n);
  for (int t = 0; t < T; ++t) returns.row(t) = sample.z[t].transpose();
  io::write_matrix_csv(out.file("returns.csv"), returns);

  Matrix prices(T + 1, n);
  prices.row(0).setConstant(100.0);
  for (int t = 0; t < T; ++t)
    prices.row(t + 1) =
        prices.row(t).array() * returns.row(t).array().exp();
  std::vector<std::string> tickers;
  for (int i = 1; i <= n; ++i) tickers.push_back("S" + std::to_string(i));
  io::write_prices_csv(out.file("prices.csv"), io::synthetic_dates(T + 1),
                       tickers, prices);
  out.commit();
}

void run_estimate(const RunConfig& cfg) {
  const Sample sample = load_returns(cfg);
  const FitResult fit = fit_sample(sample, cfg);
  const auto& res = fit.result;

  OutputGuard out(cfg.out);
  write_params_dir(out, "params_hat", res.theta);
  write_trace_csv(out.file("trace.csv"), res.trace);
  write_spectra(out, portfolio::spectrum_report(res.theta));

  bool pseudo = false;
  if (cfg.std_errors) {
    const auto acov =
        model::asymptotic_covariance(res.theta, sample, fit.H0);
    pseudo = acov.pseudo_inverse;
    Vector se(acov.omega.rows());
    for (Eigen::Index i = 0; i < se.size(); ++i)
      se(i) = std::sqrt(std::max(0.0, acov.omega(i, i)) / double(sample.T()));
    io::write_vector_csv(out.file("std_errors.csv"), se);
  }

  std::ofstream sum(out.file("summary.txt"));
  if (!sum) throw data_error("cannot open output file: summary.txt");
  const auto rep = portfolio::spectrum_report(res.theta);
  sum << "command: estimate\n"
      << "n: " << sample.n << "\n"
      << "T: " << sample.T() << "\n"
      << "free parameters: " << portfolio::parameter_count(sample.n) << "\n"
      << "K: " << fit.ccfg.K << "\n"
      << "neg loglik: " << res.objective << "\n"
      << "converged: " << (res.converged ? "yes" : "no") << "\n"
      << "stop reason: " << res.reason << "\n"
      << "outer iterations: " << res.outer_iterations << "\n"
      << "gradient calls: " << res.gradient_calls << "\n"
      << "weight hit lower bound: " << (res.L_min_clamped ? "yes" : "no")
      << "\n"
      << "rank sigma(A): " << rep.rank_A << "\n"
      << "rank sigma(B): " << rep.rank_B << "\n";
  if (cfg.std_errors)
    sum << "covariance inverse: " << (pseudo ? "pseudo" : "exact") << "\n";
  describe_feasibility(sum, res.theta, fit.ccfg);
  if (!sum) throw data_error("write failed: summary.txt");
  sum.close();
  out.commit();
}

void run_portfolio(const RunConfig& cfg) {
  const Sample sample = load_returns(cfg);
  const int n = sample.n;
  const int T = sample.T();

  const auto ocfg = resolve_optimizer(cfg, &sample);
  std::vector<std::string> names = {"ewma", "ogarch", "vec"};
  std::vector<std::vector<Matrix>> paths;
  paths.push_back(prelim::ewma_path(sample, cfg.lambda));
  paths.push_back(prelim::ogarch_path(sample, ocfg, 0, cfg.lambda));

  const FitResult fit = fit_sample(sample, cfg);
  paths.push_back(model::filter(fit.result.theta, sample, fit.H0).H);

  auto comp = portfolio::r2_ranking(names, paths, sample, cfg.n_trials,
                                    cfg.seed, cfg.net_return_literal);

  // equal-weight net-return MSE and minimum-variance portfolios, both on the
  // net-return scale used by the ranking contest
  const Vector w_eq = Vector::Constant(n, 1.0 / double(n));
  std::vector<double> net(T);
  for (int t = 0; t < T; ++t) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::expm1(sample.z[t](i));
    net[t] = acc / double(n);
  }
  comp.mse.resize(names.size());
  comp.opt_variance.resize(names.size());
  std::vector<Vector> weights(names.size());
  std::vector<double> vol(T);
  for (size_t m = 0; m < names.size(); ++m) {
    Matrix avg = Matrix::Zero(n, n);
    for (int t = 0; t < T; ++t) {
      const Matrix C =
          portfolio::net_return_cov(paths[m][t], cfg.net_return_literal);
      vol[t] = std::sqrt(std::max(0.0, w_eq.dot(C * w_eq)));
      avg += C;
    }
    avg /= double(T);
    comp.mse[m] = portfolio::mse_vs_proxy(vol, net);
    weights[m] = portfolio::min_variance_weights(avg);
    comp.opt_variance[m] = weights[m].dot(avg * weights[m]);
  }

  OutputGuard out(cfg.out);
  write_params_dir(out, "params_vec", fit.result.theta);
  write_spectra(out, portfolio::spectrum_report(fit.result.theta));
  for (size_t m = 0; m < names.size(); ++m)
    io::write_vector_csv(out.file("weights_" + names[m] + ".csv"), weights[m]);

  {
    std::ofstream csv(out.file("comparison.csv"));
    if (!csv) throw data_error("cannot open output file: comparison.csv");
    csv << "model,mse,r2_wins,r2_win_pct,opt_variance\n";
    char buf[64];
    for (size_t m = 0; m < names.size(); ++m) {
      csv << names[m] << ',';
      std::snprintf(buf, sizeof buf, "%.17g", comp.mse[m]);
      csv << buf << ',' << comp.r2_wins[m] << ',';
      std::snprintf(buf, sizeof buf, "%.17g", comp.r2_win_pct[m]);
      csv << buf << ',';
      std::snprintf(buf, sizeof buf, "%.17g", comp.opt_variance[m]);
      csv << buf << '\n';
    }
    if (!csv) throw data_error("write failed: comparison.csv");
  }

  std::ofstream txt(out.file("comparison.txt"));
  if (!txt) throw data_error("cannot open output file: comparison.txt");
  txt << "command: portfolio\n"
      << "n: " << n << "\nT: " << T << "\n"
      << "r2 trials: " << comp.n_trials << "\n"
      << "fit converged: " << (fit.result.converged ? "yes" : "no") << "\n"
      << "fit stop reason: " << fit.result.reason << "\n\n";
  for (size_t m = 0; m < names.size(); ++m) {
    txt << names[m] << ":\n"
        << "  equal-weight vol MSE: " << comp.mse[m] << "\n"
        << "  r2 wins:              " << comp.r2_wins[m] << " ("
        << comp.r2_win_pct[m] << "%)\n"
        << "  min-variance var:     " << comp.opt_variance[m] << "\n";
  }
  txt << "\n";
  describe_feasibility(txt, fit.result.theta, fit.ccfg);
  if (!txt) throw data_error("write failed: comparison.txt");
  txt.close();
  out.commit();
}

void run_spectrum(const RunConfig& cfg) {
  VecParams params;
  if (!cfg.params_dir.empty()) {
    params = read_params_dir(cfg.params_dir);
  } else {
    if (cfg.n < 1) throw config_error("spectrum needs n >= 1 or params=<dir>");
    params =
        prelim::canonical_feasible_start(cfg.n, resolve_constraints(cfg, nullptr));
  }
  const auto rep = portfolio::spectrum_report(params);

  OutputGuard out(cfg.out);
  write_spectra(out, rep);
  std::ofstream sum(out.file("summary.txt"));
  if (!sum) throw data_error("cannot open output file: summary.txt");
  sum << "command: spectrum\n"
      << "n: " << params.n << "\n"
      << "N: " << params.N() << "\n"
      << "free parameters: " << portfolio::parameter_count(params.n) << "\n"
      << "rank sigma(A): " << rep.rank_A << " of " << params.n * params.n << "\n"
      << "rank sigma(B): " << rep.rank_B << " of " << params.n * params.n << "\n";
  if (!sum) throw data_error("write failed: summary.txt");
  sum.close();
  out.commit();
}

}  // namespace vecgarch::pipeline
