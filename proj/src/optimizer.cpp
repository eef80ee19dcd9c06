#include "optimizer.hpp"

#include <chrono>
#include <cmath>

#include "bregman.hpp"
#include "errors.hpp"

namespace vecgarch::optimizer {

LikelihoodObjective::LikelihoodObjective(const Sample& sample, Matrix H0,
                                         GradBackend backend,
                                         int truncation_depth)
    : sample_(sample),
      H0_(std::move(H0)),
      backend_(backend),
      truncation_depth_(truncation_depth) {
  if (sample_.T() < 2) throw data_error("estimation requires T >= 2");
}

double LikelihoodObjective::value(const VecParams& theta) const {
  return model::neg_loglik(theta, sample_, H0_);
}

Vector LikelihoodObjective::gradient(const VecParams& theta) const {
  model::GradTheta g =
      backend_ == GradBackend::Closed
          ? model::grad_closed_form(theta, sample_, H0_)
          : model::grad_recursive(theta, sample_, truncation_depth_, H0_);
  return -model::flatten_grad(g);  // gradient of -log L
}

double adequacy_ratio(double f_prev, double f_new, double model_prev,
                      double model_new) {
  const double den = model_new - model_prev;
  if (std::abs(den) < 1e-14 * (1.0 + std::abs(f_prev))) return 1.0;
  return (f_new - f_prev) / den;
}

StepDecision step_decision(double rho) {
  if (rho < 0.01) return StepDecision::RejectDouble;
  if (rho > 0.9) return StepDecision::AcceptHalve;
  return StepDecision::AcceptKeep;
}

Matrix bfgs_update(const Matrix& H, const Vector& s, const Vector& y) {
  const double ys = y.dot(s);
  if (ys <= 1e-10 * y.norm() * s.norm()) return H;  // curvature too weak
  const Vector Hs = H * s;
  const double sHs = s.dot(Hs);
  Matrix out = H + (y * y.transpose()) / ys;
  if (sHs > 0.0) out -= (Hs * Hs.transpose()) / sHs;
  return out;
}

EstimationResult estimate(Objective& objective, const VecParams& theta0,
                          const OptimizerConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(clock::now() - t_start).count();
  };

  if (!bregman::strictly_feasible(theta0, cfg.constraints))
    throw numeric_error(
        "starting point is not strictly feasible; obtain one from the "
        "preliminary estimator");

  EstimationResult res;
  long grad_calls = 0;
  auto grad = [&](const VecParams& p) {
    ++grad_calls;
    return objective.gradient(p);
  };

  VecParams theta = theta0;
  double f = objective.value(theta);
  Vector g = grad(theta);
  double L = cfg.L0;
  const int dim = static_cast<int>(g.size());
  Matrix H;
  if (cfg.use_bfgs)
    H = Matrix::Identity(dim, dim) * std::max(1.0, std::abs(f)) /
        (1.0 + g.norm());

  auto margins = [&](const VecParams& p) {
    return constraints::check(p, cfg.constraints).min_margin();
  };
  auto push_trace = [&](int iter, double rho, bool accepted) {
    res.trace.push_back(TraceEntry{iter, f, rho, L, g.norm(), margins(theta),
                                   accepted, elapsed(), grad_calls});
  };

  if (cfg.iterate_observer) cfg.iterate_observer(theta, false);
  push_trace(0, 0.0, true);

  auto finish = [&](bool converged, std::string reason) {
    res.theta = theta;
    res.objective = f;
    res.converged = converged;
    res.reason = std::move(reason);
    res.gradient_calls = grad_calls;
    res.wall_time_s = elapsed();
    return res;
  };

  if (g.norm() <= cfg.grad_tol * (1.0 + std::abs(f)))
    return finish(true, "gradient norm below tolerance at start");

  int consecutive_rejects = 0;
  for (int iter = 1; iter <= cfg.max_outer; ++iter) {
    res.outer_iterations = iter;
    bregman::LocalModel lm(theta, f, g, bregman::Weights::uniform(L),
                           cfg.constraints.K);
    std::function<void(const VecParams&)> inner_obs;
    if (cfg.iterate_observer)
      inner_obs = [&](const VecParams& p) { cfg.iterate_observer(p, true); };
    bregman::NewtonResult nr =
        newton_solve(lm, cfg.constraints, cfg.use_bfgs ? &H : nullptr,
                     cfg.newton_max_iter, cfg.newton_tol, inner_obs);

    const Vector s = flatten(nr.theta) - flatten(theta);
    const double f_trial = objective.value(nr.theta);
    double quad = 0.0;
    if (cfg.use_bfgs) quad = 0.5 * s.dot(Vector(H * s));
    const double model_prev = f;
    const double model_new = cfg.rho_full_model
                                 ? bregman::local_model_value(lm, nr.theta) + quad
                                 : f + g.dot(s) + quad;

    const double rho = adequacy_ratio(f, f_trial, model_prev, model_new);
    const double den_floor = 1e-14 * (1.0 + std::abs(f));
    // A trial with a model increase means the inner solve degenerated; treat
    // it as inadequate so the accepted trace stays non-increasing.
    const bool model_increased = (model_new - model_prev) > den_floor;
    StepDecision dec = model_increased ? StepDecision::RejectDouble
                                       : step_decision(rho);

    if (dec == StepDecision::RejectDouble) {
      ++consecutive_rejects;
      push_trace(iter, rho, false);
      if (consecutive_rejects >= cfg.max_consecutive_rejects)
        return finish(false, "stalled: consecutive rejection cap reached");
      if (L * 2.0 > cfg.L_max)
        return finish(false, "penalization weight reached its upper bound");
      L *= 2.0;
      continue;
    }

    consecutive_rejects = 0;
    const double df = f - f_trial;
    theta = nr.theta;
    f = f_trial;
    const Vector g_new = grad(theta);
    if (cfg.use_bfgs) {
      const Vector y = g_new - g;
      H = bfgs_update(H, s, y);
    }
    g = g_new;
    if (cfg.iterate_observer) cfg.iterate_observer(theta, false);

    if (dec == StepDecision::AcceptHalve) {
      if (L * 0.5 < cfg.L_min) {
        L = cfg.L_min;
        res.L_min_clamped = true;  // reported, not silent
      } else {
        L *= 0.5;
      }
    }
    push_trace(iter, rho, true);

    if (std::abs(df) <= cfg.f_tol)
      return finish(true, "objective improvement below f_tol");
    if (g.norm() <= cfg.grad_tol * (1.0 + std::abs(f)))
      return finish(true, "gradient norm below tolerance");
  }
  return finish(false, "outer iteration cap reached");
}

}  // namespace vecgarch::optimizer
