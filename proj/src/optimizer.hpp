#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "constraints.hpp"
#include "model.hpp"
#include "types.hpp"

namespace vecgarch::optimizer {

// Anything the outer loop can minimize: a value and a flattened gradient
// ([vec(A); vec(B); c] layout) at a feasible point.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual int dim_n() const = 0;
  virtual double value(const VecParams& theta) const = 0;
  virtual Vector gradient(const VecParams& theta) const = 0;
};

enum class GradBackend { Closed, Recursive };

// Negative log-likelihood objective with a fixed presample covariance.
class LikelihoodObjective : public Objective {
 public:
  LikelihoodObjective(const Sample& sample, Matrix H0,
                      GradBackend backend = GradBackend::Closed,
                      int truncation_depth = 0);
  int dim_n() const override { return sample_.n; }
  double value(const VecParams& theta) const override;
  Vector gradient(const VecParams& theta) const override;

 private:
  Sample sample_;
  Matrix H0_;
  GradBackend backend_;
  int truncation_depth_;
};

struct OptimizerConfig {
  constraints::ConstraintConfig constraints;
  double f_tol = 1e-5;       // |f improvement| on an accepted step
  double grad_tol = 1e-6;    // ||grad|| <= grad_tol (1 + |f|)
  int max_outer = 500;
  int max_consecutive_rejects = 25;
  bool use_bfgs = true;
  double L0 = 1.0;
  double L_min = 1e-12;
  double L_max = 1e12;
  bool rho_full_model = false;  // model decrease from the full barrier model
  int newton_max_iter = 50;
  double newton_tol = 1e-8;
  // Optional audit hook; called on every outer iterate and (inner=true) on
  // every accepted inner Newton iterate.
  std::function<void(const VecParams&, bool inner)> iterate_observer;
};

struct TraceEntry {
  int iter = 0;
  double f = 0;
  double rho = 0;
  double L = 0;
  double grad_norm = 0;
  double min_margin = 0;
  bool accepted = false;
  double elapsed_s = 0;
  long grad_calls = 0;
};

struct EstimationResult {
  VecParams theta;
  double objective = 0;
  bool converged = false;
  std::string reason;
  int outer_iterations = 0;
  long gradient_calls = 0;
  bool L_min_clamped = false;
  double wall_time_s = 0;
  std::vector<TraceEntry> trace;
};

// rho = (f_new - f_prev) / (model_new - model_prev); 1 when the denominator
// is below 1e-14 (1 + |f_prev|) in magnitude.
double adequacy_ratio(double f_prev, double f_new, double model_prev,
                      double model_new);

enum class StepDecision { RejectDouble, AcceptKeep, AcceptHalve };
StepDecision step_decision(double rho);

// Direct rank-two BFGS update of the Hessian approximation; returns H
// unchanged when the curvature condition y's <= 1e-10 ||y|| ||s|| fails.
Matrix bfgs_update(const Matrix& H, const Vector& s, const Vector& y);

EstimationResult estimate(Objective& objective, const VecParams& theta0,
                          const OptimizerConfig& cfg);

}  // namespace vecgarch::optimizer
