#pragma once

#include "types.hpp"

namespace vecgarch::constraints {

// Tolerances of the constraint set.  All slacks default to 1e-4; K bounds
// the diagonal of math(c) from above and is normally derived from the data
// via default_K.
struct ConstraintConfig {
  double eps_AB = 1e-4;      // stationarity: (1-eps_AB) I - (A+B)(A+B)' >= 0
  double eps_A = 1e-4;       // positivity:   sigma(A) - eps_A I >= 0
  double eps_B = 1e-4;       // positivity:   sigma(B) - eps_B I >= 0
  double eps_c = 1e-4;       // positivity:   math(c) - eps_c I >= 0
  double eps_tilde_B = 1e-4; // contraction:  (1-eps_tilde_B) I - BB' >= 0
  double K = 10.0;           // compactness:  K I - math(c) >= 0
};

// Smallest-eigenvalue margins, one per constraint; nonnegative means the
// constraint holds.
struct FeasibilityReport {
  double sc = 0;    // stationarity
  double pc_c = 0;  // positivity of math(c)
  double pc_A = 0;  // positivity of sigma(A)
  double pc_B = 0;  // positivity of sigma(B)
  double cc = 0;    // contraction of B
  double kc = 0;    // compactness of c
  bool feasible = false;

  double min_margin() const;
};

FeasibilityReport check(const VecParams& params, const ConstraintConfig& cfg);

// Demeaned sample covariance with divisor T-1.
Matrix sample_covariance(const Sample& sample);

// Data-driven compactness level: 4 times the Frobenius norm of the sample
// covariance.  Degenerate samples (constant series, T < 2) are rejected.
double default_K(const Sample& sample);

}  // namespace vecgarch::constraints
