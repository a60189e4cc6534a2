#pragma once

#include "parasos/model.hpp"
#include "parasos/simlab.hpp"

namespace parasos {

// Static output feedback u = -kappa w(1): for kappa -> infinity, stability of
// the comparison constant-coefficient Sturm-Liouville problem
//   p0 w'' + q1 w = mu sigma1 w,  w(0) = w(1) = 0
// requires mu1cc = (q1 - p0 pi^2) / sigma1 < 0. Here p = a(0) exp(int_0^x b/a),
// q = c p / a, sigma = p / a, and (p0, q1, sigma1) are scan bounds.
struct SturmLiouvilleBound {
  double p0 = 0.0;      // lower bound of p on [0,1]
  double q1 = 0.0;      // upper bound of q
  double sigma1 = 0.0;  // upper bound of sigma
  double mu1cc = 0.0;
  double lambda_threshold = 0.0;  // lambda such that mu1cc = 0
};
SturmLiouvilleBound sturm_liouville_bound(const PdeModel& model);

// Backstepping kernels for w_t = w_xx + lambda w (constant-coefficient case):
//   E(x,xi) = -lambda xi I1(z)/z,  F(x,xi) = -lambda xi J1(z)/z,
//   z = sqrt(lambda (x^2 - xi^2)), with I1(z)/z -> 1/2 as z -> 0.
// Series evaluation in powers of z^2 (30 terms).
struct BacksteppingKernels {
  double E = 0.0;
  double F = 0.0;
};
BacksteppingKernels backstepping_kernels(double lambda, double x, double xi);

// u(t) = E(1,1) w(1,t) + int_0^1 (D1 E)(1,x) w(x,t) dx
struct BacksteppingController {
  double R1 = 0.0;
  std::function<double(double)> R2;  // (D1 E)(1, x), series-differentiated
};
BacksteppingController backstepping_controller(double lambda);

// Residual of the inverse-pair property: applying (I - E-kernel) then
// (I + F-kernel) to w should return w. Max abs error over a grid of points
// for w(x) = sin(pi x / 2) + 0.3 x^2.
double backstepping_inverse_pair_residual(double lambda, int grid = 101);

// Condition number of [B, AB, ..., A^{m-1}B] for the reduced model of
// w_t = w_xx + 15 w on the given grid, and its numerical rank.
struct ControllabilityReport {
  double condition = 0.0;
  int numerical_rank = 0;
  int m = 0;
};
ControllabilityReport controllability_condition(int m, GridKind grid = GridKind::kUniform);

}  // namespace parasos
