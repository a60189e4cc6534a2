#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "parasos/model.hpp"
#include "parasos/soscone.hpp"

namespace parasos {

enum class GridKind { kUniform, kLog };
enum class BcMode { kAutonomous, kControlled };

// Finite-difference reduction of the plant on interior nodes x_1..x_m with
// w(0) = 0 and the flux condition at x = 1 eliminated through a second-order
// one-sided difference: flux_d0 w(1) + flux_d1 w_m + flux_d2 w_{m-1} = u.
// The autonomous closure is w' = A w, the controlled form w' = A0 w + svec w(1)
// with w(1) = (u - flux_d1 w_m - flux_d2 w_{m-1}) / flux_d0, so that
// w' = A w + Bvec u.
struct Discretization {
  PdeModel model;
  int m = 0;
  GridKind grid = GridKind::kUniform;
  BcMode bc = BcMode::kAutonomous;
  std::vector<double> nodes;  // interior nodes, ascending; x=0,1 are implicit
  Eigen::MatrixXd A;
  Eigen::VectorXd Bvec;

  Eigen::MatrixXd A0;    // stencil without the boundary-value coupling
  Eigen::VectorXd svec;  // coefficient of w(1) in the stencil rows
  double flux_d0 = 0.0, flux_d1 = 0.0, flux_d2 = 0.0;
  std::vector<double> trap;   // trapezoid weights for the interior nodes
  double trap_boundary = 0.0; // weight of the x=1 boundary value

  // boundary value w(1) given the state and input
  double boundary_value(const Eigen::VectorXd& w, double u) const {
    return (u - flux_d1 * w[m - 1] - flux_d2 * w[m - 2]) / flux_d0;
  }
  double state_norm(const Eigen::VectorXd& w, double boundary) const;
};

// Log grids place the interior nodes at 10^linspace(-decades, 0, m+1)[0..m-1].
Discretization discretize(const PdeModel& model, int m, GridKind grid = GridKind::kUniform,
                          BcMode bc = BcMode::kAutonomous, double log_decades = 3.0);

struct StateFeedback {
  double R1 = 0.0;
  std::vector<double> R2_nodes;  // R2 at the interior nodes
  double R2_at_1 = 0.0;
};
StateFeedback sample_state_feedback(const Discretization& d, double R1, const Poly1& R2);
StateFeedback sample_state_feedback(const Discretization& d, double R1,
                                    const std::function<double(double)>& R2);

struct OutputFeedback {
  StateFeedback fb;
  std::vector<double> L1_nodes;
  double L2 = 0.0;
};
OutputFeedback sample_output_feedback(const Discretization& d, double R1, const Poly1& R2,
                                      const Poly1& L1, double L2);

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;            // plant profile at the nodes
  std::vector<Eigen::VectorXd> observer_states;   // empty unless output feedback
  std::vector<double> inputs;                     // u(t)
  std::vector<double> norms;                      // trapezoidal ||w(t)||
  std::vector<double> observer_error_norms;       // ||what - w|| when present
  std::vector<double> boundary_values;            // w(1,t)
  std::vector<double> nodes;
};

Trajectory simulate(const Discretization& d, const Eigen::VectorXd& w0, double T, double dt);
Trajectory simulate(const Discretization& d, const StateFeedback& fb,
                    const Eigen::VectorXd& w0, double T, double dt);
// Observer starts from the zero profile.
Trajectory simulate(const Discretization& d, const OutputFeedback& ofb,
                    const Eigen::VectorXd& w0, double T, double dt);

Eigen::VectorXd sample_profile(const Discretization& d, const std::function<double(double)>& w0);

// Least-squares slope of log||w(t)|| over the trailing window (decay rate is
// the negated slope). Returns +infinity when the norms underflow.
double estimate_decay_rate(const Trajectory& t, double window_fraction = 0.5);

struct StabilityMarginResult {
  double margin = 0.0;
  double lo = 0.0, hi = 0.0;
  bool ambiguous = false;  // |rate| < 1e-3 at the final refinement
};
// Bisection on the simulated growth/decay classification of the autonomous
// system; the initial profile is the first boundary eigenmode shape.
StabilityMarginResult empirical_stability_margin(const PdeModel& base, double lo, double hi,
                                                 double tol, int m = 128, double T = 5.0,
                                                 double dt = 1e-3);

struct LyapunovCheckReport {
  bool pass = true;
  int worst_index = -1;
  double worst_violation = 0.0;
  std::vector<double> values;  // V(w(t_k)) at the checked snapshots
};
// V(w(t_k)) from the certificate triple by trapezoidal quadrature; checks
// V(t_{k+1}) <= V(t_k) exp(-2 rate dt) + 1e-6 V(0).
LyapunovCheckReport lyapunov_derivative_check(const XiCertificate& cert, const Trajectory& t,
                                              double rate, int stride = 25);

double least_stable_eigenvalue(const Discretization& d);

void trajectory_to_csv(const Trajectory& t, const std::string& path, int stride = 10);

}  // namespace parasos
