#pragma once

#include <optional>
#include <string>
#include <vector>

#include "parasos/lyapmaps.hpp"
#include "parasos/model.hpp"
#include "parasos/opinverse.hpp"
#include "parasos/sdp.hpp"
#include "parasos/soscone.hpp"

namespace parasos {

struct PipelineOptions {
  XiDegrees hat_override{-1, -1};  // -1: derive from (d1, d2) and deg a
  double slack = 0.5;              // additive slack realizing strict inequalities
  bool restrict_diag = false;      // K1 = K2 = 0 restriction
  int picard_n = 6;
  int cheb_deg = 6;
  double max_inversion_residual = 1e-3;
  SolverOptions solver;
};

template <typename T>
struct Outcome {
  std::optional<T> value;
  SdpSolution::Status status = SdpSolution::Status::kInaccurate;
  std::string detail;

  bool ok() const { return value.has_value(); }
  const T& operator*() const { return *value; }
  const T* operator->() const { return &*value; }
};

struct StabilityReport {
  XiCertificate certificate;      // (M, K1, K2) in Xi_{d1,d2,eps}
  XiCertificate hat_certificate;  // negated derivative triple in Xi_{dh1,dh2,0}
  double delta = 0.0;             // certified decay rate
  double gamma = 0.0;             // sqrt(theta / eps)
};

struct ControllerGains {
  double Y1 = 0.0;
  Poly1 Y2;
  double R1 = 0.0;
  Poly1 R2;
  InverseTriple inverse;
  double mu = 0.0;
  XiCertificate certificate;
  XiCertificate hat_certificate;
};

struct ObserverGains {
  Poly1 T1;
  double T2 = 0.0;
  Poly1 T3;
  Poly1 L1;
  double L2 = 0.0;
  InverseTriple inverse;
  double delta = 0.0;
  XiCertificate certificate;
  XiCertificate hat_certificate;
};

struct OutputFeedbackController {
  ControllerGains controller;
  ObserverGains observer;
  double kappa = 0.0;  // certified closed-loop rate, 0.99 min(mu, delta)
};

// Exponential stability certification of the autonomous plant (decay delta).
Outcome<StabilityReport> analyze_stability(const PdeModel& model, int d1, int d2,
                                           double eps, double delta,
                                           const PipelineOptions& opts = {});

// Boundary state-feedback synthesis with decay mu; recovers (R1, R2) through
// the operator inverse.
Outcome<ControllerGains> synth_state_feedback(const PdeModel& model, int d1, int d2,
                                              double eps, double mu,
                                              const PipelineOptions& opts = {});

// Luenberger observer synthesis with decay delta; recovers (L1, L2).
Outcome<ObserverGains> synth_observer(const PdeModel& model, int d1, int d2,
                                      double eps, double delta,
                                      const PipelineOptions& opts = {});

// Observer-based output feedback: two decoupled programs, controller (Omega_c)
// and observer (Omega_s), then both gain recoveries.
Outcome<OutputFeedbackController> synth_output_feedback(const PdeModel& model,
                                                        XiDegrees d_ctrl, XiDegrees d_obs,
                                                        double eps, double mu, double delta,
                                                        const PipelineOptions& opts = {});

enum class SweepMode { kStability, kStateFeedback, kObserver, kOutputFeedback };

struct SweepRow {
  int d = 0;
  double lambda_star = 0.0;
};
struct SweepResult {
  SweepMode mode;
  std::vector<SweepRow> rows;
};

// For each d in d_list, the largest lambda with a feasible certificate,
// by bisection on [lo, hi] at tolerance tol. Asserts lambda*(d) non-decreasing
// within tol. threads <= 0 picks a default; probes at distinct d run in
// parallel.
SweepResult sweep_max_lambda(SweepMode mode, const PdeModel& base,
                             const std::vector<int>& d_list, double eps, double rate,
                             double lo, double hi, double tol,
                             const PipelineOptions& opts = {}, int threads = 0);

// Feasibility probe without gain recovery (used by sweeps and tests).
bool feasible_at(SweepMode mode, const PdeModel& model, int d, double eps, double rate,
                 const PipelineOptions& opts = {});

}  // namespace parasos
