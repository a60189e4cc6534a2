#include "parasos/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "parasos/quadrature.hpp"

namespace parasos {

namespace {

XiDegrees hat_degrees(int d1, int d2, const PdeModel& model, const PipelineOptions& opts) {
  if (opts.hat_override.d1 >= 0 && opts.hat_override.d2 >= 0) return opts.hat_override;
  return default_hat_degrees(d1, d2, model);
}

enum class Form { kStability, kController, kObserver };

struct Assembled {
  SdpProblem prob;
  XiVariable primal;
  XiVariable hat;
};

// Common SDP assembly: a Gram-parameterized triple, its negated derivative
// bound in the eps = 0 cone, and the boundary constraints of the given form.
Assembled assemble(const PdeModel& model, int d1, int d2, double eps, double rate,
                   Form form, const PipelineOptions& opts) {
  Assembled out;
  out.primal = declare_xi_triple(out.prob, "P", d1, d2, eps, opts.restrict_diag);
  const AHatTriple hat = (form == Form::kController)
                             ? omega_c(out.primal.triple, model, eps)
                             : omega_s(out.primal.triple, model, eps);
  const AKernelTriple target = negate_hat_with_rate(hat, out.primal.triple, rate);
  const XiDegrees dh = hat_degrees(d1, d2, model, opts);
  out.hat = constrain_in_xi(out.prob, "Q", target, dh.d1, dh.d2, 0.0, opts.restrict_diag);

  const auto add_poly_eq = [&](const APoly1& p) {
    for (int i = 0; i <= p.degree(); ++i) {
      const LinExpr e = p.coeff(i);
      if (e.norm1() > 0.0) out.prob.add_equality(e, 0.0);
    }
  };
  if (form == Form::kStability) {
    const auto bc = stability_boundary(out.primal.triple, model);
    for (const auto& p : bc.poly_equalities) add_poly_eq(p);
    for (const auto& e : bc.scalar_inequalities) out.prob.add_inequality(e);
  } else {
    add_poly_eq(lower_kernel_anchor(out.primal.triple));
  }
  return out;
}

struct SolvedPair {
  XiCertificate cert;
  XiCertificate hat_cert;
};

// Solve + certificate re-verification, independent of the solver status.
Outcome<SolvedPair> solve_and_verify(const PdeModel& model, int d1, int d2, double eps,
                                     double rate, Form form, const PipelineOptions& opts) {
  Outcome<SolvedPair> out;
  Assembled as = assemble(model, d1, d2, eps, rate, form, opts);
  const SdpSolution sol = solve(as.prob, opts.solver);
  out.status = sol.status;
  if (!sol.feasible()) {
    std::ostringstream os;
    os << "infeasible at (d1,d2) = (" << d1 << "," << d2 << "), lambda = "
       << model.lambda << ": " << sol.detail;
    out.detail = os.str();
    return out;
  }

  SolvedPair pair;
  pair.cert = XiCertificate::from_gram(sol.matrix_value(as.prob, as.primal.gram_handle),
                                       d1, d2, eps, opts.restrict_diag);
  const XiDegrees dh = hat_degrees(d1, d2, model, opts);
  pair.hat_cert = XiCertificate::from_gram(sol.matrix_value(as.prob, as.hat.gram_handle),
                                           dh.d1, dh.d2, 0.0, opts.restrict_diag);

  const VerifyReport v1 = verify_certificate(pair.cert);
  const VerifyReport v2 = verify_certificate(pair.hat_cert);
  if (!v1.pass || !v2.pass) {
    out.status = SdpSolution::Status::kInaccurate;
    out.detail = "certificate re-verification failed: " +
                 (v1.pass ? v2.violations.front() : v1.violations.front());
    return out;
  }

  // The hat certificate must reproduce the negated derivative triple of the
  // recovered primal triple.
  {
    const HatTriple hat = (form == Form::kController)
                              ? omega_c(pair.cert.triple, model, eps)
                              : omega_s(pair.cert.triple, model, eps);
    const KernelTriple target = negate_hat_with_rate(hat, pair.cert.triple, rate);
    double mism = 0.0;
    const Poly1 dM = target.M - pair.hat_cert.triple.M;
    for (int i = 0; i <= dM.degree(); ++i) mism = std::max(mism, std::fabs(dM.coeff(i)));
    const Poly2 dK = target.K1 - pair.hat_cert.triple.K1;
    for (int i = 0; i <= dK.deg1(); ++i)
      for (int j = 0; j <= dK.deg2(); ++j) mism = std::max(mism, std::fabs(dK.coeff(i, j)));
    if (mism > 1e-6) {
      out.status = SdpSolution::Status::kInaccurate;
      std::ostringstream os;
      os << "derivative triple mismatch " << mism;
      out.detail = os.str();
      return out;
    }
  }

  if (form == Form::kStability) {
    const auto bc = stability_boundary(pair.cert.triple, model);
    for (const auto& p : bc.poly_equalities)
      for (int i = 0; i <= p.degree(); ++i)
        if (std::fabs(p.coeff(i)) > 1e-7) {
          out.status = SdpSolution::Status::kInaccurate;
          out.detail = "boundary equality violated";
          return out;
        }
    for (double s : bc.scalar_inequalities)
      if (s > 1e-7) {
        out.status = SdpSolution::Status::kInaccurate;
        out.detail = "boundary inequality violated";
        return out;
      }
  } else {
    const Poly1 anchor = lower_kernel_anchor(pair.cert.triple);
    for (int i = 0; i <= anchor.degree(); ++i)
      if (std::fabs(anchor.coeff(i)) > 1e-7) {
        out.status = SdpSolution::Status::kInaccurate;
        out.detail = "K2(0,x) = 0 violated";
        return out;
      }
  }

  out.value = std::move(pair);
  return out;
}

}  // namespace

Outcome<StabilityReport> analyze_stability(const PdeModel& model, int d1, int d2,
                                           double eps, double delta,
                                           const PipelineOptions& opts) {
  if (eps <= 0.0 || delta <= 0.0)
    throw std::invalid_argument("analyze_stability: eps and delta must be positive");
  Outcome<StabilityReport> out;
  auto solved = solve_and_verify(model, d1, d2, eps, delta, Form::kStability, opts);
  out.status = solved.status;
  out.detail = solved.detail;
  if (!solved.ok()) return out;
  StabilityReport rep;
  rep.certificate = std::move(solved.value->cert);
  rep.hat_certificate = std::move(solved.value->hat_cert);
  rep.delta = delta;
  rep.gamma = std::sqrt(rep.certificate.theta / eps);
  out.value = std::move(rep);
  return out;
}

Outcome<ControllerGains> synth_state_feedback(const PdeModel& model, int d1, int d2,
                                              double eps, double mu,
                                              const PipelineOptions& opts) {
  if (eps <= 0.0 || mu <= 0.0 || opts.slack <= 0.0)
    throw std::invalid_argument("synth_state_feedback: eps, mu, slack must be positive");
  Outcome<ControllerGains> out;
  auto solved = solve_and_verify(model, d1, d2, eps, mu, Form::kController, opts);
  out.status = solved.status;
  out.detail = solved.detail;
  if (!solved.ok()) return out;

  ControllerGains g;
  g.certificate = std::move(solved.value->cert);
  g.hat_certificate = std::move(solved.value->hat_cert);
  g.mu = mu;
  const ControllerY cy = controller_Y(g.certificate.triple, model, opts.slack);
  g.Y1 = cy.Y1;
  g.Y2 = cy.Y2;
  g.inverse = invert_operator(g.certificate.triple, opts.picard_n, opts.cheb_deg);
  if (g.inverse.residual_bound > opts.max_inversion_residual) {
    out.status = SdpSolution::Status::kInaccurate;
    std::ostringstream os;
    os << "operator inversion residual " << g.inverse.residual_bound
       << " exceeds " << opts.max_inversion_residual
       << "; raise picard_n or cheb_deg";
    out.detail = os.str();
    return out;
  }

  // R1 = Y1 Minv(1);  R2(x) = Y1 K1inv(1,x) + int_x^1 Y2(xi) K1inv(xi,x) dxi
  //                          + int_0^x Y2(xi) K2inv(xi,x) dxi
  g.R1 = g.Y1 * g.inverse.Minv.eval(1.0);
  g.R2 = g.Y1 * eval_var1(g.inverse.K1inv, 1.0);
  g.R2 = g.R2 + integrate(mul_var1(g.Y2, g.inverse.K1inv), 1, IntBound::other_var(),
                          IntBound::constant(1.0));
  g.R2 = g.R2 + integrate(mul_var1(g.Y2, g.inverse.K2inv), 1, IntBound::constant(0.0),
                          IntBound::other_var());
  g.R2.trim();

  // Cross-check the closed form against a direct quadrature composition.
  {
    const auto& inv = g.inverse;
    const int panels = panels_for_degree(inv.K1inv.deg1() + inv.K1inv.deg2() + g.Y2.degree());
    for (int s = 0; s < 20; ++s) {
      const double x = (s + 0.5) / 20.0;
      const auto f = [&](double xi) {
        return g.Y2.eval(xi) * (xi >= x ? inv.K1inv.eval(xi, x) : inv.K2inv.eval(xi, x));
      };
      const double direct = g.Y1 * inv.K1inv.eval(1.0, x) + integrate_01(f, panels);
      if (std::fabs(direct - g.R2.eval(x)) > 1e-6 * (1.0 + std::fabs(direct))) {
        out.status = SdpSolution::Status::kInaccurate;
        out.detail = "controller gain cross-check failed";
        return out;
      }
    }
  }
  out.value = std::move(g);
  return out;
}

Outcome<ObserverGains> synth_observer(const PdeModel& model, int d1, int d2,
                                      double eps, double delta,
                                      const PipelineOptions& opts) {
  if (eps <= 0.0 || delta <= 0.0 || opts.slack <= 0.0)
    throw std::invalid_argument("synth_observer: eps, delta, slack must be positive");
  Outcome<ObserverGains> out;
  auto solved = solve_and_verify(model, d1, d2, eps, delta, Form::kObserver, opts);
  out.status = solved.status;
  out.detail = solved.detail;
  if (!solved.ok()) return out;

  ObserverGains g;
  g.certificate = std::move(solved.value->cert);
  g.hat_certificate = std::move(solved.value->hat_cert);
  g.delta = delta;
  const ObserverT ot = observer_T(g.certificate.triple, model, opts.slack);
  g.T1 = ot.T1;
  g.T2 = ot.T2;
  g.T3 = ot.T3;
  g.L2 = ot.L2;
  g.inverse = invert_operator(g.certificate.triple, opts.picard_n, opts.cheb_deg);
  if (g.inverse.residual_bound > opts.max_inversion_residual) {
    out.status = SdpSolution::Status::kInaccurate;
    std::ostringstream os;
    os << "operator inversion residual " << g.inverse.residual_bound
       << " exceeds " << opts.max_inversion_residual
       << "; raise picard_n or cheb_deg";
    out.detail = os.str();
    return out;
  }

  const Poly1 T13 = g.T1 + g.T3;
  g.L1 = apply_operator(g.inverse.as_triple(), T13);

  // Pointwise cross-check of L1 against the kernel quadrature.
  {
    const auto& inv = g.inverse;
    const int panels = panels_for_degree(inv.K1inv.deg1() + inv.K1inv.deg2() + T13.degree());
    for (int s = 0; s < 20; ++s) {
      const double x = (s + 0.5) / 20.0;
      const auto f = [&](double xi) {
        return (xi <= x ? inv.K1inv.eval(x, xi) : inv.K2inv.eval(x, xi)) * T13.eval(xi);
      };
      const double direct = inv.Minv.eval(x) * T13.eval(x) + integrate_01(f, panels);
      if (std::fabs(direct - g.L1.eval(x)) > 1e-6 * (1.0 + std::fabs(direct))) {
        out.status = SdpSolution::Status::kInaccurate;
        out.detail = "observer gain cross-check failed";
        return out;
      }
    }
  }
  out.value = std::move(g);
  return out;
}

Outcome<OutputFeedbackController> synth_output_feedback(const PdeModel& model,
                                                        XiDegrees d_ctrl, XiDegrees d_obs,
                                                        double eps, double mu, double delta,
                                                        const PipelineOptions& opts) {
  if (mu <= 0.0 || delta <= 0.0)
    throw std::invalid_argument("synth_output_feedback: rates must be positive");
  Outcome<OutputFeedbackController> out;
  auto ctrl = synth_state_feedback(model, d_ctrl.d1, d_ctrl.d2, eps, mu, opts);
  auto obs = synth_observer(model, d_obs.d1, d_obs.d2, eps, delta, opts);
  if (!ctrl.ok() || !obs.ok()) {
    out.status = !ctrl.ok() ? ctrl.status : obs.status;
    std::ostringstream os;
    if (!ctrl.ok()) os << "controller subproblem: " << ctrl.detail;
    if (!ctrl.ok() && !obs.ok()) os << "; ";
    if (!obs.ok()) os << "observer subproblem: " << obs.detail;
    out.detail = os.str();
    return out;
  }
  OutputFeedbackController ofc;
  ofc.controller = std::move(*ctrl.value);
  ofc.observer = std::move(*obs.value);
  ofc.kappa = 0.99 * std::min(mu, delta);
  out.value = std::move(ofc);
  out.status = SdpSolution::Status::kFeasible;
  return out;
}

bool feasible_at(SweepMode mode, const PdeModel& model, int d, double eps, double rate,
                 const PipelineOptions& opts) {
  const auto probe = [&](Form form) {
    Assembled as = assemble(model, d, d, eps, rate, form, opts);
    return solve(as.prob, opts.solver).feasible();
  };
  switch (mode) {
    case SweepMode::kStability:
      return probe(Form::kStability);
    case SweepMode::kStateFeedback:
      return probe(Form::kController);
    case SweepMode::kObserver:
      return probe(Form::kObserver);
    case SweepMode::kOutputFeedback:
      return probe(Form::kController) && probe(Form::kObserver);
  }
  return false;
}

SweepResult sweep_max_lambda(SweepMode mode, const PdeModel& base,
                             const std::vector<int>& d_list, double eps, double rate,
                             double lo, double hi, double tol,
                             const PipelineOptions& opts, int threads) {
  if (!(lo < hi) || tol <= 0.0)
    throw std::invalid_argument("sweep_max_lambda: invalid bracket or tolerance");
  SweepResult result;
  result.mode = mode;
  result.rows.resize(d_list.size());

  const auto lambda_star = [&](int d) {
    const auto feasible = [&](double lambda) {
      return feasible_at(mode, base.with_lambda(lambda), d, eps, rate, opts);
    };
    if (!feasible(lo))
      throw std::runtime_error("sweep_max_lambda: lower bracket infeasible at d = " +
                               std::to_string(d));
    if (feasible(hi)) return hi;  // saturated
    double a = lo, b = hi;
    while (b - a > tol) {
      const double mid = 0.5 * (a + b);
      (feasible(mid) ? a : b) = mid;
    }
    return a;
  };

  int nthreads = threads;
  if (nthreads <= 0) {
    nthreads = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PARASOS_THREADS")) nthreads = std::atoi(env);
    if (nthreads <= 0) nthreads = 1;
  }
  nthreads = std::min<int>(nthreads, static_cast<int>(d_list.size()));

  std::atomic<size_t> next{0};
  std::vector<std::string> errors(d_list.size());
  const auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= d_list.size()) return;
      try {
        result.rows[i] = {d_list[i], lambda_star(d_list[i])};
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error(e);

  for (size_t i = 1; i < result.rows.size(); ++i) {
    if (d_list[i] >= d_list[i - 1] &&
        result.rows[i].lambda_star < result.rows[i - 1].lambda_star - tol - 1e-9) {
      std::ostringstream os;
      os << "sweep_max_lambda: lambda*(d) decreased from " << result.rows[i - 1].lambda_star
         << " at d = " << d_list[i - 1] << " to " << result.rows[i].lambda_star
         << " at d = " << d_list[i];
      throw std::runtime_error(os.str());
    }
  }
  return result;
}

}  // namespace parasos
