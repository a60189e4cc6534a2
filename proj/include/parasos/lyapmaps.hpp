#pragma once

#include "parasos/model.hpp"
#include "parasos/soscone.hpp"

namespace parasos {

inline constexpr double kPi = 3.14159265358979323846;

// Image of the linear maps Omega_s / Omega_c: an upper bound on the
// time-derivative of the Lyapunov functional generated by a kernel triple.
template <typename S>
struct HatTripleT {
  Poly1T<S> Mhat;
  Poly2T<S> K1hat;
  Poly2T<S> K2hat;
};
using HatTriple = HatTripleT<double>;
using AHatTriple = HatTripleT<LinExpr>;

template <typename S>
Poly1T<S> lift(const Poly1& p) {
  Poly1T<S> out;
  for (int i = 0; i <= p.degree(); ++i)
    if (p.coeff(i) != 0.0) out.add_to_coeff(i, S(p.coeff(i)));
  return out;
}

// Derivative bound along the autonomous dynamics (analysis / observer form):
//   Mhat = d/dx[d/dx(aM) - bM] + 2 [d/dx(a (K1-K2))]_{xi=x} + 2cM - (pi^2/2) alpha eps
//   K1hat = D1[D1(a(x)K1) - b(x)K1] + D2[D2(a(xi)K1) - b(xi)K1] + (c(x)+c(xi))K1
//   K2hat(x,xi) = K1hat(xi,x)
template <typename S>
HatTripleT<S> omega_s(const KernelTripleT<S>& t, const PdeModel& model, double eps) {
  const Poly1T<S> a = lift<S>(model.a), b = lift<S>(model.b), c = lift<S>(model.c());
  HatTripleT<S> h;

  const Poly1T<S> aM = a * t.M;
  h.Mhat = diff(diff(aM) - b * t.M);
  const Poly2T<S> aK = mul_var1(a, t.K1 - t.K2);
  h.Mhat = h.Mhat + S(2.0) * diag_restrict(diff(aK, 1));
  h.Mhat = h.Mhat + S(2.0) * (c * t.M);
  h.Mhat.add_to_coeff(0, S(-0.5 * kPi * kPi * model.alpha * eps));
  h.Mhat.trim();

  const Poly2T<S> term_x = diff(diff(mul_var1(a, t.K1), 1) - mul_var1(b, t.K1), 1);
  const Poly2T<S> term_xi = diff(diff(mul_var2(a, t.K1), 2) - mul_var2(b, t.K1), 2);
  h.K1hat = term_x + term_xi + mul_var1(c, t.K1) + mul_var2(c, t.K1);
  h.K2hat = h.K1hat.swap_vars();
  return h;
}

// Derivative bound along the dual (state-feedback) dynamics:
//   Mhat = (a_xx - b_x)M + bM_x + aM_xx + 2cM - (pi^2/2) alpha eps
//          + a(x) [2 d/dx(K1-K2)]_{xi=x}
//   K1hat = a(x)D1^2 K1 + b(x)D1 K1 + a(xi)D2^2 K1 + b(xi)D2 K1 + (c(x)+c(xi))K1
template <typename S>
HatTripleT<S> omega_c(const KernelTripleT<S>& t, const PdeModel& model, double eps) {
  const Poly1T<S> a = lift<S>(model.a), b = lift<S>(model.b), c = lift<S>(model.c());
  HatTripleT<S> h;

  const Poly1T<S> axx = lift<S>(diff(diff(model.a)));
  const Poly1T<S> bx = lift<S>(diff(model.b));
  h.Mhat = (axx - bx) * t.M + b * diff(t.M) + a * diff(diff(t.M)) + S(2.0) * (c * t.M);
  h.Mhat = h.Mhat + a * (S(2.0) * diag_restrict(diff(t.K1 - t.K2, 1)));
  h.Mhat.add_to_coeff(0, S(-0.5 * kPi * kPi * model.alpha * eps));
  h.Mhat.trim();

  h.K1hat = mul_var1(a, diff(diff(t.K1, 1), 1)) + mul_var1(b, diff(t.K1, 1)) +
            mul_var2(a, diff(diff(t.K1, 2), 2)) + mul_var2(b, diff(t.K1, 2)) +
            mul_var1(c, t.K1) + mul_var2(c, t.K1);
  h.K2hat = h.K1hat.swap_vars();
  return h;
}

template <typename S>
KernelTripleT<S> negate_hat_with_rate(const HatTripleT<S>& h, const KernelTripleT<S>& t,
                                      double rate) {
  KernelTripleT<S> out;
  out.M = -h.Mhat - S(2.0 * rate) * t.M;
  out.K1 = -h.K1hat - S(2.0 * rate) * t.K1;
  out.K2 = -h.K2hat - S(2.0 * rate) * t.K2;
  return out;
}

// Stability boundary conditions (analysis only):
//   (b(1)-a_x(1)) K1(1,x) - a(1) (D1 K1)(1,x) = 0
//   (b(1)-a_x(1)) M(1) - a(1) M_x(1) <= 0
//   K2(0,x) = 0
template <typename S>
struct BoundaryConstraintsT {
  std::vector<Poly1T<S>> poly_equalities;
  std::vector<S> scalar_inequalities;  // affine expressions required <= 0
};
using BoundaryConstraints = BoundaryConstraintsT<double>;
using ABoundaryConstraints = BoundaryConstraintsT<LinExpr>;

template <typename S>
BoundaryConstraintsT<S> stability_boundary(const KernelTripleT<S>& t, const PdeModel& model) {
  const double b1 = model.b.eval(1.0), ax1 = diff(model.a).eval(1.0), a1 = model.a.eval(1.0);
  BoundaryConstraintsT<S> bc;
  bc.poly_equalities.push_back(
      (S(b1 - ax1) * eval_var1(t.K1, 1.0) - S(a1) * eval_var1(diff(t.K1, 1), 1.0)).trim());
  bc.poly_equalities.push_back(eval_var1(t.K2, 0.0));
  bc.scalar_inequalities.push_back(S(b1 - ax1) * t.M.eval(1.0) - S(a1) * diff(t.M).eval(1.0));
  return bc;
}

// K2(0,x) = 0 alone (synthesis and observer problems).
template <typename S>
Poly1T<S> lower_kernel_anchor(const KernelTripleT<S>& t) {
  return eval_var1(t.K2, 0.0);
}

// Controller precursors: Y2(x) = (D1 K1)(1,x) and
// Y1 = M_x(1)/2 + (a_x(1)-b(1))/(2a(1)) M(1) - slack (strict inequality).
struct ControllerY {
  double Y1 = 0.0;
  Poly1 Y2;
};
ControllerY controller_Y(const KernelTriple& t, const PdeModel& model, double slack);

// Observer precursors (T1, T2, T3) and the boundary gain L2:
//   T1(x) = -0.5[(b(1)-a_x(1)) K1(1,x) - a(1)(D1 K1)(1,x)]
//   T2 = -0.5[(b(1)-a_x(1)) M(1) - a(1) M_x(1)] - slack
//   L2 = T2 / (a(1) M(1)),  T3(x) = -L2 a(1) K1(1,x)
struct ObserverT {
  Poly1 T1;
  double T2 = 0.0;
  Poly1 T3;
  double L2 = 0.0;
};
ObserverT observer_T(const KernelTriple& t, const PdeModel& model, double slack);

// Default cone degrees for the negated-hat membership.
struct XiDegrees {
  int d1 = 0;
  int d2 = 0;
};
XiDegrees default_hat_degrees(int d1, int d2, const PdeModel& model);

}  // namespace parasos
