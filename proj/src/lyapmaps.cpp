#include "parasos/lyapmaps.hpp"

#include <cmath>
#include <stdexcept>

namespace parasos {

ControllerY controller_Y(const KernelTriple& t, const PdeModel& model, double slack) {
  if (slack <= 0.0) throw std::invalid_argument("controller_Y: slack must be positive");
  ControllerY out;
  const double a1 = model.a.eval(1.0), ax1 = diff(model.a).eval(1.0), b1 = model.b.eval(1.0);
  out.Y1 = 0.5 * diff(t.M).eval(1.0) + (ax1 - b1) / (2.0 * a1) * t.M.eval(1.0) - slack;
  out.Y2 = eval_var1(diff(t.K1, 1), 1.0);
  return out;
}

ObserverT observer_T(const KernelTriple& t, const PdeModel& model, double slack) {
  if (slack <= 0.0) throw std::invalid_argument("observer_T: slack must be positive");
  ObserverT out;
  const double a1 = model.a.eval(1.0), ax1 = diff(model.a).eval(1.0), b1 = model.b.eval(1.0);
  const Poly1 K1_at_1 = eval_var1(t.K1, 1.0);
  out.T1 = (-0.5) * ((b1 - ax1) * K1_at_1 - a1 * eval_var1(diff(t.K1, 1), 1.0));
  out.T2 = -0.5 * ((b1 - ax1) * t.M.eval(1.0) - a1 * diff(t.M).eval(1.0)) - slack;
  const double aM1 = a1 * t.M.eval(1.0);
  if (std::fabs(aM1) < 1e-12)
    throw std::runtime_error("observer_T: a(1)M(1) = 0, corrupted certificate");
  out.L2 = out.T2 / aM1;
  out.T3 = (-out.L2 * a1) * K1_at_1;
  return out;
}

XiDegrees default_hat_degrees(int d1, int d2, const PdeModel& model) {
  const int bump = (std::max(model.a.degree(), 0) + 1) / 2 + 1;
  return {d1 + bump, d2 + bump};
}

}  // namespace parasos
