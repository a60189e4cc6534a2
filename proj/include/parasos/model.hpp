#pragma once

#include "parasos/poly.hpp"

namespace parasos {

// Scalar parabolic plant  w_t = a(x) w_xx + b(x) w_x + c(x) w  on [0,1] with
// w(0,t) = 0 and w_x(1,t) = u(t). The reaction coefficient splits as
// c(x) = c0(x) + lambda where lambda is the instability factor swept by the
// benchmarks. alpha is a certified lower bound of a on [0,1].
struct PdeModel {
  Poly1 a;
  Poly1 b;
  Poly1 c0;
  double lambda = 0.0;
  double alpha = 0.0;

  PdeModel() = default;
  PdeModel(Poly1 a_in, Poly1 b_in, Poly1 c0_in, double lambda_in);

  Poly1 c() const { return c0 + Poly1::constant(lambda); }
  PdeModel with_lambda(double l) const { return PdeModel(a, b, c0, l); }

  // w_t = w_xx + lambda w
  static PdeModel example1(double lambda);
  // a = x^3 - x^2 + 2, b = 3x^2 - 2x, c0 = -0.5x^3 + 1.3x^2 - 1.5x + 0.7
  static PdeModel example2(double lambda);
};

}  // namespace parasos
