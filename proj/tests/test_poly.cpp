#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "parasos/model.hpp"
#include "parasos/poly.hpp"
#include "parasos/quadrature.hpp"

using namespace parasos;

namespace {
Poly1 random_poly(std::mt19937& rng, int deg, bool zero_at_0 = false) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Poly1 p;
  for (int k = zero_at_0 ? 1 : 0; k <= deg; ++k) p.add_to_coeff(k, unif(rng));
  return p;
}
Poly2 random_poly2(std::mt19937& rng, int deg) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Poly2 p;
  for (int i = 0; i <= deg; ++i)
    for (int j = 0; j <= deg; ++j) p.set_coeff(i, j, unif(rng));
  return p;
}
}  // namespace

TEST_CASE("difference of squares") {
  const Poly1 p({1.0, 1.0});   // x + 1
  const Poly1 q({-1.0, 1.0});  // x - 1
  const Poly1 r = p * q;
  CHECK(r.degree() == 2);
  CHECK(r.coeff(0) == doctest::Approx(-1.0));
  CHECK(r.coeff(1) == doctest::Approx(0.0));
  CHECK(r.coeff(2) == doctest::Approx(1.0));
}

TEST_CASE("scaling by zero annihilates") {
  const Poly1 p({3.0, -2.0, 5.0});
  CHECK((p * 0.0).is_zero());
}

TEST_CASE("coefficient addition of the example coefficients") {
  const Poly1 a({2.0, 0.0, -1.0, 1.0});  // x^3 - x^2 + 2
  const Poly1 b({0.0, -2.0, 3.0});       // 3x^2 - 2x
  const Poly1 s = a + b;
  CHECK(s.coeff(0) == doctest::Approx(2.0));
  CHECK(s.coeff(1) == doctest::Approx(-2.0));
  CHECK(s.coeff(2) == doctest::Approx(2.0));
  CHECK(s.coeff(3) == doctest::Approx(1.0));
}

TEST_CASE("derivatives") {
  CHECK(diff(Poly1({0.0, 0.0, 1.0})).coeff(1) == doctest::Approx(2.0));  // d/dx x^2 = 2x
  Poly2 p;  // x^2 xi
  p.set_coeff(2, 1, 1.0);
  const Poly2 d1 = diff(p, 1);
  CHECK(d1.coeff(1, 1) == doctest::Approx(2.0));
  const Poly2 d2 = diff(p, 2);
  CHECK(d2.coeff(2, 0) == doctest::Approx(1.0));
  // a_x(1) for a = x^3 - x^2 + 2
  CHECK(diff(Poly1({2.0, 0.0, -1.0, 1.0})).eval(1.0) == doctest::Approx(1.0));
}

TEST_CASE("symbolic definite integrals") {
  Poly2 p;  // x xi
  p.set_coeff(1, 1, 1.0);
  const Poly1 r = integrate(p, 2, IntBound::constant(0.0), IntBound::constant(1.0));
  CHECK(r.degree() == 1);
  CHECK(r.coeff(1) == doctest::Approx(0.5));  // x/2

  // int_xi^x 1 deta = x - xi
  const Poly2 q = integrate_univariate(Poly1::constant(1.0), IntBound2::var2(), IntBound2::var1());
  CHECK(q.coeff(1, 0) == doctest::Approx(1.0));
  CHECK(q.coeff(0, 1) == doctest::Approx(-1.0));

  // int_0^xi eta x deta = x xi^2 / 2
  const Poly2 inner = integrate_univariate(Poly1({0.0, 1.0}), IntBound2::constant(0.0),
                                           IntBound2::var2());
  const Poly2 full = mul_var1(Poly1({0.0, 1.0}), inner);
  CHECK(full.coeff(1, 2) == doctest::Approx(0.5));
  CHECK(full.deg1() == 1);
  CHECK(full.deg2() == 2);
}

TEST_CASE("evaluation") {
  const Poly1 a({2.0, 0.0, -1.0, 1.0});
  CHECK(a.eval(1.0) == doctest::Approx(2.0));
  Poly2 k;
  k.set_coeff(1, 1, 1.0);
  CHECK(k.eval(0.5, 0.5) == doctest::Approx(0.25));
  CHECK(Poly1().eval(0.3) == 0.0);
}

TEST_CASE("lower bound on [0,1]") {
  CHECK(lower_bound_on_interval(Poly1::constant(1.0)) == doctest::Approx(1.0).epsilon(1e-9));
  const double alpha = lower_bound_on_interval(Poly1({2.0, 0.0, -1.0, 1.0}));
  CHECK(alpha == doctest::Approx(50.0 / 27.0).epsilon(1e-9));
  CHECK(lower_bound_on_interval(Poly1({-0.5, 1.0})) <= 0.0);
}

TEST_CASE("differentiation inverts antidifferentiation") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Poly1 p = random_poly(rng, 8);
    const Poly1 back = diff(antiderivative(p));
    const Poly1 d = back - p;
    for (int i = 0; i <= d.degree(); ++i) CHECK(std::fabs(d.coeff(i)) < 1e-12);
  }
}

TEST_CASE("Wirtinger inequality for polynomials vanishing at 0") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Poly1 z = random_poly(rng, 7, /*zero_at_0=*/true);
    const Poly1 zx = diff(z);
    const double lhs = integrate_01([&](double x) { return z.eval(x) * z.eval(x); });
    const double rhs = integrate_01([&](double x) { return zx.eval(x) * zx.eval(x); });
    CHECK(lhs <= 4.0 / (M_PI * M_PI) * rhs + 1e-12);
  }
}

TEST_CASE("order-swap identity") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Poly2 K = random_poly2(rng, 3);
    const Poly2 P = random_poly2(rng, 3);
    const Poly1 w = random_poly(rng, 5);
    const double lhs =
        integrate_triangle([&](double x, double xi) { return w.eval(x) * K.eval(x, xi) * w.eval(xi); }) +
        integrate_triangle([&](double x, double xi) { return w.eval(xi) * P.eval(xi, x) * w.eval(x); });
    const double rhs =
        integrate_triangle([&](double x, double xi) {
          return w.eval(x) * 0.5 * (K.eval(x, xi) + P.eval(xi, x)) * w.eval(xi);
        }) +
        integrate_triangle([&](double x, double xi) {
          return w.eval(xi) * 0.5 * (P.eval(xi, x) + K.eval(x, xi)) * w.eval(x);
        });
    CHECK(std::fabs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("swap, diagonal restriction, boundary substitution") {
  std::mt19937 rng(23);
  const Poly2 K = random_poly2(rng, 4);
  const Poly2 Ks = K.swap_vars();
  CHECK(Ks.eval(0.3, 0.8) == doctest::Approx(K.eval(0.8, 0.3)));
  const Poly1 diag = diag_restrict(K);
  CHECK(diag.eval(0.4) == doctest::Approx(K.eval(0.4, 0.4)));
  const Poly1 bdry = eval_var1(K, 1.0);
  CHECK(bdry.eval(0.6) == doctest::Approx(K.eval(1.0, 0.6)));
  const Poly1 bdry2 = eval_var2(K, 0.0);
  CHECK(bdry2.eval(0.6) == doctest::Approx(K.eval(0.6, 0.0)));
}

TEST_CASE("model construction certifies the diffusion bound") {
  const PdeModel m2 = PdeModel::example2(1.0);
  CHECK(m2.alpha == doctest::Approx(50.0 / 27.0).epsilon(1e-9));
  CHECK_THROWS(PdeModel(Poly1({-0.5, 1.0}), Poly1(), Poly1(), 0.0));
}

TEST_CASE("monomial vectors") {
  const MonomialVector z1 = MonomialVector::univariate(3);
  CHECK(z1.size() == 4);
  CHECK(z1.exps[0][0] == 0);
  const MonomialVector z2 = MonomialVector::bivariate(2);
  CHECK(z2.size() == 6);
  CHECK(z2.exps[0][0] == 0);
  CHECK(z2.exps[0][1] == 0);  // constant first
  // increasing lexicographic order on (i, j)
  for (int k = 1; k < z2.size(); ++k)
    CHECK((z2.exps[k - 1][0] < z2.exps[k][0] ||
           (z2.exps[k - 1][0] == z2.exps[k][0] && z2.exps[k - 1][1] < z2.exps[k][1])));
}
