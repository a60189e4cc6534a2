#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "parasos/poly.hpp"
#include "parasos/quadrature.hpp"

using namespace parasos;

TEST_CASE("interval rule integrates x to 0.5") {
  CHECK(integrate_01([](double x) { return x; }) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("triangle rule integrates the unit triangle area") {
  CHECK(integrate_triangle([](double, double) { return 1.0; }) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("half-period mean of sin^2") {
  const double v = integrate_01([](double x) { return std::pow(std::sin(0.5 * M_PI * x), 2); });
  CHECK(v == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("quadrature matches exact coefficient integration on random polynomials") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    Poly1 p;
    for (int k = 0; k <= 15; ++k) p.add_to_coeff(k, unif(rng));
    const double exact = integral_01(p);
    const double quad = integrate_01([&](double x) { return p.eval(x); });
    CHECK(std::fabs(quad - exact) < 1e-10 * (1.0 + std::fabs(exact)));
  }
}

TEST_CASE("triangle rule matches exact bivariate integration") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Poly2 p;
    for (int i = 0; i <= 5; ++i)
      for (int j = 0; j <= 5; ++j) p.set_coeff(i, j, unif(rng));
    const double exact = integral_triangle(p);
    const double quad = integrate_triangle([&](double x, double xi) { return p.eval(x, xi); });
    CHECK(std::fabs(quad - exact) < 1e-10 * (1.0 + std::fabs(exact)));
  }
}

TEST_CASE("panel count grows with degree") {
  CHECK(panels_for_degree(10) == 10);
  CHECK(panels_for_degree(200) >= 25);
}
