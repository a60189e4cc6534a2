#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "parasos/opinverse.hpp"
#include "parasos/quadrature.hpp"

using namespace parasos;

namespace {
// Deterministic member of Xi_{1,1,1}: eps shift on the constant monomial plus
// a random PSD part.
XiCertificate synthetic_certificate(unsigned seed = 7, double eps = 1.0) {
  const int d1 = 1, d2 = 1;
  const int n = xi_gram_size(d1, d2);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = unif(rng);
  Eigen::MatrixXd P = A * A.transpose() / n;
  P(0, 0) += eps;
  return XiCertificate::from_gram(P, d1, d2, eps);
}
Poly1 random_poly(std::mt19937& rng, int deg) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Poly1 p;
  for (int k = 0; k <= deg; ++k) p.add_to_coeff(k, unif(rng));
  return p;
}
}  // namespace

TEST_CASE("semiseparable factorization") {
  SUBCASE("rank one") {
    Poly2 K;
    K.set_coeff(1, 1, 1.0);  // x xi
    const SemisepFactorization f = factor_semiseparable(K);
    REQUIRE(f.rank() == 1);
    CHECK(f.F[0].coeff(1) == doctest::Approx(1.0));
    CHECK(f.G[0].coeff(1) == doctest::Approx(1.0));
  }
  SUBCASE("affine kernel") {
    Poly2 K;  // 1 + xi - x
    K.set_coeff(0, 0, 1.0);
    K.set_coeff(0, 1, 1.0);
    K.set_coeff(1, 0, -1.0);
    const SemisepFactorization f = factor_semiseparable(K);
    REQUIRE(f.rank() == 2);
    CHECK(f.G[0].coeff(0) == doctest::Approx(1.0));
    CHECK(f.G[0].coeff(1) == doctest::Approx(1.0));
    CHECK(f.G[1].coeff(0) == doctest::Approx(-1.0));
  }
  SUBCASE("zero kernel") { CHECK(factor_semiseparable(Poly2()).rank() == 0); }
  SUBCASE("reconstruction") {
    std::mt19937 rng(3);
    Poly2 K;
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int i = 0; i <= 3; ++i)
      for (int j = 0; j <= 3; ++j) K.set_coeff(i, j, unif(rng));
    const SemisepFactorization f = factor_semiseparable(K);
    for (double x : {0.1, 0.5, 0.9})
      for (double xi : {0.2, 0.7}) {
        double sum = 0.0;
        for (int k = 0; k < f.rank(); ++k) sum += f.F[k].eval(x) * f.G[k].eval(xi);
        CHECK(sum == doctest::Approx(K.eval(x, xi)).epsilon(1e-12));
      }
  }
}

TEST_CASE("Chebyshev reciprocal") {
  SUBCASE("constant one") {
    const ChebInverse c = cheb_inverse(Poly1::constant(1.0), 4);
    CHECK(c.q.eval(0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.sup_error < 1e-12);
  }
  SUBCASE("constant two at degree zero") {
    const ChebInverse c = cheb_inverse(Poly1::constant(2.0), 0);
    CHECK(c.q.coeff(0) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("affine multiplier at degree six") {
    const ChebInverse c = cheb_inverse(Poly1({1.0, 0.5}), 6);
    CHECK(c.sup_error < 1e-6);
  }
  SUBCASE("vanishing multiplier rejected") {
    CHECK_THROWS(cheb_inverse(Poly1({-0.5, 1.0}), 4));
  }
}

TEST_CASE("Picard iterates for the rank-one kernel") {
  Poly2 K;
  K.set_coeff(1, 1, 1.0);  // x xi
  const SemisepFactorization f = factor_semiseparable(K);
  const PicardResult pr = picard_U(f, Poly1::constant(1.0), 2);
  // U2 = I - int_0^x [xi;xi][xi,-xi] dxi = [[1 - x^3/3, x^3/3], [-x^3/3, 1 + x^3/3]]
  REQUIRE(pr.U.size() == 2);
  CHECK(pr.U[0][0].coeff(0) == doctest::Approx(1.0));
  CHECK(pr.U[0][0].coeff(3) == doctest::Approx(-1.0 / 3.0));
  CHECK(pr.U[0][1].coeff(3) == doctest::Approx(1.0 / 3.0));
  CHECK(pr.U[1][0].coeff(3) == doctest::Approx(-1.0 / 3.0));
  CHECK(pr.U[1][1].coeff(3) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("empty factorization keeps U = I") {
  const PicardResult pr = picard_U(SemisepFactorization{}, Poly1::constant(1.0), 5);
  CHECK(pr.U.empty());
  CHECK(pr.n_effective == 1);
}

TEST_CASE("identity and scalar multipliers invert exactly") {
  KernelTriple ident;
  ident.M = Poly1::constant(1.0);
  const InverseTriple inv1 = invert_operator(ident, 4, 4);
  CHECK(inv1.Minv.eval(0.3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(inv1.K1inv.is_zero());
  CHECK(inv1.residual_bound < 1e-12);

  KernelTriple two;
  two.M = Poly1::constant(2.0);
  const InverseTriple inv2 = invert_operator(two, 4, 4);
  CHECK(inv2.Minv.eval(0.8) == doctest::Approx(0.5).epsilon(1e-12));
  Poly1 w({1.0, -0.3, 0.2});
  CHECK(inversion_residual(two, inv2, w) < 1e-12);
}

TEST_CASE("synthesized certificate inverts to 1e-4 at n = 5") {
  const XiCertificate cert = synthetic_certificate();
  const Poly1 w = Poly1({0.0, 1.0}) * Poly1({-0.4, 1.0}) * Poly1({-1.0, 1.0});
  const InverseTriple inv5 = invert_operator(cert.triple, 5, 5);
  CHECK(inversion_residual(cert.triple, inv5, w) <= 1e-4);

  SUBCASE("residuals are non-increasing in n") {
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 2; n <= 6; ++n) {
      const double r =
          inversion_residual(cert.triple, invert_operator(cert.triple, n, 5), w);
      CHECK(r <= prev * (1.0 + 1e-9) + 1e-14);
      prev = r;
    }
  }
  SUBCASE("Picard changes contract for n >= 3") {
    const SemisepFactorization f = factor_semiseparable(cert.triple.K1);
    const ChebInverse ci = cheb_inverse(cert.triple.M, 5);
    const PicardResult pr = picard_U(f, ci.q, 6);
    for (size_t k = 1; k < pr.change_norms.size(); ++k)
      CHECK(pr.change_norms[k] <= pr.change_norms[k - 1] * (1.0 + 1e-9));
  }
}

TEST_CASE("composition both ways on random polynomials") {
  const XiCertificate cert = synthetic_certificate(11);
  const InverseTriple inv = invert_operator(cert.triple, 6, 6);
  const double tol = std::max(1e-4, 10.0 * inv.residual_bound);
  std::mt19937 rng(13);
  for (int s = 0; s < 20; ++s) {
    const Poly1 w = random_poly(rng, 5);
    const Poly1 fwd = apply_operator(cert.triple, apply_operator(inv.as_triple(), w));
    CHECK(l2_norm(w - fwd) <= tol);
    const Poly1 bwd = apply_operator(inv.as_triple(), apply_operator(cert.triple, w));
    CHECK(l2_norm(w - bwd) <= tol);
  }
}

TEST_CASE("coercivity transfer to the inverse") {
  const XiCertificate cert = synthetic_certificate(19);
  const InverseTriple inv = invert_operator(cert.triple, 6, 6);
  std::mt19937 rng(17);
  for (int s = 0; s < 10; ++s) {
    const Poly1 w = random_poly(rng, 5);
    const double nw = l2_inner(w, w);
    const double form = operator_form(inv.as_triple(), w, w);
    CHECK(form >= nw / cert.theta - 1e-6 * (1.0 + nw));
    CHECK(form <= nw / cert.eps + 1e-6 * (1.0 + nw));
  }
}

TEST_CASE("the inverse is self-adjoint") {
  const XiCertificate cert = synthetic_certificate(23);
  const InverseTriple inv = invert_operator(cert.triple, 6, 6);
  // K1inv(x,xi) = K2inv(xi,x) on a sample grid
  for (double x : {0.15, 0.5, 0.85})
    for (double xi : {0.1, 0.45, 0.95})
      CHECK(std::fabs(inv.K1inv.eval(x, xi) - inv.K2inv.eval(xi, x)) < 1e-8);
  std::mt19937 rng(29);
  for (int s = 0; s < 5; ++s) {
    const Poly1 v = random_poly(rng, 4), w = random_poly(rng, 4);
    CHECK(operator_form(inv.as_triple(), v, w) ==
          doctest::Approx(operator_form(inv.as_triple(), w, v)).epsilon(1e-8));
  }
}
