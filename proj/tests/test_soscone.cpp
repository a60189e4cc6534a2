#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "parasos/quadrature.hpp"
#include "parasos/soscone.hpp"

using namespace parasos;

namespace {
Eigen::MatrixXd random_psd(std::mt19937& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = unif(rng);
  return scale * (A * A.transpose()) / n;
}
Poly1 random_poly(std::mt19937& rng, int deg) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Poly1 p;
  for (int k = 0; k <= deg; ++k) p.add_to_coeff(k, unif(rng));
  return p;
}
}  // namespace

TEST_CASE("multiplier-only Gram matrix") {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, 3);
  P(0, 0) = 1.0;
  const KernelTriple t = gram_to_triple(P, 0, 0);
  CHECK(t.M.degree() == 0);
  CHECK(t.M.coeff(0) == doctest::Approx(1.0));
  CHECK(t.K1.is_zero());
  CHECK(t.K2.is_zero());
}

TEST_CASE("identity Gram matrix gives the affine kernels") {
  const KernelTriple t = gram_to_triple(Eigen::MatrixXd::Identity(3, 3), 0, 0);
  CHECK(t.M.coeff(0) == doctest::Approx(1.0));
  // K1 = 1 + xi - x, K2 = 1 + x - xi
  CHECK(t.K1.coeff(0, 0) == doctest::Approx(1.0));
  CHECK(t.K1.coeff(1, 0) == doctest::Approx(-1.0));
  CHECK(t.K1.coeff(0, 1) == doctest::Approx(1.0));
  CHECK(t.K2.coeff(1, 0) == doctest::Approx(1.0));
  CHECK(t.K2.coeff(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("kernels agree on the diagonal") {
  std::mt19937 rng(5);
  const int d1 = 2, d2 = 2;
  const Eigen::MatrixXd P = random_psd(rng, xi_gram_size(d1, d2));
  const KernelTriple t = gram_to_triple(P, d1, d2);
  const Poly1 diff_diag = diag_restrict(t.K1) - diag_restrict(t.K2);
  for (int i = 0; i <= diff_diag.degree(); ++i) CHECK(std::fabs(diff_diag.coeff(i)) < 1e-12);
}

TEST_CASE("quadratic-form equality: operator form vs Gram form") {
  std::mt19937 rng(9);
  for (const auto [d1, d2] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 2}}) {
    const Eigen::MatrixXd P = random_psd(rng, xi_gram_size(d1, d2));
    const KernelTriple t = gram_to_triple(P, d1, d2);
    for (int s = 0; s < 20; ++s) {
      const Poly1 w = random_poly(rng, 6);
      const double form_op = operator_form(t, w, w);
      const double form_gram = gram_quadratic_form(P, d1, d2, w);
      CHECK(std::fabs(form_op - form_gram) < 1e-8 * (1.0 + std::fabs(form_gram)));
      // independent quadrature route
      const int panels = panels_for_degree(14 + t.K1.deg1() + t.K1.deg2());
      const double form_quad =
          integrate_01([&](double x) { return t.M.eval(x) * w.eval(x) * w.eval(x); }, panels) +
          integrate_triangle(
              [&](double x, double xi) { return w.eval(x) * t.K1.eval(x, xi) * w.eval(xi); },
              panels) +
          integrate_triangle(
              [&](double x, double xi) { return w.eval(xi) * t.K2.eval(xi, x) * w.eval(x); },
              panels);
      CHECK(std::fabs(form_op - form_quad) < 1e-8 * (1.0 + std::fabs(form_quad)));
    }
  }
}

TEST_CASE("the operator is self-adjoint") {
  std::mt19937 rng(13);
  const Eigen::MatrixXd P = random_psd(rng, xi_gram_size(2, 2));
  const KernelTriple t = gram_to_triple(P, 2, 2);
  for (int s = 0; s < 10; ++s) {
    const Poly1 v = random_poly(rng, 5), w = random_poly(rng, 5);
    CHECK(operator_form(t, v, w) == doctest::Approx(operator_form(t, w, v)).epsilon(1e-10));
  }
}

TEST_CASE("cone closure under addition") {
  std::mt19937 rng(21);
  const int d1 = 1, d2 = 1;
  const Eigen::MatrixXd Pa = random_psd(rng, xi_gram_size(d1, d2));
  const Eigen::MatrixXd Pb = random_psd(rng, xi_gram_size(d1, d2));
  const KernelTriple ta = gram_to_triple(Pa, d1, d2);
  const KernelTriple tb = gram_to_triple(Pb, d1, d2);
  const KernelTriple tsum = gram_to_triple(Pa + Pb, d1, d2);
  const Poly1 dM = tsum.M - (ta.M + tb.M);
  for (int i = 0; i <= dM.degree(); ++i) CHECK(std::fabs(dM.coeff(i)) < 1e-12);
  const Poly2 dK = tsum.K1 - (ta.K1 + tb.K1);
  for (int i = 0; i <= dK.deg1(); ++i)
    for (int j = 0; j <= dK.deg2(); ++j) CHECK(std::fabs(dK.coeff(i, j)) < 1e-12);
}

TEST_CASE("round trip: certificates from random PSD Gram matrices verify") {
  std::mt19937 rng(31);
  const XiCertificate cert =
      XiCertificate::from_gram(random_psd(rng, xi_gram_size(2, 2)), 2, 2, 0.0);
  const VerifyReport rep = verify_certificate(cert);
  CHECK(rep.pass);
}

TEST_CASE("verification catches an indefinite Gram matrix") {
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(3, 3);
  P(2, 2) = -1.0;
  const XiCertificate cert = XiCertificate::from_gram(P, 0, 0, 0.0);
  const VerifyReport rep = verify_certificate(cert);
  CHECK(!rep.pass);
  CHECK(rep.min_shifted_eig == doctest::Approx(-1.0));
}

TEST_CASE("eps shift boundary case passes at exactly zero") {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, 3);
  P(0, 0) = 1.0;
  const XiCertificate cert = XiCertificate::from_gram(P, 0, 0, /*eps=*/1.0);
  const VerifyReport rep = verify_certificate(cert);
  CHECK(rep.min_shifted_eig == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rep.pass);  // M - eps == 0: the shifted matrix has a zero eigenvalue
}

TEST_CASE("coercivity bounds with the estimated theta") {
  std::mt19937 rng(41);
  const int d1 = 1, d2 = 1;
  Eigen::MatrixXd P = random_psd(rng, xi_gram_size(d1, d2));
  P(0, 0) += 0.5;
  const XiCertificate cert = XiCertificate::from_gram(P, d1, d2, 0.5);
  CHECK(verify_certificate(cert).pass);
  for (int s = 0; s < 10; ++s) {
    const Poly1 w = random_poly(rng, 5);
    const double form = operator_form(cert.triple, w, w);
    const double nw = l2_inner(w, w);
    CHECK(form >= cert.eps * nw - 1e-9);
    CHECK(form <= cert.theta * nw + 1e-9);
  }
}
