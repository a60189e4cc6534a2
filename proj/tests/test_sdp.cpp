#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "parasos/sdp.hpp"
#include "parasos/soscone.hpp"

using namespace parasos;

TEST_CASE("1x1 PSD variable pinned to 1") {
  SdpProblem p;
  const int h = p.add_matrix_var("x", 1);
  p.add_equality(p.entry(h, 0, 0), 1.0);
  const SdpSolution sol = solve(p);
  REQUIRE(sol.feasible());
  CHECK(sol.eval(p.entry(h, 0, 0)) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.max_eq_residual <= 1e-7);
  CHECK(sol.min_psd_eig >= -1e-9);
}

TEST_CASE("1x1 PSD variable pinned to -1 is infeasible") {
  SdpProblem p;
  const int h = p.add_matrix_var("x", 1);
  p.add_equality(p.entry(h, 0, 0), -1.0);
  const SdpSolution sol = solve(p);
  CHECK(!sol.feasible());
  CHECK(sol.status == SdpSolution::Status::kInfeasible);
}

TEST_CASE("2x2 PSD with an off-diagonal demand") {
  SdpProblem p;
  const int h = p.add_matrix_var("X", 2);
  p.add_equality(p.entry(h, 0, 0) + p.entry(h, 1, 1), 1.0);
  p.add_equality(p.entry(h, 0, 1), 0.4);
  const SdpSolution sol = solve(p);
  REQUIRE(sol.feasible());
  const Eigen::MatrixXd X = sol.matrix_value(p, h);
  CHECK(X(0, 0) + X(1, 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(X(0, 1) == doctest::Approx(0.4).epsilon(1e-6));
  // trace 1 with off-diagonal 0.6 would be infeasible
  SdpProblem q;
  const int h2 = q.add_matrix_var("X", 2);
  q.add_equality(q.entry(h2, 0, 0) + q.entry(h2, 1, 1), 1.0);
  q.add_equality(q.entry(h2, 0, 1), 0.6);
  CHECK(!solve(q).feasible());
}

TEST_CASE("free scalar with equality") {
  SdpProblem p;
  const int v = p.add_scalar_var("s");
  p.add_matrix_var("pad", 1);  // keep a cone block present
  p.add_equality(p.scalar(v) * 2.0, 6.0);
  const SdpSolution sol = solve(p);
  REQUIRE(sol.feasible());
  CHECK(sol.eval(p.scalar(v)) == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("inequalities are slack-converted") {
  SdpProblem p;
  const int h = p.add_matrix_var("x", 1);
  p.add_equality(p.entry(h, 0, 0), 2.0);
  p.add_inequality(p.entry(h, 0, 0) - 3.0);  // 2 <= 3 ok
  CHECK(solve(p).feasible());
  SdpProblem q;
  const int h2 = q.add_matrix_var("x", 1);
  q.add_equality(q.entry(h2, 0, 0), 2.0);
  q.add_inequality(q.entry(h2, 0, 0) - 1.0);  // 2 <= 1 violated
  CHECK(!solve(q).feasible());
}

TEST_CASE("eps-shifted variable keeps P - shift PSD") {
  SdpProblem p;
  const int h = p.add_matrix_var("P", 2, /*eps_shift=*/0.5);
  p.add_equality(p.entry(h, 0, 0), 0.5);  // P(0,0) = 0.5 => shifted entry 0
  const SdpSolution sol = solve(p);
  REQUIRE(sol.feasible());
  CHECK(sol.matrix_value(p, h)(0, 0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.min_psd_eig >= -1e-9);
  SdpProblem q;
  const int h2 = q.add_matrix_var("P", 2, 0.5);
  q.add_equality(q.entry(h2, 0, 0), 0.2);  // would need shifted entry -0.3
  CHECK(!solve(q).feasible());
}

TEST_CASE("Xi membership round trip through the solver") {
  const int d1 = 0, d2 = 0;
  const Eigen::MatrixXd P0 = Eigen::MatrixXd::Identity(3, 3);
  const KernelTriple target = gram_to_triple(P0, d1, d2);

  SdpProblem prob;
  AKernelTriple affine_target;
  affine_target.M = lift<LinExpr>(target.M);
  for (int i = 0; i <= target.K1.deg1(); ++i)
    for (int j = 0; j <= target.K1.deg2(); ++j)
      affine_target.K1.set_coeff(i, j, LinExpr(target.K1.coeff(i, j)));
  affine_target.K2 = affine_target.K1.swap_vars();
  const XiVariable xv = constrain_in_xi(prob, "P", affine_target, d1, d2, 0.0);
  const SdpSolution sol = solve(prob);
  REQUIRE(sol.feasible());
  const KernelTriple got = gram_to_triple(sol.matrix_value(prob, xv.gram_handle), d1, d2);
  const Poly1 dM = got.M - target.M;
  for (int i = 0; i <= dM.degree(); ++i) CHECK(std::fabs(dM.coeff(i)) < 1e-6);
  const Poly2 dK = got.K1 - target.K1;
  for (int i = 0; i <= dK.deg1(); ++i)
    for (int j = 0; j <= dK.deg2(); ++j) CHECK(std::fabs(dK.coeff(i, j)) < 1e-6);
}

TEST_CASE("degree gate names the minimal degrees") {
  SdpProblem prob;
  AKernelTriple target;
  target.M = lift<LinExpr>(Poly1({0.0, 0.0, 0.0, 1.0}));  // x^3 needs 2 d1 >= 3
  CHECK_THROWS_WITH_AS(constrain_in_xi(prob, "P", target, 1, 0, 0.0),
                       doctest::Contains("need at least (2,"), std::invalid_argument);
}

TEST_CASE("bisection on a synthetic feasibility step") {
  const double margin = 2.467;
  const auto builder = [&](double lambda) {
    SdpProblem p;
    const int h = p.add_matrix_var("x", 1);
    p.add_equality(p.entry(h, 0, 0), margin - lambda);
    return p;
  };
  const double star = max_feasible_scalar(builder, 0.0, 50.0, 0.01);
  CHECK(star == doctest::Approx(margin).epsilon(0.01));
  CHECK_THROWS(max_feasible_scalar(builder, 10.0, 50.0, 0.01));  // lower bracket infeasible
}

TEST_CASE("maximize a scalar variable under an inequality") {
  SdpProblem p;
  const int v = p.add_scalar_var("t");
  p.add_matrix_var("pad", 1);
  p.add_inequality(p.scalar(v) - 5.0);  // t <= 5
  const double best = maximize_scalar(p, v, 0.0, 100.0, 0.01);
  CHECK(best == doctest::Approx(5.0).epsilon(0.01));
}

TEST_CASE("determinism: identical problems give identical outputs") {
  const auto build = [] {
    SdpProblem p;
    const int h = p.add_matrix_var("X", 3);
    p.add_equality(p.entry(h, 0, 0) + p.entry(h, 1, 1) + p.entry(h, 2, 2), 2.0);
    p.add_equality(p.entry(h, 0, 1) - p.entry(h, 1, 2), 0.3);
    return p;
  };
  const SdpSolution a = solve(build());
  const SdpSolution b = solve(build());
  REQUIRE(a.status == b.status);
  REQUIRE(a.assignments.size() == b.assignments.size());
  for (size_t i = 0; i < a.assignments.size(); ++i) CHECK(a.assignments[i] == b.assignments[i]);
}

TEST_CASE("oversized Gram blocks are rejected with sizing advice") {
  SdpProblem p;
  p.add_matrix_var("huge", 2100);
  CHECK_THROWS_WITH_AS(solve(p), doctest::Contains("reduce the polynomial degrees"),
                       std::invalid_argument);
}

TEST_CASE("SDPA export smoke") {
  SdpProblem p;
  const int h = p.add_matrix_var("X", 2);
  p.add_equality(p.entry(h, 0, 0) + p.entry(h, 1, 1), 1.0);
  p.add_inequality(p.entry(h, 0, 1) - 0.2);
  const std::string path = "test_dump.dat-s";
  write_sdpa(p, path);
  std::ifstream is(path);
  REQUIRE(is.good());
  int mdim = 0;
  is >> mdim;
  CHECK(mdim == 2);
  std::remove(path.c_str());
}
