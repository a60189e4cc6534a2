#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "parasos/baselines.hpp"

using namespace parasos;

TEST_CASE("Sturm-Liouville bound for the isotropic plant") {
  const auto sl = sturm_liouville_bound(PdeModel::example1(5.0));
  CHECK(sl.p0 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sl.sigma1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sl.mu1cc == doctest::Approx(5.0 - kPi * kPi).epsilon(1e-9));
  CHECK(sl.lambda_threshold == doctest::Approx(kPi * kPi).epsilon(1e-8));
}

TEST_CASE("Sturm-Liouville bound for the anisotropic example") {
  const auto sl = sturm_liouville_bound(PdeModel::example2(4.0));
  // p = a, q = c, sigma = 1: threshold (50/27) pi^2 - 0.7 ~ 17.58
  CHECK(sl.mu1cc == doctest::Approx(4.0 - 17.58).epsilon(0.003));
  CHECK(std::fabs(sl.lambda_threshold - 17.58) < 0.05);
}

TEST_CASE("trivial coefficients reduce to the pi^2 threshold") {
  const PdeModel plain(Poly1::constant(1.0), Poly1(), Poly1(), 0.0);
  const auto sl = sturm_liouville_bound(plain);
  CHECK(sl.lambda_threshold == doctest::Approx(kPi * kPi).epsilon(1e-8));
}

TEST_CASE("backstepping kernel limits") {
  for (double x : {0.2, 0.6, 1.0}) CHECK(backstepping_kernels(10.0, x, 0.0).E == 0.0);
  // z -> 0 on the diagonal: E -> -lambda xi / 2
  const auto k = backstepping_kernels(10.0, 0.5, 0.5);
  CHECK(k.E == doctest::Approx(-10.0 * 0.5 * 0.5));
  CHECK_THROWS(backstepping_kernels(10.0, 0.3, 0.5));
}

TEST_CASE("series agrees with a long reference expansion") {
  // 60-term reference for I1(z)/z and J1(z)/z on z in [0, 8]
  const auto reference = [](double s, bool modified) {
    long double term = 0.5L, sum = 0.5L;
    for (int k = 1; k < 60; ++k) {
      term *= s / (4.0L * k * (k + 1));
      sum += modified ? term : (k % 2 ? -term : term);
    }
    return static_cast<double>(sum);
  };
  const double xi = 0.3;
  for (double z = 0.0; z <= 8.0; z += 0.5) {
    const double s = z * z;  // z^2 = lambda (x^2 - xi^2)
    const double lam = (s + 1.0) / (1.0 - xi * xi);
    const double x = std::sqrt(s / lam + xi * xi);
    REQUIRE(x <= 1.0);
    const auto k = backstepping_kernels(lam, x, xi);
    CHECK(k.E == doctest::Approx(-lam * xi * reference(s, true)).epsilon(1e-12));
    CHECK(k.F == doctest::Approx(-lam * xi * reference(s, false)).epsilon(1e-12));
  }
}

TEST_CASE("E/F inverse pair residual") {
  for (double lambda : {1.0, 5.0, 10.0})
    CHECK(backstepping_inverse_pair_residual(lambda) < 1e-6);
}

TEST_CASE("backstepping controller vanishes with lambda") {
  const auto bc = backstepping_controller(1e-8);
  CHECK(std::fabs(bc.R1) < 1e-7);
  CHECK(std::fabs(bc.R2(0.5)) < 1e-7);
}

TEST_CASE("backstepping controller stabilizes the unstable plant") {
  for (double lambda : {5.0, 15.0}) {
    const PdeModel model = PdeModel::example1(lambda);
    const Discretization d = discretize(model, 96, GridKind::kUniform, BcMode::kControlled);
    const auto bc = backstepping_controller(lambda);
    const StateFeedback fb = sample_state_feedback(d, bc.R1, bc.R2);
    const Eigen::VectorXd w0 =
        sample_profile(d, [](double x) { return std::sin(0.5 * kPi * x); });
    const Trajectory tr = simulate(d, fb, w0, 4.0, 1e-3);
    CHECK(estimate_decay_rate(tr) > 0.1);
  }
}

TEST_CASE("controllability condition numbers match the reported orders") {
  const auto r5 = controllability_condition(5);
  CHECK(r5.condition >= 1e6);
  CHECK(r5.condition <= 1e8);
  const auto r10 = controllability_condition(10);
  CHECK(r10.condition >= 1e23);
  CHECK(r10.condition <= 1e27);
  const auto r2 = controllability_condition(2);
  CHECK(r2.condition < 1e3);
  CHECK(r2.numerical_rank == 2);
}

TEST_CASE("log-grid rank deficiency appears past m = 13") {
  const auto r13 = controllability_condition(13, GridKind::kLog);
  CHECK(r13.numerical_rank == 13);
  const auto r14 = controllability_condition(14, GridKind::kLog);
  CHECK(r14.numerical_rank < 14);
  const auto r16 = controllability_condition(16, GridKind::kLog);
  CHECK(r16.numerical_rank < 16);
}
