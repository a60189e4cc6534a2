#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "parasos/simlab.hpp"

using namespace parasos;

TEST_CASE("uniform interior rows are the classic tridiagonal stencil") {
  const PdeModel model = PdeModel(Poly1::constant(1.0), Poly1(), Poly1(), 0.0);
  const int m = 16;
  const Discretization d = discretize(model, m);
  const double h = 1.0 / (m + 1);
  for (int i = 1; i < m - 1; ++i) {
    CHECK(d.A(i, i) == doctest::Approx(-2.0 / (h * h)));
    CHECK(d.A(i, i - 1) == doctest::Approx(1.0 / (h * h)));
    CHECK(d.A(i, i + 1) == doctest::Approx(1.0 / (h * h)));
  }
}

TEST_CASE("least-stable eigenvalue approximates -pi^2/4") {
  const Discretization d = discretize(PdeModel::example1(0.0), 200);
  const double ev = least_stable_eigenvalue(d);
  CHECK(std::fabs(ev + kPi * kPi / 4.0) < 0.01 * kPi * kPi / 4.0);
}

TEST_CASE("autonomous first-mode decay rates") {
  for (const double lambda : {0.0, 2.0}) {
    const Discretization d = discretize(PdeModel::example1(lambda), 128);
    const Eigen::VectorXd w0 =
        sample_profile(d, [](double x) { return std::sin(0.5 * kPi * x); });
    const Trajectory tr = simulate(d, w0, 5.0, 1e-3);
    const double rate = estimate_decay_rate(tr);
    CHECK(rate == doctest::Approx(kPi * kPi / 4.0 - lambda).epsilon(0.02));
  }
}

TEST_CASE("heat-equation energy never increases") {
  const Discretization d = discretize(PdeModel::example1(0.0), 64);
  const Eigen::VectorXd w0 = sample_profile(d, [](double x) { return x * (2.0 - x); });
  const Trajectory tr = simulate(d, w0, 1.0, 1e-3);
  for (size_t k = 1; k < tr.norms.size(); ++k) CHECK(tr.norms[k] <= tr.norms[k - 1] + 1e-12);
}

TEST_CASE("grid convergence of the rate estimate") {
  for (const double lambda : {0.0, 2.0}) {
    const auto rate_at = [&](int m) {
      const Discretization d = discretize(PdeModel::example1(lambda), m);
      const Eigen::VectorXd w0 =
          sample_profile(d, [](double x) { return std::sin(0.5 * kPi * x); });
      return estimate_decay_rate(simulate(d, w0, 5.0, 1e-3));
    };
    const double r64 = rate_at(64), r128 = rate_at(128);
    CHECK(std::fabs(r128 - r64) < 0.02 * std::fabs(r64));
  }
}

TEST_CASE("zero initial profile stays identically zero") {
  const Discretization d = discretize(PdeModel::example1(1.0), 32);
  const Trajectory tr = simulate(d, Eigen::VectorXd::Zero(32), 1.0, 1e-2);
  for (double n : tr.norms) CHECK(n == 0.0);
}

TEST_CASE("synthetic exponential gives rate 2") {
  Trajectory tr;
  tr.nodes = {0.5};
  for (int k = 0; k <= 1000; ++k) {
    tr.times.push_back(k * 1e-3);
    tr.norms.push_back(std::exp(-2.0 * k * 1e-3));
    tr.states.emplace_back(Eigen::VectorXd::Zero(1));
    tr.boundary_values.push_back(0.0);
    tr.inputs.push_back(0.0);
  }
  CHECK(estimate_decay_rate(tr) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("empirical stability margin of the isotropic plant") {
  const auto res = empirical_stability_margin(PdeModel::example1(0.0), 1.0, 4.0, 0.005);
  CHECK(res.margin == doctest::Approx(kPi * kPi / 4.0).epsilon(0.01));
}

TEST_CASE("margin shifts with a constant reaction offset") {
  const PdeModel shifted = PdeModel(Poly1::constant(1.0), Poly1(), Poly1::constant(-1.0), 0.0);
  const auto base = empirical_stability_margin(PdeModel::example1(0.0), 1.0, 4.0, 0.01);
  const auto moved = empirical_stability_margin(shifted, 2.0, 5.0, 0.01);
  CHECK(moved.margin == doctest::Approx(base.margin + 1.0).epsilon(0.01));
}

TEST_CASE("controlled simulation with a stabilizing boundary feedback") {
  // u(t) = -2 w(1,t) stabilizes lambda slightly above the autonomous margin
  const PdeModel model = PdeModel::example1(3.0);
  const Discretization d = discretize(model, 96, GridKind::kUniform, BcMode::kControlled);
  const StateFeedback fb = sample_state_feedback(d, -2.0, Poly1());
  const Eigen::VectorXd w0 = sample_profile(d, [](double x) { return std::sin(0.5 * kPi * x); });
  const Trajectory tr = simulate(d, fb, w0, 5.0, 1e-3);
  CHECK(estimate_decay_rate(tr) > 0.0);
  CHECK(tr.norms.back() < tr.norms.front());
}

TEST_CASE("observer error dynamics ignore the controller gains") {
  const PdeModel model = PdeModel::example1(1.0);
  const Discretization d = discretize(model, 48, GridKind::kUniform, BcMode::kControlled);
  const Eigen::VectorXd w0 = sample_profile(d, [](double x) { return std::sin(0.5 * kPi * x); });
  const Poly1 L1 = Poly1({0.2, -0.4});
  const OutputFeedback a = sample_output_feedback(d, -1.0, Poly1({0.1, 0.2}), L1, -1.0);
  OutputFeedback b = sample_output_feedback(d, -1.7, Poly1({-0.3, 0.5, 0.1}), L1, -1.0);
  const Trajectory ta = simulate(d, a, w0, 2.0, 1e-3);
  const Trajectory tb = simulate(d, b, w0, 2.0, 1e-3);
  REQUIRE(ta.observer_error_norms.size() == tb.observer_error_norms.size());
  for (size_t k = 0; k < ta.observer_error_norms.size(); ++k)
    CHECK(std::fabs(ta.observer_error_norms[k] - tb.observer_error_norms[k]) < 1e-8);
}

TEST_CASE("log grid nodes are ascending and interior") {
  const Discretization d = discretize(PdeModel::example1(0.0), 14, GridKind::kLog);
  for (int i = 1; i < d.m; ++i) CHECK(d.nodes[i] > d.nodes[i - 1]);
  CHECK(d.nodes.front() > 0.0);
  CHECK(d.nodes.back() < 1.0);
}

TEST_CASE("trajectory CSV export") {
  const Discretization d = discretize(PdeModel::example1(0.0), 16);
  const Eigen::VectorXd w0 = sample_profile(d, [](double x) { return x; });
  const Trajectory tr = simulate(d, w0, 0.1, 1e-2);
  trajectory_to_csv(tr, "traj_test.csv", 2);
  std::ifstream is("traj_test.csv");
  REQUIRE(is.good());
  std::string header;
  std::getline(is, header);
  CHECK(header.rfind("t,0,", 0) == 0);
  std::remove("traj_test.csv");
}
