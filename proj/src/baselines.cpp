#include "parasos/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "parasos/quadrature.hpp"

namespace parasos {

namespace {

constexpr int kBesselTerms = 30;

// g(s) = I1(sqrt(s)) / sqrt(s) = (1/2) sum_k (s/4)^k / (k! (k+1)!),
// and the J1 analogue with alternating signs. Both are entire in s, so the
// removable singularity at s = 0 needs no special casing.
double bessel_ratio(double s, bool modified) {
  double term = 0.5;  // k = 0
  double sum = term;
  for (int k = 1; k < kBesselTerms; ++k) {
    term *= s / (4.0 * k * (k + 1));
    sum += modified ? term : (k % 2 ? -term : term);
  }
  return sum;
}

// d/ds of the ratio series.
double bessel_ratio_ds(double s, bool modified) {
  double sum = 0.0;
  double term = 0.5;
  for (int k = 1; k < kBesselTerms; ++k) {
    term *= 1.0 / (4.0 * k * (k + 1));
    const double sk = term * k * std::pow(s, k - 1);
    sum += modified ? sk : (k % 2 ? -sk : sk);
  }
  return sum;
}

}  // namespace

SturmLiouvilleBound sturm_liouville_bound(const PdeModel& model) {
  // p(x) = a(0) exp(int_0^x b/a) on a fine grid (trapezoid accumulation).
  const int n = 10000;
  std::vector<double> p(n + 1);
  double acc = 0.0;
  double prev = model.b.eval(0.0) / model.a.eval(0.0);
  p[0] = model.a.eval(0.0);
  for (int i = 1; i <= n; ++i) {
    const double x = double(i) / n;
    const double cur = model.b.eval(x) / model.a.eval(x);
    acc += 0.5 * (prev + cur) / n;
    prev = cur;
    p[i] = model.a.eval(0.0) * std::exp(acc);
  }
  SturmLiouvilleBound out;
  out.p0 = std::numeric_limits<double>::infinity();
  out.q1 = -std::numeric_limits<double>::infinity();
  out.sigma1 = -std::numeric_limits<double>::infinity();
  const Poly1 c = model.c();
  for (int i = 0; i <= n; ++i) {
    const double x = double(i) / n;
    const double ai = model.a.eval(x);
    out.p0 = std::min(out.p0, p[i]);
    out.q1 = std::max(out.q1, c.eval(x) * p[i] / ai);
    out.sigma1 = std::max(out.sigma1, p[i] / ai);
  }
  out.mu1cc = (out.q1 - out.p0 * kPi * kPi) / out.sigma1;

  // mu1cc is increasing in lambda; bisect for the zero crossing.
  const auto mu_at = [&](double lambda) {
    const Poly1 cl = model.c0 + Poly1::constant(lambda);
    double q1 = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; i += 10) {
      const double x = double(i) / n;
      q1 = std::max(q1, cl.eval(x) * p[i] / model.a.eval(x));
    }
    return (q1 - out.p0 * kPi * kPi) / out.sigma1;
  };
  double lo = -100.0, hi = 100.0;
  while (mu_at(hi) < 0.0) hi *= 2.0;
  while (mu_at(lo) > 0.0) lo *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mu_at(mid) < 0.0 ? lo : hi) = mid;
  }
  out.lambda_threshold = 0.5 * (lo + hi);
  return out;
}

BacksteppingKernels backstepping_kernels(double lambda, double x, double xi) {
  if (!(0.0 <= xi && xi <= x && x <= 1.0))
    throw std::invalid_argument("backstepping_kernels: need 0 <= xi <= x <= 1");
  const double s = lambda * (x * x - xi * xi);  // z^2
  BacksteppingKernels k;
  k.E = -lambda * xi * bessel_ratio(s, true);
  k.F = -lambda * xi * bessel_ratio(s, false);
  return k;
}

BacksteppingController backstepping_controller(double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("backstepping_controller: lambda must be positive");
  BacksteppingController bc;
  bc.R1 = backstepping_kernels(lambda, 1.0, 1.0).E;
  bc.R2 = [lambda](double x) {
    // D1 E(1,x): E(y,x) = -lambda x g(lambda (y^2 - x^2)); dE/dy at y = 1.
    const double s = lambda * (1.0 - x * x);
    return -lambda * x * bessel_ratio_ds(s, true) * 2.0 * lambda;
  };
  return bc;
}

double backstepping_inverse_pair_residual(double lambda, int grid) {
  const auto w = [](double x) { return std::sin(0.5 * kPi * x) + 0.3 * x * x; };
  // z = (E w)(x) = w(x) - int_0^x E(x,xi) w(xi) dxi, then
  // (F z)(x) = z(x) + int_0^x F(x,xi) z(xi) dxi should reproduce w.
  const auto Ew = [&](double x) {
    const auto f = [&](double xi) { return backstepping_kernels(lambda, x, xi).E * w(xi); };
    double inner = 0.0;
    const QuadRule& r = quad_rule(12);
    for (size_t j = 0; j < r.nodes.size(); ++j) inner += r.weights[j] * x * f(x * r.nodes[j]);
    return w(x) - inner;
  };
  double worst = 0.0;
  for (int g = 0; g <= grid - 1; ++g) {
    const double x = double(g) / (grid - 1);
    const auto f = [&](double xi) { return backstepping_kernels(lambda, x, xi).F * Ew(xi); };
    double inner = 0.0;
    const QuadRule& r = quad_rule(12);
    for (size_t j = 0; j < r.nodes.size(); ++j) inner += r.weights[j] * x * f(x * r.nodes[j]);
    const double back = Ew(x) + inner;
    worst = std::max(worst, std::fabs(back - w(x)));
  }
  return worst;
}

ControllabilityReport controllability_condition(int m, GridKind grid) {
  if (m < 2) throw std::invalid_argument("controllability_condition: need m >= 2");
  ControllabilityReport rep;
  rep.m = m;
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  if (m >= 8) {
    const PdeModel sys = PdeModel(Poly1::constant(1.0), Poly1(), Poly1(), 15.0);
    const Discretization d = discretize(sys, m, grid, BcMode::kControlled);
    A = d.A;
    B = d.Bvec;
  } else {
    // below the simulator minimum, assemble the same reduced model directly
    std::vector<double> nodes(m);
    if (grid == GridKind::kUniform) {
      for (int i = 0; i < m; ++i) nodes[i] = double(i + 1) / (m + 1);
    } else {
      for (int i = 0; i < m; ++i) nodes[i] = std::pow(10.0, -3.0 + 3.0 * double(i) / m);
    }
    A = Eigen::MatrixXd::Zero(m, m);
    B = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd svec = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
      const double x = nodes[i];
      const double xm = (i == 0) ? 0.0 : nodes[i - 1];
      const double xp = (i == m - 1) ? 1.0 : nodes[i + 1];
      const double h1 = x - xm, h2 = xp - x;
      const double wl = 2.0 / (h1 * (h1 + h2));
      const double wc = -2.0 / (h1 * h2);
      const double wr = 2.0 / (h2 * (h1 + h2));
      A(i, i) += wc + 15.0;
      if (i > 0) A(i, i - 1) += wl;
      if (i < m - 1) A(i, i + 1) += wr;
      else svec[i] += wr;
    }
    const double z0 = 1.0, z1 = nodes[m - 1], z2 = nodes[m - 2];
    const double d0 = 1.0 / (z0 - z1) + 1.0 / (z0 - z2);
    const double d1 = (z0 - z2) / ((z1 - z0) * (z1 - z2));
    const double d2 = (z0 - z1) / ((z2 - z0) * (z2 - z1));
    A.col(m - 1) -= svec * (d1 / d0);
    A.col(m - 2) -= svec * (d2 / d0);
    B = svec / d0;
  }

  Eigen::MatrixXd C(m, m);
  Eigen::VectorXd col = B;
  for (int k = 0; k < m; ++k) {
    C.col(k) = col;
    col = A * col;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
  const auto& sv = svd.singularValues();
  rep.condition = (sv.minCoeff() > 0.0) ? sv.maxCoeff() / sv.minCoeff()
                                        : std::numeric_limits<double>::infinity();
  const double tol = m * std::numeric_limits<double>::epsilon() * sv.maxCoeff();
  rep.numerical_rank = static_cast<int>((sv.array() > tol).count());
  return rep;
}

}  // namespace parasos
