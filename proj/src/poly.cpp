#include "parasos/poly.hpp"

#include <Eigen/Dense>
#include <sstream>

namespace parasos {

double integral_01(const Poly1& p) {
  double s = 0.0;
  for (int i = 0; i <= p.degree(); ++i) s += p.coeff(i) / (i + 1);
  return s;
}

double integral_triangle(const Poly2& p) {
  // int_0^1 int_0^x x^i xi^j dxi dx = 1 / ((j+1)(i+j+2))
  double s = 0.0;
  for (int i = 0; i <= p.deg1(); ++i)
    for (int j = 0; j <= p.deg2(); ++j) s += p.coeff(i, j) / double((j + 1) * (i + j + 2));
  return s;
}

double l2_inner(const Poly1& p, const Poly1& q) {
  double s = 0.0;
  for (int i = 0; i <= p.degree(); ++i) {
    const double pi = p.coeff(i);
    if (pi == 0.0) continue;
    for (int j = 0; j <= q.degree(); ++j) s += pi * q.coeff(j) / (i + j + 1);
  }
  return s;
}

double l2_norm(const Poly1& p) { return std::sqrt(std::max(0.0, l2_inner(p, p))); }

MonomialVector MonomialVector::univariate(int d) {
  MonomialVector m;
  m.vars = 1;
  m.degree = d;
  for (int i = 0; i <= d; ++i) m.exps.push_back({i, 0});
  return m;
}

MonomialVector MonomialVector::bivariate(int d) {
  MonomialVector m;
  m.vars = 2;
  m.degree = d;
  for (int i = 0; i <= d; ++i)
    for (int j = 0; i + j <= d; ++j) m.exps.push_back({i, j});
  return m;
}

namespace {

// Real roots of p in [0,1] via eigenvalues of the companion matrix.
std::vector<double> roots_in_unit_interval(const Poly1& p) {
  std::vector<double> out;
  const int d = p.degree();
  if (d < 1) return out;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
  const double lead = p.coeff(d);
  for (int i = 0; i < d; ++i) comp(i, d - 1) = -p.coeff(i) / lead;
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) return out;
  for (int i = 0; i < d; ++i) {
    const auto z = es.eigenvalues()[i];
    if (std::abs(z.imag()) < 1e-8 && z.real() > -1e-9 && z.real() < 1.0 + 1e-9)
      out.push_back(std::min(1.0, std::max(0.0, z.real())));
  }
  return out;
}

double scan_lower_bound(const Poly1& p) {
  const Poly1 dp = diff(p);
  double lips = 0.0;
  for (int i = 0; i <= dp.degree(); ++i) lips += std::fabs(dp.coeff(i));
  const int n = 10000;
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) lo = std::min(lo, p.eval(double(i) / n));
  return lo - 0.5 * lips / n - 1e-12;
}

}  // namespace

double lower_bound_on_interval(const Poly1& p) {
  if (p.degree() <= 0) return p.eval(0.0) - 1e-12;
  const Poly1 dp = diff(p);
  if (dp.degree() > 40) return scan_lower_bound(p);
  std::vector<double> pts = roots_in_unit_interval(dp);
  pts.push_back(0.0);
  pts.push_back(1.0);
  double lo = std::numeric_limits<double>::infinity();
  for (double x : pts) lo = std::min(lo, p.eval(x));
  if (!std::isfinite(lo)) return scan_lower_bound(p);
  return lo - 1e-12;
}

std::string to_string(const Poly1& p, const std::string& var) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i <= p.degree(); ++i) {
    const double c = p.coeff(i);
    if (c == 0.0) continue;
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    const double a = std::fabs(c);
    if (i == 0 || a != 1.0) os << a;
    if (i > 0) os << var << (i > 1 ? "^" + std::to_string(i) : "");
  }
  return os.str();
}

}  // namespace parasos
