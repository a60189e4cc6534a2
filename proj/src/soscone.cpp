#include "parasos/soscone.hpp"

#include <random>
#include <sstream>

#include "parasos/quadrature.hpp"

namespace parasos {

int xi_gram_size(int d1, int d2) {
  return (d1 + 1) + (d2 + 2) * (d2 + 1);
}

int xi_max_multiplier_degree(int d1) { return 2 * d1; }
int xi_max_kernel_degree(int d1, int d2) { return std::max(d1 + d2, 2 * d2 + 1); }

KernelTriple gram_to_triple(const Eigen::MatrixXd& P, int d1, int d2) {
  if (P.rows() != xi_gram_size(d1, d2) || P.cols() != P.rows())
    throw std::invalid_argument("gram_to_triple: matrix size does not match (d1,d2)");
  return gram_to_triple_impl<double>(d1, d2, [&](int i, int j) { return P(i, j); });
}

Poly1 apply_operator(const KernelTriple& t, const Poly1& w) {
  Poly1 out = t.M * w;
  // int_0^x K1(x,xi) w(xi) dxi : per xi-degree j, Gj = antiderivative(xi^j w)
  for (int j = 0; j <= std::max(t.K1.deg2(), t.K2.deg2()); ++j) {
    Poly1 xjw;
    for (int k = 0; k <= w.degree(); ++k) xjw.add_to_coeff(k + j, w.coeff(k));
    const Poly1 G = antiderivative(xjw);
    const double G1 = G.eval(1.0);
    for (int i = 0; i <= t.K1.deg1(); ++i) {
      const double c = t.K1.coeff(i, j);
      if (c != 0.0)
        for (int k = 0; k <= G.degree(); ++k) out.add_to_coeff(i + k, c * G.coeff(k));
    }
    for (int i = 0; i <= t.K2.deg1(); ++i) {
      const double c = t.K2.coeff(i, j);
      if (c == 0.0) continue;
      out.add_to_coeff(i, c * G1);
      for (int k = 0; k <= G.degree(); ++k) out.add_to_coeff(i + k, -c * G.coeff(k));
    }
  }
  return out.trim();
}

double operator_form(const KernelTriple& t, const Poly1& v, const Poly1& w) {
  return l2_inner(v, apply_operator(t, w));
}

double gram_quadratic_form(const Eigen::MatrixXd& P, int d1, int d2, const Poly1& w) {
  const int n = d1 + 1;
  const MonomialVector z2 = MonomialVector::bivariate(d2);
  const int m = z2.size();
  std::vector<Poly1> stack;
  stack.reserve(n + 2 * m);
  for (int p = 0; p < n; ++p) {
    Poly1 f;
    for (int k = 0; k <= w.degree(); ++k) f.add_to_coeff(k + p, w.coeff(k));
    stack.push_back(f);
  }
  for (int blk = 0; blk < 2; ++blk) {
    for (int q = 0; q < m; ++q) {
      const int i = z2.exps[q][0], j = z2.exps[q][1];
      Poly1 xjw;
      for (int k = 0; k <= w.degree(); ++k) xjw.add_to_coeff(k + j, w.coeff(k));
      const Poly1 G = antiderivative(xjw);
      Poly1 f;
      if (blk == 0) {
        // lower block: x^i int_0^x xi^j w
        for (int k = 0; k <= G.degree(); ++k) f.add_to_coeff(i + k, G.coeff(k));
      } else {
        // upper block: x^i (G(1) - G(x))
        f.add_to_coeff(i, G.eval(1.0));
        for (int k = 0; k <= G.degree(); ++k) f.add_to_coeff(i + k, -G.coeff(k));
      }
      stack.push_back(f.trim());
    }
  }
  double s = 0.0;
  const int N = n + 2 * m;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      if (P(a, b) == 0.0) continue;
      s += P(a, b) * l2_inner(stack[a], stack[b]);
    }
  return s;
}

double theta_estimate(const Eigen::MatrixXd& P, int d1, int d2) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P, Eigen::EigenvaluesOnly);
  const double pnorm = es.eigenvalues().cwiseAbs().maxCoeff();
  return pnorm * xi_gram_size(d1, d2);
}

XiCertificate XiCertificate::from_gram(const Eigen::MatrixXd& P, int d1, int d2,
                                       double eps, bool restrict_diag) {
  XiCertificate c;
  c.d1 = d1;
  c.d2 = d2;
  c.eps = eps;
  c.P = P;
  c.restrict_diag = restrict_diag;
  if (restrict_diag) {
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(xi_gram_size(d1, d2), xi_gram_size(d1, d2));
    full.topLeftCorner(d1 + 1, d1 + 1) = P;
    c.triple = gram_to_triple(full, d1, d2);
    c.theta = theta_estimate(full, d1, d2);
  } else {
    c.triple = gram_to_triple(P, d1, d2);
    c.theta = theta_estimate(P, d1, d2);
  }
  return c;
}

VerifyReport verify_certificate(const XiCertificate& cert, int samples) {
  VerifyReport rep;
  const auto fail = [&](const std::string& msg) {
    rep.pass = false;
    rep.violations.push_back(msg);
  };

  Eigen::MatrixXd full;
  if (cert.restrict_diag) {
    full = Eigen::MatrixXd::Zero(xi_gram_size(cert.d1, cert.d2), xi_gram_size(cert.d1, cert.d2));
    full.topLeftCorner(cert.d1 + 1, cert.d1 + 1) = cert.P;
  } else {
    full = cert.P;
  }
  if (full.rows() != xi_gram_size(cert.d1, cert.d2)) {
    fail("Gram matrix size does not match (d1,d2)");
    return rep;
  }

  Eigen::MatrixXd shifted = full;
  shifted(0, 0) -= cert.eps;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shifted, Eigen::EigenvaluesOnly);
  rep.min_shifted_eig = es.eigenvalues().minCoeff();
  if (rep.min_shifted_eig < -1e-9) {
    std::ostringstream os;
    os << "shifted Gram matrix not PSD: min eigenvalue " << rep.min_shifted_eig;
    fail(os.str());
  }

  const KernelTriple recomputed = gram_to_triple(full, cert.d1, cert.d2);
  double mismatch = 0.0;
  const auto diff1 = recomputed.M - cert.triple.M;
  for (int i = 0; i <= diff1.degree(); ++i) mismatch = std::max(mismatch, std::fabs(diff1.coeff(i)));
  const auto diff2 = recomputed.K1 - cert.triple.K1;
  for (int i = 0; i <= diff2.deg1(); ++i)
    for (int j = 0; j <= diff2.deg2(); ++j) mismatch = std::max(mismatch, std::fabs(diff2.coeff(i, j)));
  const auto diff3 = recomputed.K2 - cert.triple.K2;
  for (int i = 0; i <= diff3.deg1(); ++i)
    for (int j = 0; j <= diff3.deg2(); ++j) mismatch = std::max(mismatch, std::fabs(diff3.coeff(i, j)));
  rep.max_triple_mismatch = mismatch;
  if (mismatch > 1e-8) {
    std::ostringstream os;
    os << "stored triple disagrees with gram_to_triple(P) by " << mismatch;
    fail(os.str());
  }

  // K2(x,xi) = K1(xi,x)
  const auto sym = cert.triple.K2 - cert.triple.K1.swap_vars();
  for (int i = 0; i <= sym.deg1(); ++i)
    for (int j = 0; j <= sym.deg2(); ++j)
      if (std::fabs(sym.coeff(i, j)) > 1e-9) {
        fail("K2 is not the argument swap of K1");
        i = sym.deg1() + 1;
        break;
      }

  const double theta = theta_estimate(full, cert.d1, cert.d2);
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double worst_gap = std::numeric_limits<double>::infinity();
  const int deg_w = 6;
  const int panels =
      panels_for_degree(2 * deg_w + std::max({cert.triple.M.degree(),
                                              cert.triple.K1.deg1() + cert.triple.K1.deg2(), 1}));
  for (int s = 0; s < samples; ++s) {
    Poly1 w;
    for (int k = 0; k <= deg_w; ++k) w.add_to_coeff(k, unif(rng));
    const auto& t = cert.triple;
    const auto f1 = [&](double x) { return t.M.eval(x) * w.eval(x) * w.eval(x); };
    const auto f2 = [&](double x, double xi) { return w.eval(x) * t.K1.eval(x, xi) * w.eval(xi); };
    const auto f3 = [&](double x, double xi) { return w.eval(x) * t.K2.eval(xi, x) * w.eval(xi); };
    // both kernel integrals written over the lower triangle
    const double form = integrate_01(f1, panels) + integrate_triangle(f2, panels) +
                        integrate_triangle(f3, panels);
    const double nw = l2_inner(w, w);
    worst_gap = std::min(worst_gap, form - cert.eps * nw);
    if (form < cert.eps * nw - 1e-7 * (1.0 + nw)) {
      std::ostringstream os;
      os << "coercivity violated on sample " << s << ": <w,Xw> = " << form
         << " < eps ||w||^2 = " << cert.eps * nw;
      fail(os.str());
      break;
    }
    if (form > theta * nw + 1e-7 * (1.0 + nw)) {
      fail("upper bound theta ||w||^2 violated");
      break;
    }
  }
  rep.worst_coercivity_gap = worst_gap;
  return rep;
}

XiVariable declare_xi_triple(SdpProblem& prob, const std::string& name, int d1,
                             int d2, double eps, bool restrict_diag) {
  XiVariable xv;
  xv.d1 = d1;
  xv.d2 = d2;
  xv.eps = eps;
  xv.restrict_diag = restrict_diag;
  if (restrict_diag) {
    xv.gram_handle = prob.add_matrix_var(name, d1 + 1, eps);
    const int n = d1 + 1;
    xv.triple = gram_to_triple_impl<LinExpr>(d1, d2, [&](int i, int j) {
      if (i < n && j < n) return prob.entry(xv.gram_handle, i, j);
      return LinExpr(0.0);
    });
  } else {
    xv.gram_handle = prob.add_matrix_var(name, xi_gram_size(d1, d2), eps);
    xv.triple = gram_to_triple_impl<LinExpr>(
        d1, d2, [&](int i, int j) { return prob.entry(xv.gram_handle, i, j); });
  }
  return xv;
}

namespace {

template <typename S>
int effective_degree(const Poly1T<S>& p) {
  for (int i = p.degree(); i >= 0; --i)
    if (scalar_norm(p.coeff(i)) > 0.0) return i;
  return -1;
}

template <typename S>
std::pair<int, int> effective_degrees(const Poly2T<S>& p) {
  int d1 = -1, d2 = -1;
  for (int i = 0; i <= p.deg1(); ++i)
    for (int j = 0; j <= p.deg2(); ++j)
      if (scalar_norm(p.coeff(i, j)) > 0.0) {
        d1 = std::max(d1, i);
        d2 = std::max(d2, j);
      }
  return {d1, d2};
}

}  // namespace

XiVariable constrain_in_xi(SdpProblem& prob, const std::string& name,
                           const AKernelTriple& target, int d1, int d2,
                           double eps, bool restrict_diag) {
  const int degM = effective_degree(target.M);
  const auto [k1x, k1xi] = effective_degrees(target.K1);
  const int degK = std::max(k1x, k1xi);
  if (degM > xi_max_multiplier_degree(d1) || degK > xi_max_kernel_degree(d1, d2)) {
    const int need_d1 = std::max(d1, (degM + 1) / 2);
    int need_d2 = d2;
    while (xi_max_kernel_degree(need_d1, need_d2) < degK) ++need_d2;
    std::ostringstream os;
    os << "constrain_in_xi(" << name << "): target degrees (deg M = " << degM
       << ", deg K1 = " << degK << ") exceed representable degrees for (d1,d2) = ("
       << d1 << "," << d2 << "); need at least (" << need_d1 << "," << need_d2 << ")";
    throw std::invalid_argument(os.str());
  }
  if (restrict_diag && degK >= 0)
    throw std::invalid_argument("constrain_in_xi(" + name +
                                "): restrict_diag requires a zero kernel target");

  XiVariable xv = declare_xi_triple(prob, name, d1, d2, eps, restrict_diag);
  const APoly1 dM = xv.triple.M - target.M;
  for (int i = 0; i <= dM.degree(); ++i) {
    const LinExpr e = dM.coeff(i);
    if (e.norm1() > 0.0) prob.add_equality(e, 0.0);
  }
  const APoly2 dK = xv.triple.K1 - target.K1;
  for (int i = 0; i <= dK.deg1(); ++i)
    for (int j = 0; j <= dK.deg2(); ++j) {
      const LinExpr e = dK.coeff(i, j);
      if (e.norm1() > 0.0) prob.add_equality(e, 0.0);
    }
  return xv;
}

}  // namespace parasos
