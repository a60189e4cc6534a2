#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "parasos/poly.hpp"
#include "parasos/sdp.hpp"

namespace parasos {

// Kernel triple (M, K1, K2) of the multiplier-plus-semiseparable operator
//   (X w)(x) = M(x) w(x) + int_0^x K1(x,xi) w(xi) dxi + int_x^1 K2(x,xi) w(xi) dxi.
// Members of the cone Xi_{d1,d2,eps} satisfy K2(x,xi) = K1(xi,x) and come from
// a PSD Gram matrix through gram_to_triple.
template <typename S>
struct KernelTripleT {
  Poly1T<S> M;
  Poly2T<S> K1;
  Poly2T<S> K2;
};
using KernelTriple = KernelTripleT<double>;
using AKernelTriple = KernelTripleT<LinExpr>;

// Gram matrix sizes: n = d1+1 multiplier monomials, m = (d2+2)(d2+1)/2 kernel
// monomials; P is (n+2m) x (n+2m) with block order
//   [ multiplier | lower integral (int_0^x) | upper integral (int_x^1) ].
int xi_gram_size(int d1, int d2);

// Triple generated by a symmetric Gram matrix. Entries are fetched through
// the accessor so the same assembly serves numeric matrices and affine
// SDP-variable matrices.
template <typename S>
KernelTripleT<S> gram_to_triple_impl(int d1, int d2,
                                     const std::function<S(int, int)>& P);

KernelTriple gram_to_triple(const Eigen::MatrixXd& P, int d1, int d2);

// Operator application and quadratic forms (exact polynomial arithmetic).
Poly1 apply_operator(const KernelTriple& t, const Poly1& w);
double operator_form(const KernelTriple& t, const Poly1& v, const Poly1& w);  // <v, Xw>
// <Z(w), P Z(w)> for the monomial operator stack defining the cone.
double gram_quadratic_form(const Eigen::MatrixXd& P, int d1, int d2, const Poly1& w);

// Coarse upper bound theta with eps ||w||^2 <= <w, Xw> <= theta ||w||^2.
double theta_estimate(const Eigen::MatrixXd& P, int d1, int d2);

// A Gram matrix plus (d1, d2, eps) witnessing cone membership of a triple.
struct XiCertificate {
  int d1 = 0;
  int d2 = 0;
  double eps = 0.0;
  Eigen::MatrixXd P;     // full size n+2m, or n x n when restrict_diag
  KernelTriple triple;
  double theta = 0.0;
  bool restrict_diag = false;

  static XiCertificate from_gram(const Eigen::MatrixXd& P, int d1, int d2,
                                 double eps, bool restrict_diag = false);
};

struct VerifyReport {
  bool pass = true;
  double min_shifted_eig = 0.0;    // lambda_min(P - eps e1 e1')
  double max_triple_mismatch = 0.0;
  double worst_coercivity_gap = 0.0;  // min over samples of <w,Xw> - eps||w||^2
  std::vector<std::string> violations;
};

// Recomputes the triple from P, checks the shifted-PSD condition, and samples
// random polynomials w for eps||w||^2 <= <w,Xw> <= theta||w||^2.
VerifyReport verify_certificate(const XiCertificate& cert, int samples = 50);

// --- SDP-side emission -------------------------------------------------------

struct XiVariable {
  int gram_handle = -1;
  int d1 = 0, d2 = 0;
  double eps = 0.0;
  bool restrict_diag = false;
  AKernelTriple triple;  // affine in the Gram entries
};

// Declares a fresh Gram variable (with the eps shift on the constant
// monomial) and returns the affine triple it generates. restrict_diag keeps
// only the multiplier block, forcing K1 = K2 = 0.
XiVariable declare_xi_triple(SdpProblem& prob, const std::string& name, int d1,
                             int d2, double eps, bool restrict_diag = false);

// Emits membership constraints "target in Xi_{d1,d2,eps}": a fresh Gram
// variable plus linear equalities matching every coefficient of its generated
// triple to the target. Throws if the target degrees are not representable,
// naming the minimal (d1, d2).
XiVariable constrain_in_xi(SdpProblem& prob, const std::string& name,
                           const AKernelTriple& target, int d1, int d2,
                           double eps, bool restrict_diag = false);

// Largest degrees a triple generated at (d1, d2) can reach.
int xi_max_multiplier_degree(int d1);
int xi_max_kernel_degree(int d1, int d2);

// ---- template implementation ------------------------------------------------

template <typename S>
KernelTripleT<S> gram_to_triple_impl(int d1, int d2,
                                     const std::function<S(int, int)>& P) {
  const int n = d1 + 1;
  const MonomialVector z2 = MonomialVector::bivariate(d2);
  const int m = z2.size();
  KernelTripleT<S> out;

  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const S v = P(p, q);
      if (scalar_norm(v) != 0.0) out.M.add_to_coeff(p + q, v);
    }
  out.M.trim();

  Poly2T<S> K1;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < m; ++q) {
      const auto [iq, jq] = std::pair(z2.exps[q][0], z2.exps[q][1]);
      // Z1(x)' P12 Z2(x,xi)
      const S v12 = P(p, n + q);
      if (scalar_norm(v12) != 0.0) K1.add_to_coeff(p + iq, jq, v12);
      // Z2(xi,x)' P31 Z1(xi)
      const S v31 = P(n + m + q, p);
      if (scalar_norm(v31) != 0.0) K1.add_to_coeff(jq, iq + p, v31);
    }
  for (int q = 0; q < m; ++q) {
    const auto [iq, jq] = std::pair(z2.exps[q][0], z2.exps[q][1]);
    for (int r = 0; r < m; ++r) {
      const auto [ir, jr] = std::pair(z2.exps[r][0], z2.exps[r][1]);
      const int s = iq + ir;
      const double inv = 1.0 / (s + 1);
      // int_0^xi Z2(eta,x)' P33 Z2(eta,xi) deta
      const S v33 = P(n + m + q, n + m + r);
      if (scalar_norm(v33) != 0.0) K1.add_to_coeff(jq, jr + s + 1, v33 * inv);
      // int_xi^x Z2(eta,x)' P32 Z2(eta,xi) deta
      const S v32 = P(n + m + q, n + r);
      if (scalar_norm(v32) != 0.0) {
        K1.add_to_coeff(jq + s + 1, jr, v32 * inv);
        K1.add_to_coeff(jq, jr + s + 1, v32 * (-inv));
      }
      // int_x^1 Z2(eta,x)' P22 Z2(eta,xi) deta
      const S v22 = P(n + q, n + r);
      if (scalar_norm(v22) != 0.0) {
        K1.add_to_coeff(jq, jr, v22 * inv);
        K1.add_to_coeff(jq + s + 1, jr, v22 * (-inv));
      }
    }
  }
  K1.trim();
  out.K1 = K1;
  out.K2 = K1.swap_vars();
  return out;
}

}  // namespace parasos
