#pragma once

#include <Eigen/Dense>
#include <vector>

#include "parasos/soscone.hpp"

namespace parasos {

// K1(x,xi) = F(x)' G(xi) and K2(x,xi) = G(x)' F(xi) with F monomials of the
// x-degree of K1 and G the coefficient matrix applied to xi-monomials.
struct SemisepFactorization {
  std::vector<Poly1> F;
  std::vector<Poly1> G;
  int rank() const { return static_cast<int>(F.size()); }
};

SemisepFactorization factor_semiseparable(const Poly2& K1);

// Chebyshev approximation of 1/M on [0,1], re-expanded in monomials.
struct ChebInverse {
  Poly1 q;
  double sup_error = 0.0;  // 1001-point scan of |q - 1/M|
};
ChebInverse cheb_inverse(const Poly1& M, int deg);

// Matrix of univariate polynomials, used for the Volterra iterates U_n(x).
using PolyMatrix = std::vector<std::vector<Poly1>>;

// Picard iterates of U_{k+1}(x) = I - int_0^x B(xi) Minv(xi) C(xi) U_k(xi) dxi
// with B = [G; F], C = [F', -G']; U_1 = I. change_norms[k] is the sup-norm
// change between U_{k+2} and U_{k+1} on a 101-point grid.
struct PicardResult {
  PolyMatrix U;
  std::vector<double> change_norms;
  int n_effective = 1;  // iterate actually reached (early stop below 1e-10)
};
PicardResult picard_U(const SemisepFactorization& fact, const Poly1& Minv, int n);

struct InverseTriple {
  Poly1 Minv;
  Poly2 K1inv;
  Poly2 K2inv;
  int n_picard = 0;
  int cheb_deg = 0;
  Eigen::MatrixXd U1;  // U_n evaluated at x = 1
  Eigen::MatrixXd H;   // [N1 + N2 U(1)]^{-1} N2 U(1)
  double residual_bound = 0.0;  // measured post-hoc, never assumed
  double cheb_sup_error = 0.0;
  double cond_H = 1.0;  // condition number of N1 + N2 U(1)

  KernelTriple as_triple() const { return {Minv, K1inv, K2inv}; }
};

// Closed-form inverse of X_{M,K1,K2} per the semiseparable factorization:
//   Minv = 1/M (Chebyshev),  K1inv = Minv(x) C(x) U(x) (H-I) U(xi)^{-1} B(xi) Minv(xi),
//   K2inv the same with H. U(xi)^{-1} is evaluated pointwise and refit as a
//   polynomial of degree deg(U)+2.
InverseTriple invert_operator(const KernelTriple& t, int n = 6, int cheb_deg = 6);

// || w - X_t( X_inv(w) ) ||_{L2}
double inversion_residual(const KernelTriple& t, const InverseTriple& inv, const Poly1& w);

}  // namespace parasos
