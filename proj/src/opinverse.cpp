#include "parasos/opinverse.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace parasos {

namespace {

// T_k(2x-1) in the monomial basis, k = 0..deg.
std::vector<Poly1> shifted_chebyshev(int deg) {
  std::vector<Poly1> T(deg + 1);
  T[0] = Poly1::constant(1.0);
  if (deg >= 1) T[1] = Poly1({-1.0, 2.0});
  for (int k = 2; k <= deg; ++k) T[k] = 2.0 * (Poly1({-1.0, 2.0}) * T[k - 1]) - T[k - 2];
  return T;
}

PolyMatrix identity_matrix(int n) {
  PolyMatrix I(n, std::vector<Poly1>(n));
  for (int i = 0; i < n; ++i) I[i][i] = Poly1::constant(1.0);
  return I;
}

Eigen::MatrixXd eval_matrix(const PolyMatrix& U, double x) {
  const int n = static_cast<int>(U.size());
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = U[i][j].eval(x);
  return M;
}

int max_degree(const PolyMatrix& U) {
  int d = 0;
  for (const auto& row : U)
    for (const auto& p : row) d = std::max(d, p.degree());
  return d;
}

}  // namespace

SemisepFactorization factor_semiseparable(const Poly2& K1) {
  SemisepFactorization f;
  for (int i = 0; i <= K1.deg1(); ++i) {
    Poly1 g;
    for (int j = 0; j <= K1.deg2(); ++j)
      if (K1.coeff(i, j) != 0.0) g.add_to_coeff(j, K1.coeff(i, j));
    if (g.is_zero()) continue;
    f.F.push_back(Poly1::monomial(i));
    f.G.push_back(g);
  }
  return f;
}

ChebInverse cheb_inverse(const Poly1& M, int deg) {
  if (deg < 0) throw std::invalid_argument("cheb_inverse: degree must be >= 0");
  if (lower_bound_on_interval(M) <= 0.0)
    throw std::invalid_argument("cheb_inverse: multiplier is not strictly positive on [0,1]");

  const int N = std::max(4 * (deg + 1), 64);
  std::vector<double> fv(N);
  for (int k = 0; k < N; ++k) {
    const double theta = kPi * (k + 0.5) / N;
    const double x = 0.5 * (std::cos(theta) + 1.0);
    fv[k] = 1.0 / M.eval(x);
  }
  const auto T = shifted_chebyshev(deg);
  ChebInverse out;
  for (int j = 0; j <= deg; ++j) {
    double c = 0.0;
    for (int k = 0; k < N; ++k) c += fv[k] * std::cos(j * kPi * (k + 0.5) / N);
    c *= 2.0 / N;
    if (j == 0) c *= 0.5;
    out.q = out.q + c * T[j];
  }
  out.q.trim();
  for (int k = 0; k <= 1000; ++k) {
    const double x = k / 1000.0;
    out.sup_error = std::max(out.sup_error, std::fabs(out.q.eval(x) - 1.0 / M.eval(x)));
  }
  return out;
}

PicardResult picard_U(const SemisepFactorization& fact, const Poly1& Minv, int n) {
  if (n < 1) throw std::invalid_argument("picard_U: n must be >= 1");
  const int r = fact.rank();
  PicardResult out;
  out.U = identity_matrix(2 * r);
  out.n_effective = 1;
  if (r == 0 || n == 1) return out;

  // B(x) = [G; F], C(x) = [F', -G'];  kernel(x) = B Minv C, a 2r x 2r matrix.
  std::vector<Poly1> B(2 * r), C(2 * r);
  for (int i = 0; i < r; ++i) {
    B[i] = fact.G[i];
    B[r + i] = fact.F[i];
    C[i] = fact.F[i];
    C[r + i] = -1.0 * fact.G[i];
  }
  PolyMatrix kern(2 * r, std::vector<Poly1>(2 * r));
  for (int i = 0; i < 2 * r; ++i)
    for (int j = 0; j < 2 * r; ++j) kern[i][j] = B[i] * Minv * C[j];

  for (int it = 2; it <= n; ++it) {
    PolyMatrix next = identity_matrix(2 * r);
    for (int i = 0; i < 2 * r; ++i)
      for (int j = 0; j < 2 * r; ++j) {
        Poly1 acc;
        for (int k = 0; k < 2 * r; ++k) acc = acc + kern[i][k] * out.U[k][j];
        next[i][j] = next[i][j] - antiderivative(acc);
      }
    double change = 0.0;
    for (int g = 0; g <= 100; ++g) {
      const double x = g / 100.0;
      for (int i = 0; i < 2 * r; ++i)
        for (int j = 0; j < 2 * r; ++j)
          change = std::max(change, std::fabs(next[i][j].eval(x) - out.U[i][j].eval(x)));
    }
    out.U = std::move(next);
    out.change_norms.push_back(change);
    out.n_effective = it;
    if (change < 1e-10) break;
  }
  return out;
}

InverseTriple invert_operator(const KernelTriple& t, int n, int cheb_deg) {
  InverseTriple inv;
  inv.n_picard = n;
  inv.cheb_deg = cheb_deg;
  const ChebInverse ci = cheb_inverse(t.M, cheb_deg);
  inv.Minv = ci.q;
  inv.cheb_sup_error = ci.sup_error;

  const SemisepFactorization fact = factor_semiseparable(t.K1);
  const int r = fact.rank();
  if (r == 0) {
    inv.U1 = Eigen::MatrixXd();
    inv.H = Eigen::MatrixXd();
    Poly1 probe({0.3, 1.0, -0.7});
    inv.residual_bound = inversion_residual(t, inv, probe);
    return inv;
  }

  const PicardResult pic = picard_U(fact, inv.Minv, n);
  const PolyMatrix& U = pic.U;
  const int nn = 2 * r;
  inv.U1 = eval_matrix(U, 1.0);

  Eigen::MatrixXd N2U = Eigen::MatrixXd::Zero(nn, nn);
  N2U.bottomRows(r) = inv.U1.bottomRows(r);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nn, nn);
  A.topLeftCorner(r, r).setIdentity();
  A += N2U;  // N1 + N2 U(1)
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const double smin = svd.singularValues().minCoeff();
    inv.cond_H = (smin > 0) ? svd.singularValues().maxCoeff() / smin
                            : std::numeric_limits<double>::infinity();
    if (!(inv.cond_H < 1e12)) {
      std::ostringstream os;
      os << "invert_operator: N1 + N2 U(1) is numerically singular (cond " << inv.cond_H << ")";
      throw std::runtime_error(os.str());
    }
  }
  inv.H = A.partialPivLu().solve(N2U);

  // U(xi)^{-1}: pointwise inversion at Chebyshev nodes, refit at deg(U)+2.
  const int degU = max_degree(U);
  const int fit_deg = degU + 2;
  const int ns = std::max(2 * (fit_deg + 1), 64);
  Eigen::MatrixXd design(ns, fit_deg + 1);
  std::vector<double> xs(ns);
  for (int k = 0; k < ns; ++k) xs[k] = 0.5 * (std::cos(kPi * (k + 0.5) / ns) + 1.0);
  {  // Chebyshev design matrix (stable fit basis)
    for (int k = 0; k < ns; ++k) {
      const double tt = 2.0 * xs[k] - 1.0;
      double Tm1 = 1.0, Tm0 = tt;
      design(k, 0) = 1.0;
      if (fit_deg >= 1) design(k, 1) = tt;
      for (int j = 2; j <= fit_deg; ++j) {
        const double Tj = 2.0 * tt * Tm0 - Tm1;
        design(k, j) = Tj;
        Tm1 = Tm0;
        Tm0 = Tj;
      }
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  Eigen::MatrixXd samples(ns, nn * nn);
  for (int k = 0; k < ns; ++k) {
    const Eigen::MatrixXd Ui = eval_matrix(U, xs[k]).partialPivLu().solve(
        Eigen::MatrixXd::Identity(nn, nn));
    for (int i = 0; i < nn; ++i)
      for (int j = 0; j < nn; ++j) samples(k, i * nn + j) = Ui(i, j);
  }
  const Eigen::MatrixXd coef = qr.solve(samples);  // Chebyshev coefficients
  const auto T = shifted_chebyshev(fit_deg);
  PolyMatrix V(nn, std::vector<Poly1>(nn));
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j) {
      const int col = i * nn + j;
      const double cmax = coef.col(col).cwiseAbs().maxCoeff();
      Poly1 fit;
      for (int d = 0; d <= fit_deg; ++d) {
        const double c = coef(d, col);
        if (std::fabs(c) >= 1e-13 * std::max(1.0, cmax)) fit = fit + c * T[d];
      }
      V[i][j] = fit.trim();
    }

  // left(x) = Minv(x) C(x) U(x) (row), right(xi) = V(xi) B(xi) Minv(xi) (col)
  std::vector<Poly1> B(nn), C(nn);
  for (int i = 0; i < r; ++i) {
    B[i] = fact.G[i];
    B[r + i] = fact.F[i];
    C[i] = fact.F[i];
    C[r + i] = -1.0 * fact.G[i];
  }
  std::vector<Poly1> left(nn), right(nn);
  for (int q = 0; q < nn; ++q) {
    Poly1 acc;
    for (int p = 0; p < nn; ++p) acc = acc + C[p] * U[p][q];
    left[q] = inv.Minv * acc;
  }
  for (int p = 0; p < nn; ++p) {
    Poly1 acc;
    for (int q = 0; q < nn; ++q) acc = acc + V[p][q] * B[q];
    right[p] = acc * inv.Minv;
  }

  const Eigen::MatrixXd HmI = inv.H - Eigen::MatrixXd::Identity(nn, nn);
  Poly2 K1i, K2i;
  for (int p = 0; p < nn; ++p)
    for (int q = 0; q < nn; ++q) {
      if (HmI(p, q) != 0.0) K1i = K1i + HmI(p, q) * outer(left[p], right[q]);
      if (inv.H(p, q) != 0.0) K2i = K2i + inv.H(p, q) * outer(left[p], right[q]);
    }
  inv.K1inv = K1i.trim();
  inv.K2inv = K2i.trim();

  Poly1 probe({0.3, 1.0, -0.7});
  inv.residual_bound = inversion_residual(t, inv, probe);
  return inv;
}

double inversion_residual(const KernelTriple& t, const InverseTriple& inv, const Poly1& w) {
  const Poly1 back = apply_operator(t, apply_operator(inv.as_triple(), w));
  return l2_norm(w - back);
}

}  // namespace parasos
