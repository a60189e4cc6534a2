#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "parasos/linexpr.hpp"

namespace parasos {

// Dense univariate/bivariate polynomials in the monomial basis, templated on
// the coefficient scalar. S = double for concrete polynomials, S = LinExpr
// when coefficients are affine in SDP decision variables.
//
// Coefficients with magnitude below kCoeffTruncation are snapped to zero
// after arithmetic so degrees stay honest.
inline constexpr double kCoeffTruncation = 1e-13;

inline double scalar_norm(double v) { return std::fabs(v); }
inline double scalar_norm(const LinExpr& v) { return v.norm1(); }

template <typename S>
class Poly1T {
 public:
  Poly1T() = default;
  explicit Poly1T(std::vector<S> coeffs) : c_(std::move(coeffs)) { trim(); }
  static Poly1T constant(S v) { return Poly1T(std::vector<S>{std::move(v)}); }
  static Poly1T monomial(int k, S coeff = S(1.0)) {
    std::vector<S> c(k + 1, S(0.0));
    c[k] = std::move(coeff);
    return Poly1T(std::move(c));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<S>& coeffs() const { return c_; }

  S coeff(int i) const {
    return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : S(0.0);
  }
  void set_coeff(int i, S v) {
    if (i >= static_cast<int>(c_.size())) c_.resize(i + 1, S(0.0));
    c_[i] = std::move(v);
  }
  void add_to_coeff(int i, const S& v) {
    if (i >= static_cast<int>(c_.size())) c_.resize(i + 1, S(0.0));
    c_[i] += v;
  }

  S eval(double x) const {
    S acc(0.0);
    for (int i = degree(); i >= 0; --i) acc = acc * x + c_[i];
    return acc;
  }

  Poly1T& trim() {
    for (auto& v : c_)
      if (scalar_norm(v) < kCoeffTruncation) v = S(0.0);
    while (!c_.empty() && scalar_norm(c_.back()) == 0.0) c_.pop_back();
    return *this;
  }

  friend Poly1T operator+(const Poly1T& a, const Poly1T& b) {
    std::vector<S> c(std::max(a.c_.size(), b.c_.size()), S(0.0));
    for (size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return Poly1T(std::move(c));
  }
  friend Poly1T operator-(const Poly1T& a, const Poly1T& b) {
    std::vector<S> c(std::max(a.c_.size(), b.c_.size()), S(0.0));
    for (size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
    return Poly1T(std::move(c));
  }
  friend Poly1T operator-(const Poly1T& a) { return a * S(-1.0); }
  friend Poly1T operator*(const Poly1T& a, const Poly1T& b) {
    if (a.is_zero() || b.is_zero()) return Poly1T();
    std::vector<S> c(a.c_.size() + b.c_.size() - 1, S(0.0));
    for (size_t i = 0; i < a.c_.size(); ++i)
      for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Poly1T(std::move(c));
  }
  friend Poly1T operator*(const Poly1T& a, const S& s) {
    std::vector<S> c = a.c_;
    for (auto& v : c) v = v * s;
    return Poly1T(std::move(c));
  }
  friend Poly1T operator*(const S& s, const Poly1T& a) { return a * s; }

 private:
  std::vector<S> c_;  // c_[i] multiplies x^i; empty = zero polynomial
};

// Bivariate polynomial; entry (i, j) multiplies x^i xi^j where x is the
// first variable and xi the second.
template <typename S>
class Poly2T {
 public:
  Poly2T() = default;
  Poly2T(int rows, int cols) : rows_(rows), cols_(cols), c_(size_t(rows) * cols, S(0.0)) {}

  bool is_zero() const { return rows_ == 0; }
  int deg1() const { return rows_ - 1; }  // degree in x
  int deg2() const { return cols_ - 1; }  // degree in xi

  S coeff(int i, int j) const {
    if (i < 0 || j < 0 || i >= rows_ || j >= cols_) return S(0.0);
    return c_[size_t(i) * cols_ + j];
  }
  void add_to_coeff(int i, int j, const S& v) {
    grow(i + 1, j + 1);
    c_[size_t(i) * cols_ + j] += v;
  }
  void set_coeff(int i, int j, S v) {
    grow(i + 1, j + 1);
    c_[size_t(i) * cols_ + j] = std::move(v);
  }

  S eval(double x, double xi) const {
    S acc(0.0);
    for (int i = rows_ - 1; i >= 0; --i) {
      S row(0.0);
      for (int j = cols_ - 1; j >= 0; --j) row = row * xi + c_[size_t(i) * cols_ + j];
      acc = acc * x + row;
    }
    return acc;
  }

  // K(xi, x) from K(x, xi): transpose of the coefficient matrix.
  Poly2T swap_vars() const {
    Poly2T r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r.c_[size_t(j) * rows_ + i] = c_[size_t(i) * cols_ + j];
    return r.trim();
  }

  Poly2T& trim() {
    int mr = 0, mc = 0;
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) {
        S& v = c_[size_t(i) * cols_ + j];
        if (scalar_norm(v) < kCoeffTruncation) v = S(0.0);
        else {
          mr = std::max(mr, i + 1);
          mc = std::max(mc, j + 1);
        }
      }
    if (mr != rows_ || mc != cols_) {
      Poly2T r(mr, mc);
      for (int i = 0; i < mr; ++i)
        for (int j = 0; j < mc; ++j) r.c_[size_t(i) * mc + j] = c_[size_t(i) * cols_ + j];
      *this = std::move(r);
    }
    return *this;
  }

  friend Poly2T operator+(const Poly2T& a, const Poly2T& b) {
    Poly2T r(std::max(a.rows_, b.rows_), std::max(a.cols_, b.cols_));
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < a.cols_; ++j) r.add_to_coeff(i, j, a.coeff(i, j));
    for (int i = 0; i < b.rows_; ++i)
      for (int j = 0; j < b.cols_; ++j) r.add_to_coeff(i, j, b.coeff(i, j));
    return r.trim();
  }
  friend Poly2T operator-(const Poly2T& a, const Poly2T& b) { return a + b * S(-1.0); }
  friend Poly2T operator-(const Poly2T& a) { return a * S(-1.0); }
  friend Poly2T operator*(const Poly2T& a, const S& s) {
    Poly2T r = a;
    for (auto& v : r.c_) v = v * s;
    return r.trim();
  }
  friend Poly2T operator*(const S& s, const Poly2T& a) { return a * s; }

 private:
  void grow(int rows, int cols) {
    if (rows <= rows_ && cols <= cols_) return;
    const int nr = std::max(rows, rows_), nc = std::max(cols, cols_);
    std::vector<S> nv(size_t(nr) * nc, S(0.0));
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) nv[size_t(i) * nc + j] = std::move(c_[size_t(i) * cols_ + j]);
    c_ = std::move(nv);
    rows_ = nr;
    cols_ = nc;
  }

  int rows_ = 0, cols_ = 0;
  std::vector<S> c_;
};

using Poly1 = Poly1T<double>;
using Poly2 = Poly2T<double>;
using APoly1 = Poly1T<LinExpr>;
using APoly2 = Poly2T<LinExpr>;

// ---- calculus -------------------------------------------------------------

template <typename S>
Poly1T<S> diff(const Poly1T<S>& p) {
  if (p.degree() < 1) return Poly1T<S>();
  std::vector<S> c(p.degree());
  for (int i = 1; i <= p.degree(); ++i) c[i - 1] = p.coeff(i) * double(i);
  return Poly1T<S>(std::move(c));
}

template <typename S>
Poly2T<S> diff(const Poly2T<S>& p, int var) {
  if (var != 1 && var != 2) throw std::invalid_argument("diff: var must be 1 or 2");
  Poly2T<S> r;
  for (int i = 0; i <= p.deg1(); ++i)
    for (int j = 0; j <= p.deg2(); ++j) {
      if (var == 1 && i >= 1) r.add_to_coeff(i - 1, j, p.coeff(i, j) * double(i));
      if (var == 2 && j >= 1) r.add_to_coeff(i, j - 1, p.coeff(i, j) * double(j));
    }
  return r.trim();
}

// Antiderivative with F(0) = 0.
template <typename S>
Poly1T<S> antiderivative(const Poly1T<S>& p) {
  if (p.is_zero()) return Poly1T<S>();
  std::vector<S> c(p.degree() + 2, S(0.0));
  for (int i = 0; i <= p.degree(); ++i) c[i + 1] = p.coeff(i) * (1.0 / (i + 1));
  return Poly1T<S>(std::move(c));
}

// Bounds for symbolic definite integrals: a constant, or the surviving
// variable of the bivariate integrand.
struct IntBound {
  enum Kind { kConst, kOtherVar } kind;
  double value = 0.0;
  static IntBound constant(double v) { return {kConst, v}; }
  static IntBound other_var() { return {kOtherVar, 0.0}; }
};

// exact \int p(x, xi) dvar between the given bounds; the result depends only
// on the remaining variable.
template <typename S>
Poly1T<S> integrate(const Poly2T<S>& p, int var, IntBound lo, IntBound hi) {
  if (var != 1 && var != 2) throw std::invalid_argument("integrate: var must be 1 or 2");
  Poly1T<S> out;
  const auto accumulate = [&](int ipow, int jpow, const S& c) {
    // integrate t^k between bounds where t is the integration variable and
    // the other variable has exponent `rem`.
    const int k = (var == 1) ? ipow : jpow;
    const int rem = (var == 1) ? jpow : ipow;
    const double inv = 1.0 / (k + 1);
    const auto bound_term = [&](const IntBound& b, double sign) {
      if (b.kind == IntBound::kConst) {
        const double v = std::pow(b.value, k + 1);
        if (v != 0.0) out.add_to_coeff(rem, c * (sign * inv * v));
      } else {
        out.add_to_coeff(rem + k + 1, c * (sign * inv));
      }
    };
    bound_term(hi, 1.0);
    bound_term(lo, -1.0);
  };
  for (int i = 0; i <= p.deg1(); ++i)
    for (int j = 0; j <= p.deg2(); ++j) {
      const S c = p.coeff(i, j);
      if (scalar_norm(c) == 0.0) continue;
      accumulate(i, j, c);
    }
  return out.trim();
}

// Bound of a univariate integrand in a fresh integration variable; the result
// is bivariate, e.g. \int_xi^x f(eta) deta.
struct IntBound2 {
  enum Kind { kConst, kVar1, kVar2 } kind;
  double value = 0.0;
  static IntBound2 constant(double v) { return {kConst, v}; }
  static IntBound2 var1() { return {kVar1, 0.0}; }
  static IntBound2 var2() { return {kVar2, 0.0}; }
};

template <typename S>
Poly2T<S> integrate_univariate(const Poly1T<S>& f, IntBound2 lo, IntBound2 hi) {
  const Poly1T<S> F = antiderivative(f);
  Poly2T<S> out;
  const auto add_eval = [&](const IntBound2& b, double sign) {
    for (int k = 0; k <= F.degree(); ++k) {
      const S c = F.coeff(k);
      if (scalar_norm(c) == 0.0) continue;
      switch (b.kind) {
        case IntBound2::kConst: {
          const double v = std::pow(b.value, k);
          if (v != 0.0) out.add_to_coeff(0, 0, c * (sign * v));
          break;
        }
        case IntBound2::kVar1:
          out.add_to_coeff(k, 0, c * sign);
          break;
        case IntBound2::kVar2:
          out.add_to_coeff(0, k, c * sign);
          break;
      }
    }
  };
  add_eval(hi, 1.0);
  add_eval(lo, -1.0);
  return out.trim();
}

// ---- substitution / products ----------------------------------------------

// p(v, xi) -> polynomial in xi (reported in the x slot of a Poly1).
template <typename S>
Poly1T<S> eval_var1(const Poly2T<S>& p, double v) {
  Poly1T<S> r;
  for (int j = 0; j <= p.deg2(); ++j) {
    S acc(0.0);
    for (int i = p.deg1(); i >= 0; --i) acc = acc * v + p.coeff(i, j);
    r.add_to_coeff(j, acc);
  }
  return r.trim();
}

template <typename S>
Poly1T<S> eval_var2(const Poly2T<S>& p, double v) {
  Poly1T<S> r;
  for (int i = 0; i <= p.deg1(); ++i) {
    S acc(0.0);
    for (int j = p.deg2(); j >= 0; --j) acc = acc * v + p.coeff(i, j);
    r.add_to_coeff(i, acc);
  }
  return r.trim();
}

// p(x, x): the diagonal restriction.
template <typename S>
Poly1T<S> diag_restrict(const Poly2T<S>& p) {
  Poly1T<S> r;
  for (int i = 0; i <= p.deg1(); ++i)
    for (int j = 0; j <= p.deg2(); ++j) {
      const S c = p.coeff(i, j);
      if (scalar_norm(c) != 0.0) r.add_to_coeff(i + j, c);
    }
  return r.trim();
}

// a(x) * K(x, xi) and a(xi) * K(x, xi).
template <typename S, typename T>
Poly2T<S> mul_var1(const Poly1T<T>& a, const Poly2T<S>& k) {
  Poly2T<S> r;
  for (int p = 0; p <= a.degree(); ++p) {
    const auto ap = a.coeff(p);
    if (scalar_norm(S(ap)) == 0.0) continue;
    for (int i = 0; i <= k.deg1(); ++i)
      for (int j = 0; j <= k.deg2(); ++j) {
        const S c = k.coeff(i, j);
        if (scalar_norm(c) != 0.0) r.add_to_coeff(i + p, j, c * ap);
      }
  }
  return r.trim();
}

template <typename S, typename T>
Poly2T<S> mul_var2(const Poly1T<T>& a, const Poly2T<S>& k) {
  Poly2T<S> r;
  for (int p = 0; p <= a.degree(); ++p) {
    const auto ap = a.coeff(p);
    if (scalar_norm(S(ap)) == 0.0) continue;
    for (int i = 0; i <= k.deg1(); ++i)
      for (int j = 0; j <= k.deg2(); ++j) {
        const S c = k.coeff(i, j);
        if (scalar_norm(c) != 0.0) r.add_to_coeff(i, j + p, c * ap);
      }
  }
  return r.trim();
}

// f(x) * g(xi).
template <typename S>
Poly2T<S> outer(const Poly1T<S>& f, const Poly1T<S>& g) {
  Poly2T<S> r;
  for (int i = 0; i <= f.degree(); ++i) {
    const S fi = f.coeff(i);
    if (scalar_norm(fi) == 0.0) continue;
    for (int j = 0; j <= g.degree(); ++j) {
      const S gj = g.coeff(j);
      if (scalar_norm(gj) != 0.0) r.add_to_coeff(i, j, fi * gj);
    }
  }
  return r.trim();
}

// ---- exact integrals over [0,1] (double scalars) ---------------------------

double integral_01(const Poly1& p);
double integral_triangle(const Poly2& p);  // over {0 <= xi <= x <= 1}
double l2_inner(const Poly1& p, const Poly1& q);
double l2_norm(const Poly1& p);

// ---- monomial bases ---------------------------------------------------------

// Ordered monomial exponent list: univariate [1, x, ..., x^d]; bivariate all
// x^i xi^j with i + j <= d in increasing lexicographic order on (i, j).
struct MonomialVector {
  int vars = 1;
  int degree = 0;
  std::vector<std::array<int, 2>> exps;

  static MonomialVector univariate(int d);
  static MonomialVector bivariate(int d);
  int size() const { return static_cast<int>(exps.size()); }
};

// ---- bounds -----------------------------------------------------------------

// Certified lower bound of p on [0,1]: critical points via companion-matrix
// eigenvalues plus endpoints, minus a 1e-12 safety margin. High-degree or
// ill-conditioned cases fall back to a 1e4-point scan with a Lipschitz margin.
double lower_bound_on_interval(const Poly1& p);

std::string to_string(const Poly1& p, const std::string& var = "x");

}  // namespace parasos
