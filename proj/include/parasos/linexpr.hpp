#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace parasos {

// Affine expression  c0 + sum_i a_i * v_i  over decision variables addressed
// by global index. Products of two non-constant expressions are rejected so
// every emitted constraint stays linear in the variables.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(double c) : constant_(c) {}  // NOLINT: implicit by design
  static LinExpr variable(int32_t id, double coeff = 1.0) {
    LinExpr e;
    if (coeff != 0.0) e.terms_.push_back({id, coeff});
    return e;
  }

  double constant() const { return constant_; }
  const std::vector<std::pair<int32_t, double>>& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }
  bool is_zero() const { return terms_.empty() && constant_ == 0.0; }

  // 1-norm over all coefficients; the polynomial layer uses it to decide
  // whether a coefficient is numerically zero.
  double norm1() const {
    double s = std::fabs(constant_);
    for (const auto& t : terms_) s += std::fabs(t.second);
    return s;
  }

  LinExpr& operator+=(const LinExpr& o) {
    constant_ += o.constant_;
    merge(o.terms_, 1.0);
    return *this;
  }
  LinExpr& operator-=(const LinExpr& o) {
    constant_ -= o.constant_;
    merge(o.terms_, -1.0);
    return *this;
  }
  LinExpr& operator*=(double s) {
    constant_ *= s;
    if (s == 0.0) {
      terms_.clear();
    } else {
      for (auto& t : terms_) t.second *= s;
    }
    return *this;
  }

  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator-(const LinExpr& a) {
    LinExpr r = a;
    r *= -1.0;
    return r;
  }
  friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }
  friend LinExpr operator*(const LinExpr& a, const LinExpr& b) {
    if (a.is_constant()) {
      LinExpr r = b;
      r *= a.constant_;
      return r;
    }
    if (b.is_constant()) {
      LinExpr r = a;
      r *= b.constant_;
      return r;
    }
    throw std::invalid_argument("LinExpr: product of two non-constant expressions");
  }
  friend LinExpr operator/(LinExpr a, double s) { return a *= (1.0 / s); }

 private:
  void merge(const std::vector<std::pair<int32_t, double>>& other, double s) {
    std::vector<std::pair<int32_t, double>> out;
    out.reserve(terms_.size() + other.size());
    size_t i = 0, j = 0;
    while (i < terms_.size() || j < other.size()) {
      if (j == other.size() ||
          (i < terms_.size() && terms_[i].first < other[j].first)) {
        out.push_back(terms_[i++]);
      } else if (i == terms_.size() || other[j].first < terms_[i].first) {
        out.push_back({other[j].first, s * other[j].second});
        ++j;
      } else {
        const double c = terms_[i].second + s * other[j].second;
        if (c != 0.0) out.push_back({terms_[i].first, c});
        ++i;
        ++j;
      }
    }
    terms_ = std::move(out);
  }

  double constant_ = 0.0;
  std::vector<std::pair<int32_t, double>> terms_;  // sorted by variable id
};

}  // namespace parasos
