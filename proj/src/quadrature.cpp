#include "parasos/quadrature.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace parasos {

namespace {

// 8-point Gauss-Legendre abscissae/weights on [-1,1].
constexpr double kGl8X[8] = {
    -0.9602898564975362316835609, -0.7966664774136267395915539,
    -0.5255324099163289858177390, -0.1834346424956498049394761,
    0.1834346424956498049394761,  0.5255324099163289858177390,
    0.7966664774136267395915539,  0.9602898564975362316835609};
constexpr double kGl8W[8] = {
    0.1012285362903762591525314, 0.2223810344533744705443560,
    0.3137066458778872873379622, 0.3626837833783619829651504,
    0.3626837833783619829651504, 0.3137066458778872873379622,
    0.2223810344533744705443560, 0.1012285362903762591525314};

QuadRule make_rule(int panels) {
  QuadRule r;
  r.nodes.reserve(8 * panels);
  r.weights.reserve(8 * panels);
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    for (int k = 0; k < 8; ++k) {
      r.nodes.push_back(a + 0.5 * h * (kGl8X[k] + 1.0));
      r.weights.push_back(0.5 * h * kGl8W[k]);
    }
  }
  return r;
}

}  // namespace

const QuadRule& quad_rule(int panels) {
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(panels);
  if (it == cache.end()) it = cache.emplace(panels, make_rule(panels)).first;
  return it->second;
}

double integrate_01(const std::function<double(double)>& f, int panels) {
  const QuadRule& r = quad_rule(panels);
  double s = 0.0;
  for (size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
  return s;
}

double integrate_triangle(const std::function<double(double, double)>& f,
                          int panels) {
  const QuadRule& r = quad_rule(panels);
  double s = 0.0;
  for (size_t i = 0; i < r.nodes.size(); ++i) {
    const double x = r.nodes[i];
    double inner = 0.0;
    for (size_t j = 0; j < r.nodes.size(); ++j) {
      inner += r.weights[j] * f(x, x * r.nodes[j]);
    }
    s += r.weights[i] * x * inner;
  }
  return s;
}

int panels_for_degree(int degree) {
  // GL-8 is exact per panel to degree 15; past that, shrink panels so that
  // the h^17 * f^(16) error term stays near machine precision.
  return std::max(10, (degree + 7) / 8);
}

}  // namespace parasos
