#pragma once

#include <functional>
#include <vector>

namespace parasos {

// Composite Gauss-Legendre quadrature on [0,1] and on the triangle
// {0 <= xi <= x <= 1}. Default rule: 10 panels x 8 nodes per dimension,
// exact to machine precision for polynomials up to degree 15 per panel.
struct QuadRule {
  std::vector<double> nodes;    // in [0,1]
  std::vector<double> weights;  // sum to 1
};

// Composite rule with `panels` equal panels of an 8-point Gauss-Legendre rule.
const QuadRule& quad_rule(int panels = 10);

double integrate_01(const std::function<double(double)>& f, int panels = 10);

// Integral over {(x, xi) : 0 <= xi <= x <= 1}; the inner rule is the outer
// rule rescaled to [0, x].
double integrate_triangle(const std::function<double(double, double)>& f,
                          int panels = 10);

// Panel count that keeps composite GL-8 accurate for integrands behaving
// like polynomials of the given degree.
int panels_for_degree(int degree);

}  // namespace parasos
