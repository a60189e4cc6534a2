#include "parasos/model.hpp"

#include <stdexcept>

namespace parasos {

PdeModel::PdeModel(Poly1 a_in, Poly1 b_in, Poly1 c0_in, double lambda_in)
    : a(std::move(a_in)), b(std::move(b_in)), c0(std::move(c0_in)), lambda(lambda_in) {
  alpha = lower_bound_on_interval(a);
  if (alpha <= 0.0)
    throw std::invalid_argument("PdeModel: diffusion coefficient is not strictly positive on [0,1]");
}

PdeModel PdeModel::example1(double lambda) {
  return PdeModel(Poly1::constant(1.0), Poly1(), Poly1(), lambda);
}

PdeModel PdeModel::example2(double lambda) {
  return PdeModel(Poly1({2.0, 0.0, -1.0, 1.0}), Poly1({0.0, -2.0, 3.0}),
                  Poly1({0.7, -1.5, 1.3, -0.5}), lambda);
}

}  // namespace parasos
