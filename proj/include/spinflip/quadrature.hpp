#pragma once

#include <cstddef>
#include <vector>

namespace spinflip {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t order() const { return nodes.size(); }
};

// Gauss-Legendre on [a, b]; exact for polynomials of degree <= 2*order - 1.
QuadratureRule gauss_legendre(std::size_t order, double a, double b);

// Gauss-Hermite for the weight exp(-x^2) on the real line.
QuadratureRule gauss_hermite(std::size_t order);

// Gauss-Hermite rescaled to expectations over a standard normal variable:
// E f(Z) ~ sum_i w_i f(x_i), sum_i w_i = 1.
QuadratureRule gauss_hermite_normal(std::size_t order);

// sum_{i,j} w_i w_j f(i, j) over the tensor product of a rule with itself.
template <class F>
double tensor_sum(const QuadratureRule& rule, F&& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.order(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < rule.order(); ++j) row += rule.weights[j] * f(i, j);
    sum += rule.weights[i] * row;
  }
  return sum;
}

}  // namespace spinflip
