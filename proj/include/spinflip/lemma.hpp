#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>

#include "spinflip/quadrature.hpp"
#include "spinflip/replica.hpp"

namespace spinflip {

// Which three-replica moment stands in the middle of the second-order
// bracket: (t,s,t) has the middle replica at s, (s,t,s) at t, symmetric
// averages the two.
enum class MiddleTerm { tst, sts, symmetric };

std::string_view to_string(MiddleTerm middle);
MiddleTerm parse_middle_term(std::string_view name);

// <C12^2> - 2 <C12C23> + <C12C34>
inline double lemma1_bracket(const NodeMoments& m, MiddleTerm middle) {
  double mid = 0.0;
  switch (middle) {
    case MiddleTerm::tst: mid = 2.0 * m.c12c23_tst; break;
    case MiddleTerm::sts: mid = 2.0 * m.c12c23_sts; break;
    case MiddleTerm::symmetric: mid = m.c12c23_tst + m.c12c23_sts; break;
  }
  return m.c12_sq - mid + m.c12c34;
}

// beta^2 cos(t-s) <C12> - beta^4 sin^2(t-s) [bracket]
inline double lemma1_integrand(const NodeMoments& m, double t, double s, double beta,
                               MiddleTerm middle) {
  const double b2 = beta * beta;
  const double sn = std::sin(t - s);
  return b2 * std::cos(t - s) * m.c12 - b2 * b2 * sn * sn * lemma1_bracket(m, middle);
}

// Tensor Gauss-Legendre sum of the integrand; moments_at(i, j) returns the
// node moments at (rule.nodes[i], rule.nodes[j]).
template <class F>
double integrate_lemma1(const QuadratureRule& rule, double beta, MiddleTerm middle, F&& moments_at) {
  return tensor_sum(rule, [&](std::size_t i, std::size_t j) {
    return lemma1_integrand(moments_at(i, j), rule.nodes[i], rule.nodes[j], beta, middle);
  });
}

}  // namespace spinflip
