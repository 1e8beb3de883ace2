#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spinflip/quadrature.hpp"

using namespace spinflip;

TEST_CASE("Gauss-Legendre integrates monomials exactly") {
  for (std::size_t order : {2u, 5u, 16u, 32u}) {
    const double a = -0.5, b = 2.0;
    const auto rule = gauss_legendre(order, a, b);
    REQUIRE(rule.order() == order);
    for (std::size_t i = 1; i < order; ++i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
    for (std::size_t k = 0; k <= 2 * order - 1; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < order; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], k);
      const double exact = (std::pow(b, k + 1) - std::pow(a, k + 1)) / static_cast<double>(k + 1);
      CHECK(std::abs(sum - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
    }
  }
  CHECK_THROWS(gauss_legendre(1, 0.0, 1.0));
  CHECK_THROWS(gauss_legendre(4, 1.0, 0.0));
}

TEST_CASE("Gauss-Legendre on trigonometric integrands") {
  const auto rule = gauss_legendre(32, 0.0, std::numbers::pi);
  const double cos_sq = tensor_sum(rule, [&](std::size_t i, std::size_t j) {
    return std::cos(rule.nodes[i] - rule.nodes[j]);
  });
  CHECK(cos_sq == doctest::Approx(4.0).epsilon(1e-13));
  const double sin2 = tensor_sum(rule, [&](std::size_t i, std::size_t j) {
    const double x = std::sin(rule.nodes[i] - rule.nodes[j]);
    return x * x;
  });
  CHECK(sin2 == doctest::Approx(std::numbers::pi * std::numbers::pi / 2).epsilon(1e-13));
}

TEST_CASE("Gauss-Hermite moments") {
  for (std::size_t order : {1u, 2u, 7u, 20u, 64u, 128u, 200u, 256u}) {
    const auto rule = gauss_hermite(order);
    double w = 0.0;
    for (double x : rule.weights) w += x;
    for (std::size_t i = 1; i < order; ++i) CHECK(rule.nodes[i] < rule.nodes[i - 1]);
    CHECK(w == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
    const auto normal = gauss_hermite_normal(order);
    double double_factorial = 1.0;
    for (std::size_t k = 0; k <= 2 * order - 1 && k <= 16; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < order; ++i) sum += normal.weights[i] * std::pow(normal.nodes[i], k);
      const double exact = (k % 2) ? 0.0 : double_factorial;
      CHECK(std::abs(sum - exact) <= 1e-10 * std::max(1.0, exact));
      if (k % 2 == 1) double_factorial *= static_cast<double>(k);
    }
  }
}

TEST_CASE("Gauss-Hermite integrates smooth expectations") {
  const auto rule = gauss_hermite_normal(64);
  double e_cos = 0.0, e_tanh_sq = 0.0;
  for (std::size_t i = 0; i < rule.order(); ++i) {
    e_cos += rule.weights[i] * std::cos(rule.nodes[i]);
    e_tanh_sq += rule.weights[i] * std::tanh(rule.nodes[i]) * std::tanh(rule.nodes[i]);
  }
  CHECK(e_cos == doctest::Approx(std::exp(-0.5)).epsilon(1e-13));
  auto tanh_sq = [](std::size_t order) {
    const auto r = gauss_hermite_normal(order);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.order(); ++i) sum += r.weights[i] * std::pow(std::tanh(r.nodes[i]), 2);
    return sum;
  };
  const double ref = tanh_sq(256);
  CHECK(e_tanh_sq == doctest::Approx(tanh_sq(64)).epsilon(1e-15));
  CHECK(std::abs(tanh_sq(64) - ref) <= 1e-8);
  CHECK(std::abs(tanh_sq(128) - ref) < std::abs(tanh_sq(64) - ref));
}
