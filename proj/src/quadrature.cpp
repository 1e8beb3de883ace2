#include "spinflip/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spinflip {

namespace {

constexpr int kMaxNewton = 100;

}  // namespace

QuadratureRule gauss_legendre(std::size_t order, double a, double b) {
  if (order < 2) throw std::invalid_argument("Gauss-Legendre order must be at least 2");
  if (!std::isfinite(a) || !std::isfinite(b) || b < a) {
    throw std::invalid_argument("invalid integration interval");
  }
  const std::size_t n = order;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < kMaxNewton; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    // One more evaluation at the converged root for the weight.
    double p1 = 1.0, p2 = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / static_cast<double>(j);
    }
    dp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 * half / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = mid;
  return rule;
}

// Sturm-sequence bisection on the Jacobi matrix, polished by Newton steps on
// the orthonormal Hermite recurrence.
QuadratureRule gauss_hermite(std::size_t order) {
  if (order < 1) throw std::invalid_argument("Gauss-Hermite order must be at least 1");
  const std::size_t n = order;
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  const double nd = static_cast<double>(n);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  auto evaluate = [&](double z, double& pp) {
    double p1 = pim4, p2 = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      const double jd = static_cast<double>(j);
      p1 = z * std::sqrt(2.0 / jd) * p2 - std::sqrt((jd - 1.0) / jd) * p3;
    }
    pp = std::sqrt(2.0 * nd) * p2;
    return p1;
  };

  // Eigenvalues of the Jacobi matrix below x, by Sturm sequence.
  auto count_below = [&](double x) {
    std::size_t count = 0;
    double q = -x;
    for (std::size_t k = 1; k <= n; ++k) {
      if (k > 1) {
        if (q == 0.0) q = 1e-300;
        q = -x - 0.5 * static_cast<double>(k - 1) / q;
      }
      if (q < 0.0) ++count;
    }
    return count;
  };

  const double bound = std::sqrt(2.0 * nd + 1.0) + 1.0;
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    const std::size_t rank = n - 1 - i;
    double lo = 0.0, hi = bound;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (count_below(mid) > rank ? hi : lo) = mid;
    }
    double z = 0.5 * (lo + hi);
    double pp = 0.0;
    for (int it = 0; it < kMaxNewton; ++it) {
      const double p = evaluate(z, pp);
      const double step = p / pp;
      z -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    evaluate(z, pp);
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule gauss_hermite_normal(std::size_t order) {
  auto rule = gauss_hermite(order);
  const double scale = std::sqrt(2.0);
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  for (auto& x : rule.nodes) x *= scale;
  for (auto& w : rule.weights) w *= norm;
  return rule;
}

}  // namespace spinflip
