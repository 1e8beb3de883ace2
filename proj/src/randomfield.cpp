#include "spinflip/randomfield.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spinflip {

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

namespace {

void check_hermite_order(std::size_t m) {
  if (m < 8) throw std::invalid_argument("Gauss-Hermite order must be at least 8");
}

struct TensorGrid {
  std::vector<double> x;  // J at each tensor node
  std::vector<double> y;  // J' at each tensor node
  std::vector<double> w;
};

TensorGrid tensor_grid(std::size_t m) {
  check_hermite_order(m);
  const auto rule = gauss_hermite_normal(m);
  TensorGrid g;
  g.x.reserve(m * m);
  g.y.reserve(m * m);
  g.w.reserve(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      g.x.push_back(rule.nodes[i]);
      g.y.push_back(rule.nodes[j]);
      g.w.push_back(rule.weights[i] * rule.weights[j]);
    }
  }
  return g;
}

SiteIntegrals integrate_pair(const std::vector<double>& w, const std::vector<double>& ht,
                             const std::vector<double>& hs) {
  SiteIntegrals out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double a = ht[k];
    const double b = hs[k];
    out.T += w[k] * a * b;
    out.S2t += w[k] * a * a;
    out.S2s += w[k] * b * b;
    out.T22 += w[k] * a * a * b * b;
  }
  return out;
}

}  // namespace

SiteIntegralGrid::SiteIntegralGrid(double beta, std::vector<double> angles, std::size_t m)
    : angles_(std::move(angles)), m_(m) {
  const auto g = tensor_grid(m);
  weights_ = g.w;
  tanh_.reserve(angles_.size());
  for (double t : angles_) {
    const double c = std::cos(t);
    const double s = std::sin(t);
    std::vector<double> h(g.w.size());
    for (std::size_t k = 0; k < h.size(); ++k) h[k] = std::tanh(beta * (c * g.x[k] + s * g.y[k]));
    tanh_.push_back(std::move(h));
  }
}

SiteIntegrals SiteIntegralGrid::at(std::size_t i, std::size_t j) const {
  auto out = integrate_pair(weights_, tanh_.at(i), tanh_.at(j));
  out.t = angles_[i];
  out.s = angles_[j];
  out.rho = std::cos(out.t - out.s);
  out.quad_order = m_;
  return out;
}

SiteIntegrals site_integrals(double beta, double t, double s, std::size_t m) {
  return SiteIntegralGrid(beta, {t, s}, m).at(0, 1);
}

RfMomentSet rf_moments(std::size_t N, const SiteIntegrals& site) {
  if (N < 1) throw std::invalid_argument("random field needs at least one site");
  const double n = static_cast<double>(N);
  RfMomentSet r;
  r.N = N;
  r.Q = n * (n - 1.0) * site.T * site.T;
  r.c12 = n * site.T;
  r.c12_mean_sq = n * site.T * site.T + r.Q;
  r.c12_sq = n + r.Q;
  r.c12c23_sts = n * site.S2s + r.Q;
  r.c12c23_tst = n * site.S2t + r.Q;
  r.c12c34 = n * site.T22 + r.Q;
  return r;
}

RfMomentSet rf_moments(std::size_t N, double beta, double t, double s, std::size_t m) {
  return rf_moments(N, site_integrals(beta, t, s, m));
}

NodeMoments rf_node_moments(const RfMomentSet& set) {
  return {set.c12, set.c12_sq, set.c12c23_tst, set.c12c23_sts, set.c12c34};
}

RfOverlapMoments rf_overlap_moments(const RfMomentSet& set) {
  const double n2 = static_cast<double>(set.N) * static_cast<double>(set.N);
  return {set.c12_sq / n2, set.c12_mean_sq / n2, set.c12c23_sts / n2, set.c12c34 / n2};
}

double gg_combination(const RfOverlapMoments& q, const Gamma& g) {
  return g[0] * q.q_sq + g[1] * q.q_mean_sq + g[2] * q.q12q23 + g[3] * q.q12q34;
}

double gg_bound(std::size_t N, const Gamma& g) {
  const double n = static_cast<double>(N);
  return (std::abs(g[1]) + std::abs(g[2]) + std::abs(g[3])) / n + std::abs(g[0]) / (n * n);
}

CheckReport gg_bound_check(std::size_t N, double beta, double t, double s, const Gamma& gamma,
                           std::size_t m) {
  if (std::abs(gamma[0] + gamma[1] + gamma[2] + gamma[3]) > 1e-12) {
    throw std::invalid_argument("gamma coefficients must sum to zero");
  }
  const auto q = rf_overlap_moments(rf_moments(N, beta, t, s, m));
  const ModelSummary summary{"random_field", N, beta, N};
  return make_check("gg_bound", summary, std::abs(gg_combination(q, gamma)), gg_bound(N, gamma),
                    Criterion::upper_bound, kQuadratureSlack);
}

double roma_residual(std::size_t N, double beta, double t, double s, std::size_t m) {
  const auto q = rf_overlap_moments(rf_moments(N, beta, t, s, m));
  return (q.q_sq - 2.0 * q.q12q23 + q.q12q34) - (q.q_sq - q.q_mean_sq) / 3.0;
}

double roma_bound(std::size_t N) {
  return gg_bound(N, {1, 1, -2, 0}) + gg_bound(N, {1, 2, 0, -3}) / 3.0;
}

double rf_lemma1_lhs(std::size_t N, double beta, double a, double b, std::size_t hermite_order) {
  const auto g = tensor_grid(hermite_order);
  const double ca = std::cos(a), sa = std::sin(a);
  const double cb = std::cos(b), sb = std::sin(b);
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < g.w.size(); ++k) {
    const double d = log_cosh(beta * (cb * g.x[k] + sb * g.y[k])) -
                     log_cosh(beta * (ca * g.x[k] + sa * g.y[k]));
    m1 += g.w[k] * d;
    m2 += g.w[k] * d * d;
  }
  return static_cast<double>(N) * (m2 - m1 * m1);
}

double rf_lemma1_rhs(std::size_t N, double beta, double a, double b, std::size_t legendre_order,
                     std::size_t hermite_order, MiddleTerm middle) {
  const auto rule = gauss_legendre(legendre_order, a, b);
  if (a == b) return 0.0;
  const SiteIntegralGrid grid(beta, rule.nodes, hermite_order);
  return integrate_lemma1(rule, beta, middle, [&](std::size_t i, std::size_t j) {
    return rf_node_moments(rf_moments(N, grid.at(i, j)));
  });
}

Lemma1Pair rf_lemma1_closed(std::size_t N, double beta, double a, double b,
                            std::size_t legendre_order, std::size_t hermite_order,
                            MiddleTerm middle) {
  if (a < 0.0 || b < a || b > 2.0 * std::numbers::pi + 1e-12) {
    throw std::invalid_argument("interval must satisfy 0 <= a <= b <= 2 pi");
  }
  return {rf_lemma1_lhs(N, beta, a, b, hermite_order),
          rf_lemma1_rhs(N, beta, a, b, legendre_order, hermite_order, middle)};
}

std::vector<CheckReport> rf_per_sample_suite(const ReplicaEnsemble& ensemble, double t, double s,
                                             double tolerance) {
  const auto& model = ensemble.model();
  const auto& flip = ensemble.flip();
  const std::size_t N = model.size();
  if (model.kind != ModelKind::random_field || flip.outside.size() != 0 ||
      model.interactions.size() != N) {
    throw std::invalid_argument("per-sample suite needs a random field with a whole-volume flip");
  }
  const double beta = model.beta;
  const double n = static_cast<double>(N);

  // Site field G_i at angle x, indexed by the site of interaction i.
  auto fields = [&](double x) {
    std::vector<double> g(N);
    for (std::size_t k = 0; k < N; ++k) {
      const std::size_t site = model.interactions[k].sites.front();
      g[site] = std::cos(x) * ensemble.copy(1).couplings[k] +
                std::sin(x) * ensemble.copy(2).couplings[k];
    }
    return g;
  };
  const auto gt = fields(t);
  const auto gs = fields(s);

  double log_z = n * std::numbers::ln2;
  std::vector<double> tt(N), th_s(N);
  for (std::size_t i = 0; i < N; ++i) {
    log_z += log_cosh(beta * gt[i]);
    tt[i] = std::tanh(beta * gt[i]) * std::tanh(beta * gs[i]);
    th_s[i] = std::tanh(beta * gs[i]);
  }
  double sum_tt = 0.0, sum_s2 = 0.0, pair_sum = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    sum_tt += tt[j];
    sum_s2 += th_s[j] * th_s[j];
    for (std::size_t l = j + 1; l < N; ++l) pair_sum += tt[j] * tt[l];
  }

  const ReplicaSpec at_t{t, +1}, at_s{s, +1};
  const std::vector<ReplicaSpec> ts{at_t, at_s};
  const std::vector<ReplicaSpec> sts{at_s, at_t, at_s};
  const std::vector<ReplicaSpec> tsst{at_t, at_s, at_s, at_t};
  const std::vector<ReplicaPair> one{{0, 1}};
  const std::vector<ReplicaPair> square{{0, 1}, {0, 1}};
  const std::vector<ReplicaPair> chain{{0, 1}, {1, 2}};
  const std::vector<ReplicaPair> split{{0, 1}, {2, 3}};

  const double q = covariance_moment(ensemble, ts, one, flip) / n;
  const double q_sq = covariance_moment(ensemble, ts, square, flip) / (n * n);
  const double q12q23 = covariance_moment(ensemble, sts, chain, flip) / (n * n);
  const double q12q34 = covariance_moment(ensemble, tsst, split, flip) / (n * n);

  const ModelSummary summary = summarize(model, flip);
  std::vector<CheckReport> out;
  out.push_back(make_check("rf_partition", summary, gibbs_table(ensemble, at_t).log_partition,
                           log_z, Criterion::equal_abs, tolerance));
  out.push_back(make_check("rf_overlap", summary, q, sum_tt / n, Criterion::equal_abs, tolerance));
  out.push_back(make_check("rf_overlap_sq", summary, q_sq, 1.0 / n + 2.0 * pair_sum / (n * n),
                           Criterion::equal_abs, tolerance));
  out.push_back(make_check("rf_three_replica", summary, q12q23,
                           sum_s2 / (n * n) + 2.0 * pair_sum / (n * n), Criterion::equal_abs,
                           tolerance));
  out.push_back(make_check("rf_four_replica", summary, q12q34, (sum_tt / n) * (sum_tt / n), Criterion::equal_abs,
                           tolerance));
  return out;
}

}  // namespace spinflip
