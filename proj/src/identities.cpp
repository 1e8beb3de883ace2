#include "spinflip/identities.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spinflip {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<ExpectationMaps> node_maps(const ReplicaEnsemble& ensemble,
                                       const QuadratureRule& rule) {
  std::vector<ExpectationMaps> maps;
  maps.reserve(rule.order());
  for (double t : rule.nodes) maps.push_back(expectation_maps(ensemble, {t, +1}, ensemble.flip()));
  return maps;
}

double volume_squared(const FlipRegion& flip) {
  if (flip.volume() == 0) throw std::invalid_argument("flip region must contain a site");
  const double v = static_cast<double>(flip.volume());
  return v * v;
}

}  // namespace

// ---------------------------------------------------------------- Lemma 1

double lemma1_rhs_sample(const ReplicaEnsemble& ensemble, const QuadratureRule& rule,
                         MiddleTerm middle) {
  const auto maps = node_maps(ensemble, rule);
  const auto d2 = variances(ensemble.model(), ensemble.flip().inside);
  return integrate_lemma1(rule, ensemble.model().beta, middle, [&](std::size_t i, std::size_t j) {
    return node_moments(d2, maps[i], maps[j]);
  });
}

Estimate lemma1_rhs_mc(const ModelSpec& model, const FlipRegion& flip, double a, double b,
                       std::size_t quad_order, const McPlan& plan, MiddleTerm middle) {
  const auto rule = gauss_legendre(quad_order, a, b);
  const NormalStream stream(plan.seed);
  const auto acc = run_samples(plan, 1, [&](std::uint64_t i, std::span<double> out) {
    out[0] = a == b ? 0.0 : lemma1_rhs_sample(make_ensemble(model, flip, stream, i), rule, middle);
  });
  return estimate(acc[0]);
}

Lemma1Lhs lemma1_lhs(const ModelSpec& model, const FlipRegion& flip, double a, double b,
                     const McPlan& plan) {
  const NormalStream stream(plan.seed);
  const auto acc = run_samples(plan, 2, [&](std::uint64_t i, std::span<double> out) {
    double x = 0.0;
    if (a != b) {
      const auto ensemble = make_ensemble(model, flip, stream, i);
      x = pressure(ensemble, {b, +1}) - pressure(ensemble, {a, +1});
    }
    out[0] = x * x;
    out[1] = x;
  });
  return {estimate(acc[0]), estimate(acc[1])};
}

TwoPath paired(const Accumulator& lhs, const Accumulator& rhs, const Accumulator& diff, double z) {
  TwoPath r;
  r.lhs = estimate(lhs);
  r.rhs = estimate(rhs);
  r.difference = estimate(diff);
  const auto c = compare(r.difference, Estimate{0.0, 0.0, r.difference.n}, z);
  r.z_score = c.z_score;
  r.pass = c.pass;
  return r;
}

TwoPath lemma1_two_path(const ModelSpec& model, const FlipRegion& flip, double a, double b,
                        std::size_t quad_order, const McPlan& plan, MiddleTerm middle) {
  const auto rule = gauss_legendre(quad_order, a, b);
  const NormalStream stream(plan.seed);
  const auto acc = run_samples(plan, 3, [&](std::uint64_t i, std::span<double> out) {
    double x = 0.0, rhs = 0.0;
    if (a != b) {
      const auto ensemble = make_ensemble(model, flip, stream, i);
      x = pressure(ensemble, {b, +1}) - pressure(ensemble, {a, +1});
      rhs = lemma1_rhs_sample(ensemble, rule, middle);
    }
    out[0] = x * x;
    out[1] = rhs;
    out[2] = x * x - rhs;
  });
  return paired(acc[0], acc[1], acc[2], plan.z_threshold);
}

// -------------------------------------------------------------- Theorem 1

double theorem1_bracket(const NodeMoments& m, std::size_t volume, MiddleTerm middle) {
  if (volume == 0) throw std::invalid_argument("flip region must contain a site");
  const double v = static_cast<double>(volume);
  return lemma1_bracket(m, middle) / (v * v);
}

double theorem1_bracket_sample(const ReplicaEnsemble& ensemble, double t, double s,
                               MiddleTerm middle) {
  const auto& flip = ensemble.flip();
  const ReplicaSpec rt{t, +1}, rs{s, +1};
  const std::vector<ReplicaSpec> ts{rt, rs}, tst{rt, rs, rt}, sts{rs, rt, rs}, tsst{rt, rs, rs, rt};
  const std::vector<ReplicaPair> square{{0, 1}, {0, 1}}, chain{{0, 1}, {1, 2}}, split{{0, 1}, {2, 3}};
  NodeMoments m;
  m.c12_sq = covariance_moment(ensemble, ts, square, flip);
  m.c12c23_tst = covariance_moment(ensemble, tst, chain, flip);
  m.c12c23_sts = covariance_moment(ensemble, sts, chain, flip);
  m.c12c34 = covariance_moment(ensemble, tsst, split, flip);
  return theorem1_bracket(m, flip.volume(), middle);
}

double theorem1_truncated_sample(const ReplicaEnsemble& ensemble, double t, double s) {
  const auto& flip = ensemble.flip();
  const auto d2 = variances(ensemble.model(), flip.inside);
  const auto mt = expectation_maps(ensemble, {t, +1}, flip);
  const auto ms = expectation_maps(ensemble, {s, +1}, flip);
  return truncated_correlation_sum(d2, mt, ms) / volume_squared(flip);
}

Estimate theorem1_bracket_mc(const ModelSpec& model, const FlipRegion& flip, double t, double s,
                             const McPlan& plan, MiddleTerm middle) {
  const NormalStream stream(plan.seed);
  const auto acc = run_samples(plan, 1, [&](std::uint64_t i, std::span<double> out) {
    out[0] = theorem1_bracket_sample(make_ensemble(model, flip, stream, i), t, s, middle);
  });
  return estimate(acc[0]);
}

double theorem1_bracket_closed(std::size_t N, double beta, double t, double s,
                               std::size_t hermite_order, MiddleTerm middle) {
  return theorem1_bracket(rf_node_moments(rf_moments(N, beta, t, s, hermite_order)), N, middle);
}

Theorem1Integral theorem1_integral_closed(std::size_t N, double beta, std::size_t quad_order,
                                          std::size_t hermite_order, MiddleTerm middle) {
  const auto rule = gauss_legendre(quad_order, 0.0, std::numbers::pi);
  const SiteIntegralGrid grid(beta, rule.nodes, hermite_order);
  const double value = tensor_sum(rule, [&](std::size_t i, std::size_t j) {
    const auto m = rf_node_moments(rf_moments(N, grid.at(i, j)));
    return theorem1_weight(rule.nodes[i], rule.nodes[j]) * theorem1_bracket(m, N, middle);
  });
  return {value, value / static_cast<double>(N)};
}

double rf_cosine_term(std::size_t N, double beta, std::size_t quad_order,
                      std::size_t hermite_order) {
  const auto rule = gauss_legendre(quad_order, 0.0, std::numbers::pi);
  const SiteIntegralGrid grid(beta, rule.nodes, hermite_order);
  return tensor_sum(rule, [&](std::size_t i, std::size_t j) {
    return std::cos(rule.nodes[i] - rule.nodes[j]) * rf_moments(N, grid.at(i, j)).c12;
  });
}

Estimate theorem1_integral_mc(const ModelSpec& model, const FlipRegion& flip,
                              std::size_t quad_order, const McPlan& plan, MiddleTerm middle) {
  const auto rule = gauss_legendre(quad_order, 0.0, std::numbers::pi);
  const NormalStream stream(plan.seed);
  const auto acc = run_samples(plan, 1, [&](std::uint64_t i, std::span<double> out) {
    const auto ensemble = make_ensemble(model, flip, stream, i);
    const auto maps = node_maps(ensemble, rule);
    const auto d2 = variances(model, flip.inside);
    out[0] = tensor_sum(rule, [&](std::size_t a, std::size_t b) {
      return theorem1_weight(rule.nodes[a], rule.nodes[b]) *
             theorem1_bracket(node_moments(d2, maps[a], maps[b]), flip.volume(), middle);
    });
  });
  return estimate(acc[0]);
}

// ---------------------------------------------------------- Concentration

double concentration_tail_bound(const ModelSpec& model, const FlipRegion& flip, double x) {
  const double scale = 8.0 * std::numbers::pi * model.beta * model.beta *
                       model.stability_constant * static_cast<double>(flip.volume());
  if (scale == 0.0) return x > 0.0 ? 0.0 : 2.0;
  return 2.0 * std::exp(-x * x / scale);
}

double concentration_variance_bound(const ModelSpec& model, const FlipRegion& flip) {
  return 16.0 * std::numbers::pi * model.stability_constant * model.beta * model.beta *
         static_cast<double>(flip.volume());
}

ConcentrationResult concentration_check(const ModelSpec& model, const FlipRegion& flip,
                                        const McPlan& plan, const std::vector<double>& x_grid) {
  const auto start = Clock::now();
  for (double x : x_grid) {
    if (!(x > 0.0)) throw std::invalid_argument("tail thresholds must be positive");
  }
  const NormalStream stream(plan.seed);
  const std::size_t k = x_grid.size();
  const auto acc = run_samples(plan, 1 + k, [&](std::uint64_t i, std::span<double> out) {
    const double x = pressure_difference(model, sample_disorder(model, stream, i, 0), flip);
    out[0] = x;
    for (std::size_t j = 0; j < k; ++j) out[1 + j] = std::abs(x) >= x_grid[j] ? 1.0 : 0.0;
  });

  ConcentrationResult r;
  r.x = x_grid;
  r.mean = estimate(acc[0]);
  r.variance = acc[0].variance();
  r.variance_bound = concentration_variance_bound(model, flip);
  const auto summary = summarize(model, flip);
  const double n = static_cast<double>(plan.n_samples);
  for (std::size_t j = 0; j < k; ++j) {
    const double p = acc[1 + j].mean();
    const double slack = 3.0 * std::sqrt(p * (1.0 - p) / n);
    const double bound = concentration_tail_bound(model, flip, x_grid[j]);
    r.tail.push_back(p);
    r.bound.push_back(bound);
    r.slack.push_back(slack);
    r.reports.push_back(make_check("concentration_tail", summary, p, bound + slack,
                                   Criterion::upper_bound, 0.0));
  }
  r.reports.push_back(make_check("concentration_variance", summary, r.variance, r.variance_bound,
                                 Criterion::upper_bound, 0.0));
  r.pass = true;
  const double runtime = seconds_since(start);
  for (auto& rep : r.reports) {
    rep.runtime = runtime;
    r.pass = r.pass && rep.pass;
  }
  return r;
}

// -------------------------------------------- internal energy, mixed states

MixedMoments mixed_moments(const ReplicaEnsemble& ensemble, int base_sign) {
  const auto& model = ensemble.model();
  const auto& flip = ensemble.flip();
  if (flip.outside.size() != 0) throw std::invalid_argument("mixed states need a whole-volume flip");
  const auto plus = expectation_maps(ensemble, {0.0, base_sign}, flip);
  const auto minus = expectation_maps(ensemble, {0.0, -base_sign}, flip);
  const auto d2 = variances(model, flip.inside);
  const ExpectationMaps* P = &plus;
  const ExpectationMaps* M = &minus;

  auto mom = [&](std::initializer_list<const ExpectationMaps*> maps,
                 std::initializer_list<ReplicaPair> pairs) {
    const std::vector<const ExpectationMaps*> m(maps);
    const std::vector<ReplicaPair> p(pairs);
    return factorized_moment(d2, m, p);
  };
  const ReplicaPair p12{0, 1}, p23{1, 2}, p34{2, 3};

  MixedMoments r;
  r.c_pp = mom({P, P}, {p12});
  r.c_pm = mom({P, M}, {p12});
  r.c2_pp = mom({P, P}, {p12, p12});
  r.c2_pm = mom({P, M}, {p12, p12});
  r.c23_ppp = mom({P, P, P}, {p12, p23});
  r.c23_pmp = mom({P, M, P}, {p12, p23});
  r.c23_ppm = mom({P, P, M}, {p12, p23});
  r.c34_pppp = mom({P, P, P, P}, {p12, p34});
  r.c34_pppm = mom({P, P, P, M}, {p12, p34});
  r.c34_ppmm = mom({P, P, M, M}, {p12, p34});
  r.c34_pmpm = mom({P, M, P, M}, {p12, p34});

  const auto c = ensemble.hamiltonian_coefficients(0.0);
  for (std::size_t a = 0; a < flip.inside.size(); ++a) {
    const double ca = c[flip.inside[a]];
    r.u_plus -= ca * plus.v[a];
    r.u_minus -= ca * minus.v[a];
  }
  return r;
}

double energy_rhs(const MixedMoments& m, double beta, double n_var) {
  return -beta * (n_var - m.c_pp);
}

double energy_square_rhs(const MixedMoments& m, double beta, double n_var) {
  const double b2 = beta * beta;
  return m.c_pp + b2 * n_var * (n_var - 2.0 * m.c_pp) + b2 * m.c2_pp - 6.0 * b2 * m.c23_ppp +
         6.0 * b2 * m.c34_pppp;
}

double xprime_square_rhs(const MixedMoments& m, double beta) {
  const double b2 = beta * beta;
  return 2.0 * (m.c_pp + m.c_pm) + 2.0 * b2 * (m.c2_pp - m.c2_pm) -
         4.0 * b2 * (3.0 * m.c23_ppp - m.c23_pmp + 2.0 * m.c23_ppm) +
         2.0 * b2 * (6.0 * m.c34_pppp + 4.0 * m.c34_pppm - m.c34_ppmm - m.c34_pmpm);
}

std::vector<CheckReport> internal_energy_checks(const ModelSpec& model, const McPlan& plan) {
  const auto start = Clock::now();
  const auto flip = full_region(model);
  const NormalStream stream(plan.seed);
  const double beta = model.beta;
  const double n_var = model.variance_sum();
  const auto acc = run_samples(plan, 9, [&](std::uint64_t i, std::span<double> out) {
    const auto m = mixed_moments(make_ensemble(model, flip, stream, i));
    const double xp = -m.u_plus - m.u_minus;
    const double lhs[3] = {m.u_plus, m.u_plus * m.u_plus, xp * xp};
    const double rhs[3] = {energy_rhs(m, beta, n_var), energy_square_rhs(m, beta, n_var),
                           xprime_square_rhs(m, beta)};
    for (int k = 0; k < 3; ++k) {
      out[3 * k] = lhs[k];
      out[3 * k + 1] = rhs[k];
      out[3 * k + 2] = lhs[k] - rhs[k];
    }
  });
  const double runtime = seconds_since(start);
  const auto summary = summarize(model, flip);
  const char* names[3] = {"internal_energy_mean", "internal_energy_square", "xprime_square"};
  std::vector<CheckReport> out;
  for (int k = 0; k < 3; ++k) {
    const auto p = paired(acc[3 * k], acc[3 * k + 1], acc[3 * k + 2], plan.z_threshold);
    auto rep = make_check(names[k], summary, p.lhs.mean, p.rhs.mean, Criterion::statistical,
                          plan.z_threshold, p.z_score);
    rep.runtime = runtime;
    out.push_back(rep);
  }
  return out;
}

TwoPath xprime_two_path(const ModelSpec& model, const McPlan& plan, int base_sign) {
  const auto flip = full_region(model);
  const NormalStream stream(plan.seed);
  const auto acc = run_samples(plan, 3, [&](std::uint64_t i, std::span<double> out) {
    const auto m = mixed_moments(make_ensemble(model, flip, stream, i), base_sign);
    const double xp = -m.u_plus - m.u_minus;
    out[0] = xp * xp;
    out[1] = xprime_square_rhs(m, model.beta);
    out[2] = out[0] - out[1];
  });
  return paired(acc[0], acc[1], acc[2], plan.z_threshold);
}

double theorem2_sample(const MixedMoments& m, std::size_t volume) {
  const double v = static_cast<double>(volume);
  const double comb = (m.c2_pp - m.c2_pm) - 2.0 * (3.0 * m.c23_ppp - m.c23_pmp + 2.0 * m.c23_ppm) +
                      (6.0 * m.c34_pppp + 4.0 * m.c34_pppm - m.c34_ppmm - m.c34_pmpm);
  return comb / (v * v);
}

Theorem2Result theorem2_combination(const ModelSpec& model, const McPlan& plan) {
  const auto flip = full_region(model);
  const NormalStream stream(plan.seed);
  const double v = static_cast<double>(model.size());
  const double scale = 2.0 * model.beta * model.beta * v * v;
  const auto acc = run_samples(plan, 3, [&](std::uint64_t i, std::span<double> out) {
    const auto m = mixed_moments(make_ensemble(model, flip, stream, i));
    const double xp = -m.u_plus - m.u_minus;
    out[0] = theorem2_sample(m, model.size());
    out[1] = (xp * xp - 2.0 * (m.c_pp + m.c_pm)) / scale;
    out[2] = out[0] - out[1];
  });
  Theorem2Result r;
  r.paired = paired(acc[1], acc[0], acc[2], plan.z_threshold);
  r.combination = estimate(acc[0]);
  r.rearranged = estimate(acc[1]);
  return r;
}

}  // namespace spinflip
