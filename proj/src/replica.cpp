#include "spinflip/replica.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace spinflip {

ReplicaEnsemble::ReplicaEnsemble(const ModelSpec& model, FlipRegion flip, DisorderSample outside,
                                 DisorderSample inside1, DisorderSample inside2)
    : model_(&model),
      flip_(std::move(flip)),
      copies_{std::move(outside), std::move(inside1), std::move(inside2)} {
  for (const auto& c : copies_) {
    if (c.couplings.size() != model.interactions.size()) {
      throw ModelError("disorder copy does not match the model's interactions");
    }
  }
}

std::vector<double> ReplicaEnsemble::hamiltonian_coefficients(double angle) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  std::vector<double> coeff(model_->interactions.size());
  for (auto k : flip_.outside) coeff[k] = copies_[0].couplings[k];
  for (auto k : flip_.inside) coeff[k] = c * copies_[1].couplings[k] + s * copies_[2].couplings[k];
  return coeff;
}

std::vector<double> ReplicaEnsemble::exponent_coefficients(const ReplicaSpec& spec) const {
  auto coeff = hamiltonian_coefficients(spec.angle);
  const double scale = model_->beta * static_cast<double>(spec.sign);
  for (auto& a : coeff) a *= scale;
  return coeff;
}

ReplicaEnsemble make_ensemble(const ModelSpec& model, const FlipRegion& flip,
                              const NormalStream& stream, std::uint64_t sample_index) {
  return ReplicaEnsemble(model, flip, sample_disorder(model, stream, sample_index, 0),
                         sample_disorder(model, stream, sample_index, 1),
                         sample_disorder(model, stream, sample_index, 2));
}

namespace {

constexpr std::size_t kPatternLimit = 12;

void check_limit(const ModelSpec& model, std::size_t limit) {
  if (model.size() > limit || model.size() > 62) {
    throw EnumerationLimitError("exhaustive enumeration of " + std::to_string(model.size()) +
                                " sites exceeds the limit of " + std::to_string(limit));
  }
}

std::vector<std::uint64_t> masks(const ModelSpec& model, const std::vector<std::size_t>& which) {
  std::vector<std::uint64_t> m;
  m.reserve(which.size());
  for (auto k : which) m.push_back(model.interactions.at(k).mask());
  return m;
}

std::vector<std::size_t> all_interactions(const ModelSpec& model) {
  std::vector<std::size_t> all(model.interactions.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return all;
}

}  // namespace

std::vector<double> log_weights(const ModelSpec& model, std::span<const double> coefficients,
                                std::size_t limit) {
  check_limit(model, limit);
  if (coefficients.size() != model.interactions.size()) {
    throw ModelError("coefficient vector does not match the model's interactions");
  }
  const std::size_t n = model.size();
  const std::uint64_t count = std::uint64_t{1} << n;

  // Interactions incident to each site, flattened.
  std::vector<std::size_t> start(n + 1, 0);
  for (const auto& x : model.interactions) {
    for (auto s : x.sites) ++start[s + 1];
  }
  for (std::size_t i = 0; i < n; ++i) start[i + 1] += start[i];
  std::vector<std::size_t> incident(start[n]);
  {
    auto fill = start;
    for (std::size_t k = 0; k < model.interactions.size(); ++k) {
      for (auto s : model.interactions[k].sites) incident[fill[s]++] = k;
    }
  }
  std::vector<double> term(coefficients.begin(), coefficients.end());
  double total = 0.0;
  for (double a : term) total += a;

  std::vector<double> out(count);
  out[0] = total;
  std::uint64_t config = 0;
  for (std::uint64_t g = 1; g < count; ++g) {
    const auto site = static_cast<std::size_t>(__builtin_ctzll(g));
    config ^= std::uint64_t{1} << site;
    for (std::size_t e = start[site]; e < start[site + 1]; ++e) {
      double& t = term[incident[e]];
      total -= 2.0 * t;
      t = -t;
    }
    out[config] = total;
  }
  return out;
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

GibbsTable gibbs_from_coefficients(const ModelSpec& model, std::span<const double> coefficients,
                                   std::size_t limit) {
  GibbsTable table;
  table.weights = log_weights(model, coefficients, limit);
  table.log_partition = log_sum_exp(table.weights);
  for (auto& w : table.weights) w = std::exp(w - table.log_partition);
  return table;
}

double interp_exponent(const ReplicaEnsemble& ensemble, const ReplicaSpec& spec,
                       const SpinConfig& sigma) {
  const auto& model = ensemble.model();
  if (sigma.spins.size() != model.size()) throw ModelError("configuration size mismatch");
  const auto a = ensemble.exponent_coefficients(spec);
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e += a[k] * spin_product(sigma, model.interactions[k]);
  return e;
}

GibbsTable gibbs_table(const ReplicaEnsemble& ensemble, const ReplicaSpec& spec, std::size_t limit) {
  const auto a = ensemble.exponent_coefficients(spec);
  return gibbs_from_coefficients(ensemble.model(), a, limit);
}

double pressure(const ReplicaEnsemble& ensemble, const ReplicaSpec& spec, std::size_t limit) {
  const auto a = ensemble.exponent_coefficients(spec);
  return log_sum_exp(log_weights(ensemble.model(), a, limit));
}

double pressure_difference(const ModelSpec& model, const DisorderSample& sample,
                           const FlipRegion& flip, std::size_t limit) {
  if (sample.couplings.size() != model.interactions.size()) {
    throw ModelError("disorder sample does not match the model's interactions");
  }
  if (flip.inside.empty()) return 0.0;
  std::vector<double> a(sample.couplings.size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = model.beta * sample.couplings[k];
  const auto lw = log_weights(model, a, limit);

  auto two_tables = [&] {
    std::vector<double> flipped = a;
    for (auto k : flip.inside) flipped.at(k) = -flipped.at(k);
    return log_sum_exp(lw) - log_sum_exp(log_weights(model, flipped, limit));
  };
  const std::size_t k_in = flip.inside.size();
  if (k_in > kPatternLimit) return two_tables();

  // Few inside interactions: bucket the unflipped weights by the sign pattern
  // of the inside products; the flipped table reweights each bucket by
  // exp(-2 sum_in a_X sigma_X).
  std::vector<std::uint64_t> site_bits(model.size(), 0);
  for (std::size_t b = 0; b < k_in; ++b) {
    for (auto s : model.interactions.at(flip.inside[b]).sites) site_bits[s] ^= std::uint64_t{1} << b;
  }
  const double top = *std::max_element(lw.begin(), lw.end());
  std::vector<double> bucket(std::size_t{1} << k_in, 0.0);
  std::vector<char> reached(bucket.size(), 0);
  std::uint64_t config = 0, pattern = 0;
  bucket[0] += std::exp(lw[0] - top);
  reached[0] = 1;
  for (std::uint64_t g = 1; g < lw.size(); ++g) {
    const auto site = static_cast<std::size_t>(__builtin_ctzll(g));
    config ^= std::uint64_t{1} << site;
    pattern ^= site_bits[site];
    bucket[pattern] += std::exp(lw[config] - top);
    reached[pattern] = 1;
  }

  double total = 0.0;
  std::vector<double> reweighted;
  reweighted.reserve(bucket.size());
  for (std::uint64_t p = 0; p < bucket.size(); ++p) {
    if (!reached[p]) continue;
    // Underflowed buckets can dominate after reweighting.
    if (bucket[p] < 1e-280) return two_tables();
    total += bucket[p];
    double inside = 0.0;
    for (std::size_t b = 0; b < k_in; ++b) inside += ((p >> b) & 1) ? -a[flip.inside[b]] : a[flip.inside[b]];
    reweighted.push_back(std::log(bucket[p]) - 2.0 * inside);
  }
  return std::log(total) - log_sum_exp(reweighted);
}

double internal_energy(const ReplicaEnsemble& ensemble, const ReplicaSpec& spec, std::size_t limit) {
  const auto& model = ensemble.model();
  const auto table = gibbs_table(ensemble, spec, limit);
  const auto c = ensemble.hamiltonian_coefficients(spec.angle);
  const auto all = all_interactions(model);
  const auto m = masks(model, all);
  std::vector<double> v(all.size(), 0.0);
  for (std::uint64_t idx = 0; idx < table.weights.size(); ++idx) {
    const double p = table.weights[idx];
    for (std::size_t a = 0; a < m.size(); ++a) v[a] += p * spin_product(idx, m[a]);
  }
  double u = 0.0;
  for (std::size_t a = 0; a < all.size(); ++a) u -= c[a] * v[a];
  return u;
}

ExpectationMaps expectation_maps(const ModelSpec& model, const GibbsTable& table,
                                 const std::vector<std::size_t>& interactions) {
  ExpectationMaps maps;
  maps.interactions = interactions;
  const std::size_t k = interactions.size();
  maps.v.assign(k, 0.0);
  maps.M.assign(k * k, 0.0);
  if (k == 0) return maps;
  const auto m = masks(model, interactions);
  std::vector<double> s(k);
  for (std::uint64_t idx = 0; idx < table.weights.size(); ++idx) {
    const double p = table.weights[idx];
    for (std::size_t a = 0; a < k; ++a) {
      s[a] = spin_product(idx, m[a]);
      maps.v[a] += p * s[a];
    }
    for (std::size_t a = 0; a < k; ++a) {
      const double ps = p * s[a];
      double* row = &maps.M[a * k];
      for (std::size_t b = a + 1; b < k; ++b) row[b] += ps * s[b];
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    maps.M[a * k + a] = 1.0;
    for (std::size_t b = a + 1; b < k; ++b) maps.M[b * k + a] = maps.M[a * k + b];
  }
  return maps;
}

ExpectationMaps expectation_maps(const ReplicaEnsemble& ensemble, const ReplicaSpec& spec,
                                 const FlipRegion& region, std::size_t limit) {
  return expectation_maps(ensemble.model(), gibbs_table(ensemble, spec, limit), region.inside);
}

namespace {

void check_pairs(std::span<const ReplicaPair> pairs, std::size_t replicas) {
  if (pairs.empty() || pairs.size() > 2) {
    throw std::invalid_argument("covariance moments support one or two factors");
  }
  for (const auto& [a, b] : pairs) {
    if (a >= replicas || b >= replicas || a == b) {
      throw std::invalid_argument("inconsistent replica indices in covariance moment");
    }
  }
}

bool in_pair(const ReplicaPair& p, std::size_t r) { return p.first == r || p.second == r; }

}  // namespace

double factorized_moment(std::span<const double> d2, std::span<const ExpectationMaps* const> maps,
                         std::span<const ReplicaPair> pairs) {
  check_pairs(pairs, maps.size());
  const std::size_t k = d2.size();
  for (const auto* m : maps) {
    if (m->size() != k) throw std::invalid_argument("expectation maps do not match the region");
  }

  if (pairs.size() == 1) {
    const auto& va = maps[pairs[0].first]->v;
    const auto& vb = maps[pairs[0].second]->v;
    double sum = 0.0;
    for (std::size_t x = 0; x < k; ++x) sum += d2[x] * va[x] * vb[x];
    return sum;
  }

  // Per replica: 0 = absent, 1 = v(X), 2 = v(Y), 3 = M(X,Y).
  std::vector<std::pair<const ExpectationMaps*, int>> factors;
  for (std::size_t r = 0; r < maps.size(); ++r) {
    const int role = (in_pair(pairs[0], r) ? 1 : 0) + (in_pair(pairs[1], r) ? 2 : 0);
    if (role != 0) factors.emplace_back(maps[r], role);
  }
  double sum = 0.0;
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = 0; y < k; ++y) {
      double prod = d2[x] * d2[y];
      for (const auto& [m, role] : factors) {
        switch (role) {
          case 1: prod *= m->v[x]; break;
          case 2: prod *= m->v[y]; break;
          default: prod *= m->m(x, y); break;
        }
      }
      sum += prod;
    }
  }
  return sum;
}

double covariance_moment(const ReplicaEnsemble& ensemble, std::span<const ReplicaSpec> specs,
                         std::span<const ReplicaPair> pairs, const FlipRegion& region,
                         std::size_t limit) {
  check_pairs(pairs, specs.size());
  std::vector<ExpectationMaps> cache;
  std::vector<std::size_t> slot(specs.size());
  for (std::size_t r = 0; r < specs.size(); ++r) {
    std::size_t found = r;
    for (std::size_t q = 0; q < r; ++q) {
      if (specs[q].angle == specs[r].angle && specs[q].sign == specs[r].sign) {
        found = q;
        break;
      }
    }
    if (found == r) {
      slot[r] = cache.size();
      cache.push_back(expectation_maps(ensemble, specs[r], region, limit));
    } else {
      slot[r] = slot[found];
    }
  }
  std::vector<const ExpectationMaps*> maps(specs.size());
  for (std::size_t r = 0; r < specs.size(); ++r) maps[r] = &cache[slot[r]];
  const auto d2 = variances(ensemble.model(), region.inside);
  return factorized_moment(d2, maps, pairs);
}

double covariance_moment_direct(const ReplicaEnsemble& ensemble, std::span<const ReplicaSpec> specs,
                                std::span<const ReplicaPair> pairs, const FlipRegion& region) {
  check_pairs(pairs, specs.size());
  const auto& model = ensemble.model();
  const std::size_t n = model.size();
  const std::size_t r_count = specs.size();
  if (n * r_count > 24) throw EnumerationLimitError("direct replica sum exceeds 2^24 joint states");
  const std::uint64_t states = std::uint64_t{1} << n;

  std::vector<std::vector<double>> weights;
  for (const auto& spec : specs) weights.push_back(gibbs_table(ensemble, spec, n).weights);

  // C(sigma, tau) over the region for all configuration pairs.
  const auto m = masks(model, region.inside);
  const auto d2 = variances(model, region.inside);
  std::vector<double> cov(states * states, 0.0);
  for (std::uint64_t a = 0; a < states; ++a) {
    for (std::uint64_t b = 0; b < states; ++b) {
      double c = 0.0;
      for (std::size_t x = 0; x < m.size(); ++x) c += d2[x] * spin_product(a ^ b, m[x]);
      cov[a * states + b] = c;
    }
  }

  std::vector<std::uint64_t> config(r_count, 0);
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t r = 0; r < r_count; ++r) w *= weights[r][config[r]];
    double f = 1.0;
    for (const auto& [a, b] : pairs) f *= cov[config[a] * states + config[b]];
    sum += w * f;

    std::size_t r = 0;
    while (r < r_count && ++config[r] == states) config[r++] = 0;
    if (r == r_count) break;
  }
  return sum;
}

NodeMoments node_moments(std::span<const double> d2, const ExpectationMaps& at_t,
                         const ExpectationMaps& at_s) {
  const std::size_t k = d2.size();
  if (at_t.size() != k || at_s.size() != k) {
    throw std::invalid_argument("expectation maps do not match the region");
  }
  NodeMoments out;
  for (std::size_t x = 0; x < k; ++x) out.c12 += d2[x] * at_t.v[x] * at_s.v[x];
  for (std::size_t x = 0; x < k; ++x) {
    double sq = 0.0, tst = 0.0, sts = 0.0;
    for (std::size_t y = 0; y < k; ++y) {
      const double mt = at_t.m(x, y);
      const double ms = at_s.m(x, y);
      sq += d2[y] * mt * ms;
      tst += d2[y] * ms * at_t.v[y];
      sts += d2[y] * mt * at_s.v[y];
    }
    out.c12_sq += d2[x] * sq;
    out.c12c23_tst += d2[x] * at_t.v[x] * tst;
    out.c12c23_sts += d2[x] * at_s.v[x] * sts;
  }
  out.c12c34 = out.c12 * out.c12;
  return out;
}

double truncated_correlation_sum(std::span<const double> d2, const ExpectationMaps& at_t,
                                 const ExpectationMaps& at_s) {
  const std::size_t k = d2.size();
  if (at_t.size() != k || at_s.size() != k) {
    throw std::invalid_argument("expectation maps do not match the region");
  }
  double sum = 0.0;
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = 0; y < k; ++y) {
      const double tt = at_t.m(x, y) - at_t.v[x] * at_t.v[y];
      const double ts = at_s.m(x, y) - at_s.v[x] * at_s.v[y];
      sum += d2[x] * d2[y] * tt * ts;
    }
  }
  return sum;
}

}  // namespace spinflip
