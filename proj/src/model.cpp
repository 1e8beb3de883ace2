#include "spinflip/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace spinflip {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::random_field: return "random_field";
    case ModelKind::sk: return "sk";
    case ModelKind::ea_chain: return "ea_chain";
    case ModelKind::ea_grid: return "ea_grid";
    case ModelKind::custom: return "custom";
  }
  return "custom";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto kind : {ModelKind::random_field, ModelKind::sk, ModelKind::ea_chain,
                    ModelKind::ea_grid, ModelKind::custom}) {
    if (to_string(kind) == name) return kind;
  }
  throw ModelError("unknown model kind '" + std::string(name) + "'");
}

SiteSet::SiteSet(std::vector<SiteLabel> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ModelError("site set is empty");
  std::sort(labels_.begin(), labels_.end());
  if (std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end()) {
    throw ModelError("duplicate site label");
  }
}

SiteSet SiteSet::range(std::size_t n) {
  std::vector<SiteLabel> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back({static_cast<int>(i)});
  return SiteSet(std::move(labels));
}

std::size_t SiteSet::index_of(const SiteLabel& label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) throw ModelError("unknown site label");
  return static_cast<std::size_t>(it - labels_.begin());
}

std::uint64_t Interaction::mask() const {
  std::uint64_t m = 0;
  for (auto s : sites) {
    if (s >= 64) throw ModelError("configuration masks support at most 64 sites");
    m |= std::uint64_t{1} << s;
  }
  return m;
}

double ModelSpec::variance_sum() const {
  double sum = 0.0;
  for (const auto& x : interactions) sum += x.variance();
  return sum;
}

ModelSpec make_model(ModelKind kind, SiteSet sites, std::vector<Interaction> raw, double beta) {
  if (sites.size() == 0) throw ModelError("site set is empty");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ModelError("beta must be positive");

  ModelSpec model;
  model.kind = kind;
  model.beta = beta;
  model.sites = std::move(sites);
  std::set<std::vector<std::size_t>> seen;
  for (auto& x : raw) {
    if (x.sites.empty()) throw ModelError("interaction subset must be nonempty");
    if (!(x.delta >= 0.0) || !std::isfinite(x.delta)) {
      throw ModelError("interaction delta must be finite and non-negative");
    }
    std::sort(x.sites.begin(), x.sites.end());
    if (std::adjacent_find(x.sites.begin(), x.sites.end()) != x.sites.end()) {
      throw ModelError("interaction subset repeats a site");
    }
    if (x.sites.back() >= model.sites.size()) {
      throw ModelError("interaction subset is not contained in the site set");
    }
    if (!seen.insert(x.sites).second) throw ModelError("interaction subset listed twice");
    if (x.delta == 0.0) continue;
    model.interactions.push_back(std::move(x));
  }
  model.stability_constant = model.variance_sum() / static_cast<double>(model.size());
  return model;
}

namespace {

std::vector<Interaction> grid_bonds(const std::vector<std::size_t>& dims, SiteSet& sites) {
  std::size_t total = 1;
  for (auto d : dims) {
    if (d < 1) throw ModelError("grid dimensions must be >= 1");
    total *= d;
  }
  std::vector<SiteLabel> labels;
  labels.reserve(total);
  SiteLabel coord(dims.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    labels.push_back(coord);
    for (std::size_t k = dims.size(); k-- > 0;) {
      if (++coord[k] < static_cast<int>(dims[k])) break;
      coord[k] = 0;
    }
  }
  sites = SiteSet(labels);

  std::vector<Interaction> bonds;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t k = 0; k < dims.size(); ++k) {
      SiteLabel next = sites.label(i);
      if (++next[k] >= static_cast<int>(dims[k])) continue;
      bonds.push_back({{i, sites.index_of(next)}, 1.0});
    }
  }
  return bonds;
}

}  // namespace

ModelSpec build_model(ModelKind kind, const SizeParams& size, double beta) {
  std::vector<Interaction> raw;
  switch (kind) {
    case ModelKind::random_field: {
      if (size.sites < 1) throw ModelError("random_field needs at least one site");
      for (std::size_t i = 0; i < size.sites; ++i) raw.push_back({{i}, 1.0});
      return make_model(kind, SiteSet::range(size.sites), std::move(raw), beta);
    }
    case ModelKind::sk: {
      if (size.sites < 2) throw ModelError("sk needs at least two sites");
      const double delta = std::sqrt(1.0 / static_cast<double>(size.sites));
      for (std::size_t i = 0; i < size.sites; ++i) {
        for (std::size_t j = i + 1; j < size.sites; ++j) raw.push_back({{i, j}, delta});
      }
      return make_model(kind, SiteSet::range(size.sites), std::move(raw), beta);
    }
    case ModelKind::ea_chain: {
      if (size.sites < 2) throw ModelError("ea_chain needs length >= 2");
      for (std::size_t i = 0; i + 1 < size.sites; ++i) raw.push_back({{i, i + 1}, 1.0});
      return make_model(kind, SiteSet::range(size.sites), std::move(raw), beta);
    }
    case ModelKind::ea_grid: {
      if (size.dims.empty()) throw ModelError("ea_grid needs dims");
      SiteSet sites;
      raw = grid_bonds(size.dims, sites);
      return make_model(kind, std::move(sites), std::move(raw), beta);
    }
    case ModelKind::custom: {
      if (size.sites < 1) throw ModelError("custom model needs at least one site");
      return make_model(kind, SiteSet::range(size.sites), size.custom, beta);
    }
  }
  throw ModelError("unknown model kind");
}

namespace {

SiteLabel label_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return {j.get<int>()};
  if (j.is_array()) {
    SiteLabel label;
    for (const auto& c : j) {
      if (!c.is_number_integer()) throw ModelError("site labels must be integers");
      label.push_back(c.get<int>());
    }
    if (label.empty()) throw ModelError("site label must be nonempty");
    return label;
  }
  throw ModelError("site labels must be integers or integer arrays");
}

std::size_t positive_size(const nlohmann::json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ModelError(std::string(what) + " must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

}  // namespace

ModelSpec model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ModelError("model section must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "kind" && key != "sites" && key != "dims" && key != "beta" &&
        key != "interactions") {
      throw ModelError("unknown model key '" + key + "'");
    }
  }
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw ModelError("model.kind is required");
  const ModelKind kind = parse_model_kind(doc["kind"].get<std::string>());
  double beta = 1.0;
  if (doc.contains("beta")) {
    if (!doc["beta"].is_number()) throw ModelError("model.beta must be a number");
    beta = doc["beta"].get<double>();
  }

  if (kind == ModelKind::ea_grid) {
    if (!doc.contains("dims") || !doc["dims"].is_array()) throw ModelError("ea_grid needs dims");
    SizeParams size;
    for (const auto& d : doc["dims"]) size.dims.push_back(positive_size(d, "dims entries"));
    return build_model(kind, size, beta);
  }
  if (doc.contains("dims")) throw ModelError("dims is only valid for ea_grid");
  if (!doc.contains("sites")) throw ModelError("model.sites is required");

  if (kind != ModelKind::custom) {
    if (doc.contains("interactions")) throw ModelError("interactions are only valid for custom");
    SizeParams size;
    size.sites = positive_size(doc["sites"], "model.sites");
    return build_model(kind, size, beta);
  }

  SiteSet sites;
  if (doc["sites"].is_array()) {
    std::vector<SiteLabel> labels;
    for (const auto& l : doc["sites"]) labels.push_back(label_from_json(l));
    sites = SiteSet(std::move(labels));
  } else {
    sites = SiteSet::range(positive_size(doc["sites"], "model.sites"));
  }
  if (!doc.contains("interactions") || !doc["interactions"].is_array()) {
    throw ModelError("custom model needs an interactions list");
  }
  std::vector<Interaction> raw;
  for (const auto& entry : doc["interactions"]) {
    if (!entry.is_object()) throw ModelError("interaction entries must be objects");
    for (const auto& [key, value] : entry.items()) {
      if (key != "sites" && key != "delta") throw ModelError("unknown interaction key '" + key + "'");
    }
    if (!entry.contains("sites") || !entry["sites"].is_array() || !entry.contains("delta") ||
        !entry["delta"].is_number()) {
      throw ModelError("interaction needs sites (array) and delta (number)");
    }
    Interaction x;
    for (const auto& l : entry["sites"]) x.sites.push_back(sites.index_of(label_from_json(l)));
    x.delta = entry["delta"].get<double>();
    raw.push_back(std::move(x));
  }
  return make_model(kind, std::move(sites), std::move(raw), beta);
}

nlohmann::json model_to_json(const ModelSpec& model) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(model.kind));
  j["beta"] = model.beta;
  j["sites"] = model.size();
  j["interactions"] = model.interactions.size();
  j["stability_constant"] = model.stability_constant;
  return j;
}

SpinConfig SpinConfig::from_index(std::size_t n, std::uint64_t index) {
  if (n > 64) throw ModelError("spin configurations are limited to 64 sites");
  if (n < 64 && index >> n) throw ModelError("configuration index out of range");
  SpinConfig c;
  c.index = index;
  c.spins.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.spins[i] = ((index >> i) & 1u) ? -1 : 1;
  return c;
}

SpinConfig SpinConfig::from_spins(std::vector<int> spins) {
  if (spins.size() > 64) throw ModelError("spin configurations are limited to 64 sites");
  SpinConfig c;
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (spins[i] != 1 && spins[i] != -1) throw ModelError("spins must be +1 or -1");
    if (spins[i] == -1) c.index |= std::uint64_t{1} << i;
  }
  c.spins = std::move(spins);
  return c;
}

int spin_product(const SpinConfig& sigma, const Interaction& x) {
  int p = 1;
  for (auto s : x.sites) p *= sigma.spins.at(s);
  return p;
}

FlipRegion make_flip_region(const ModelSpec& model, std::vector<std::size_t> sites) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  if (!sites.empty() && sites.back() >= model.size()) {
    throw ModelError("flip region is not contained in the site set");
  }
  FlipRegion region;
  region.sites = std::move(sites);
  for (std::size_t k = 0; k < model.interactions.size(); ++k) {
    const auto& xs = model.interactions[k].sites;
    const bool contained = std::includes(region.sites.begin(), region.sites.end(), xs.begin(), xs.end());
    (contained ? region.inside : region.outside).push_back(k);
  }
  return region;
}

FlipRegion full_region(const ModelSpec& model) {
  std::vector<std::size_t> all(model.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return make_flip_region(model, std::move(all));
}

FlipRegion empty_region(const ModelSpec& model) { return make_flip_region(model, {}); }

DisorderSample sample_disorder(const ModelSpec& model, const NormalStream& stream,
                               std::uint64_t sample_index, std::uint32_t copy_id) {
  DisorderSample sample;
  sample.copy_id = copy_id;
  sample.sample_index = sample_index;
  sample.couplings.resize(model.interactions.size());
  for (std::size_t k = 0; k < model.interactions.size(); ++k) {
    sample.couplings[k] = model.interactions[k].delta * stream(sample_index, copy_id, k);
  }
  return sample;
}

DisorderSample flip_inside(const DisorderSample& sample, const FlipRegion& region) {
  DisorderSample out = sample;
  for (auto k : region.inside) out.couplings.at(k) = -out.couplings.at(k);
  return out;
}

namespace {

void check_sample(const ModelSpec& model, const DisorderSample& sample) {
  if (sample.couplings.size() != model.interactions.size()) {
    throw ModelError("disorder sample does not match the model's interactions");
  }
}

void check_config(const ModelSpec& model, const SpinConfig& sigma) {
  if (sigma.spins.size() != model.size()) throw ModelError("configuration size mismatch");
}

}  // namespace

double hamiltonian(const ModelSpec& model, const DisorderSample& sample, const SpinConfig& sigma,
                   const FlipRegion& region, bool flipped) {
  check_sample(model, sample);
  check_config(model, sigma);
  std::vector<double> sign(model.interactions.size(), 1.0);
  if (flipped) {
    for (auto k : region.inside) sign.at(k) = -1.0;
  }
  double h = 0.0;
  for (std::size_t k = 0; k < model.interactions.size(); ++k) {
    h -= sign[k] * sample.couplings[k] * spin_product(sigma, model.interactions[k]);
  }
  return h;
}

double covariance(const ModelSpec& model, const SpinConfig& sigma, const SpinConfig& tau,
                  const FlipRegion& region) {
  check_config(model, sigma);
  check_config(model, tau);
  double c = 0.0;
  for (auto k : region.inside) {
    const auto& x = model.interactions.at(k);
    c += x.variance() * spin_product(sigma, x) * spin_product(tau, x);
  }
  return c;
}

double covariance(const ModelSpec& model, const SpinConfig& sigma, const SpinConfig& tau) {
  return covariance(model, sigma, tau, full_region(model));
}

double normalized_overlap(const ModelSpec& model, const SpinConfig& sigma, const SpinConfig& tau,
                          const FlipRegion& region) {
  if (region.volume() == 0) throw ModelError("normalized overlap needs a nonempty region");
  return covariance(model, sigma, tau, region) / static_cast<double>(region.volume());
}

std::vector<double> variances(const ModelSpec& model, const std::vector<std::size_t>& interactions) {
  std::vector<double> d2;
  d2.reserve(interactions.size());
  for (auto k : interactions) d2.push_back(model.interactions.at(k).variance());
  return d2;
}

}  // namespace spinflip
