#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spinflip/random.hpp"

namespace spinflip {

// Raised for malformed model descriptions and invalid parameters.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ModelKind { random_field, sk, ea_chain, ea_grid, custom };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

// A site label is an integer tuple (a chain index, grid coordinates, ...).
using SiteLabel = std::vector<int>;

// Ordered, duplicate-free set of site labels. Positions in the lexicographic
// order of the labels are the site indices used everywhere else.
class SiteSet {
 public:
  SiteSet() = default;
  explicit SiteSet(std::vector<SiteLabel> labels);

  static SiteSet range(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  const SiteLabel& label(std::size_t index) const { return labels_.at(index); }
  const std::vector<SiteLabel>& labels() const { return labels_; }
  std::size_t index_of(const SiteLabel& label) const;

 private:
  std::vector<SiteLabel> labels_;
};

struct Interaction {
  std::vector<std::size_t> sites;  // sorted site indices, nonempty
  double delta = 0.0;              // standard deviation of J_X

  double variance() const { return delta * delta; }
  std::uint64_t mask() const;
};

struct ModelSpec {
  SiteSet sites;
  std::vector<Interaction> interactions;
  double beta = 1.0;
  ModelKind kind = ModelKind::custom;
  // (1/|Lambda|) * sum_X Delta_X^2
  double stability_constant = 0.0;

  std::size_t size() const { return sites.size(); }
  // sum_X Delta_X^2 == C(sigma, sigma)
  double variance_sum() const;
};

struct SizeParams {
  std::size_t sites = 0;            // random_field, sk, ea_chain
  std::vector<std::size_t> dims;    // ea_grid
  std::vector<Interaction> custom;  // custom
};

// Validates and assembles a model: drops zero-delta interactions, sorts and
// checks each subset, computes the stability constant.
ModelSpec make_model(ModelKind kind, SiteSet sites, std::vector<Interaction> raw, double beta);

// Standard families: random_field (Delta=1 on singletons), sk (Delta^2=1/N on
// all pairs), ea_chain (open chain, Delta=1 on bonds), ea_grid (open
// hypercubic grid, Delta=1 on nearest-neighbour bonds), custom.
ModelSpec build_model(ModelKind kind, const SizeParams& size, double beta);

// {"kind": ..., "sites": N | "dims": [..], "beta": b,
//  "interactions": [{"sites": [..], "delta": d}, ...]}   (custom only)
ModelSpec model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const ModelSpec& model);

struct SpinConfig {
  std::vector<int> spins;  // each +1 or -1
  std::uint64_t index = 0;

  // Bit i of the index set <=> spin i is -1.
  static SpinConfig from_index(std::size_t n, std::uint64_t index);
  static SpinConfig from_spins(std::vector<int> spins);
};

// sigma_X as +-1 for the configuration with the given index.
inline int spin_product(std::uint64_t config, std::uint64_t mask) {
  return (__builtin_popcountll(config & mask) & 1) ? -1 : 1;
}

int spin_product(const SpinConfig& sigma, const Interaction& x);

// Partition of the interactions by "X subset of region".
struct FlipRegion {
  std::vector<std::size_t> sites;    // sorted site indices of Lambda'
  std::vector<std::size_t> inside;   // interaction indices with X in Lambda'
  std::vector<std::size_t> outside;  // the rest

  std::size_t volume() const { return sites.size(); }
};

FlipRegion make_flip_region(const ModelSpec& model, std::vector<std::size_t> sites);
FlipRegion full_region(const ModelSpec& model);
FlipRegion empty_region(const ModelSpec& model);

struct DisorderSample {
  std::vector<double> couplings;  // J_X, aligned with model.interactions
  std::uint32_t copy_id = 0;
  std::uint64_t sample_index = 0;
};

// J_X = Delta_X * z, z the stream variate at (sample_index, copy_id, X).
DisorderSample sample_disorder(const ModelSpec& model, const NormalStream& stream,
                               std::uint64_t sample_index, std::uint32_t copy_id);

// Copy of the sample with the couplings inside the region sign-reversed.
DisorderSample flip_inside(const DisorderSample& sample, const FlipRegion& region);

// -sum_X J_X sigma_X, with J_X -> -J_X inside the region when flipped.
double hamiltonian(const ModelSpec& model, const DisorderSample& sample, const SpinConfig& sigma,
                   const FlipRegion& region, bool flipped);

// sum over interactions inside the region of Delta_X^2 sigma_X tau_X.
double covariance(const ModelSpec& model, const SpinConfig& sigma, const SpinConfig& tau,
                  const FlipRegion& region);
double covariance(const ModelSpec& model, const SpinConfig& sigma, const SpinConfig& tau);

// covariance / |region|
double normalized_overlap(const ModelSpec& model, const SpinConfig& sigma, const SpinConfig& tau,
                          const FlipRegion& region);

// Delta_X^2 for each listed interaction.
std::vector<double> variances(const ModelSpec& model, const std::vector<std::size_t>& interactions);

}  // namespace spinflip
