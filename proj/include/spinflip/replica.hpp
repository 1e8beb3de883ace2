#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spinflip/model.hpp"

namespace spinflip {

inline constexpr std::size_t kDefaultEnumerationLimit = 20;

class EnumerationLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// One replica of the interpolated state: weight exp(-beta * sign * H_angle).
struct ReplicaSpec {
  double angle = 0.0;
  int sign = +1;
};

// Shared quenched disorder for a family of replicas:
//   copy 0 drives the interactions outside the flip region,
//   copies 1 and 2 are the two independent inside Hamiltonians.
// H_t = cos(t) H^(1)_in + sin(t) H^(2)_in + H^(0)_out.
class ReplicaEnsemble {
 public:
  ReplicaEnsemble(const ModelSpec& model, FlipRegion flip, DisorderSample outside,
                  DisorderSample inside1, DisorderSample inside2);

  const ModelSpec& model() const { return *model_; }
  const FlipRegion& flip() const { return flip_; }
  const DisorderSample& copy(std::size_t id) const { return copies_.at(id); }

  // c_X such that H_t(sigma) = -sum_X c_X sigma_X.
  std::vector<double> hamiltonian_coefficients(double angle) const;
  // a_X such that the log-weight is sum_X a_X sigma_X (= beta * sign * c_X).
  std::vector<double> exponent_coefficients(const ReplicaSpec& spec) const;

 private:
  const ModelSpec* model_;  // not owned; must outlive the ensemble
  FlipRegion flip_;
  std::array<DisorderSample, 3> copies_;
};

// Draws copies 0, 1, 2 for one sample index.
ReplicaEnsemble make_ensemble(const ModelSpec& model, const FlipRegion& flip,
                              const NormalStream& stream, std::uint64_t sample_index);

struct GibbsTable {
  std::vector<double> weights;  // indexed by configuration index
  double log_partition = 0.0;
};

// log-weights sum_X a_X sigma_X over all 2^N configurations (Gray-code sweep).
std::vector<double> log_weights(const ModelSpec& model, std::span<const double> coefficients,
                                std::size_t limit = kDefaultEnumerationLimit);
// Max-shifted log-sum-exp.
double log_sum_exp(std::span<const double> values);
GibbsTable gibbs_from_coefficients(const ModelSpec& model, std::span<const double> coefficients,
                                   std::size_t limit = kDefaultEnumerationLimit);

double interp_exponent(const ReplicaEnsemble& ensemble, const ReplicaSpec& spec,
                       const SpinConfig& sigma);
GibbsTable gibbs_table(const ReplicaEnsemble& ensemble, const ReplicaSpec& spec,
                       std::size_t limit = kDefaultEnumerationLimit);
double pressure(const ReplicaEnsemble& ensemble, const ReplicaSpec& spec,
                std::size_t limit = kDefaultEnumerationLimit);

// P(J) - P(J with the inside couplings reversed), one sample for the whole volume.
double pressure_difference(const ModelSpec& model, const DisorderSample& sample,
                           const FlipRegion& flip, std::size_t limit = kDefaultEnumerationLimit);

// omega_spec(H_angle): the ensemble Hamiltonian at the replica's angle averaged
// in the replica's own state.
double internal_energy(const ReplicaEnsemble& ensemble, const ReplicaSpec& spec,
                       std::size_t limit = kDefaultEnumerationLimit);

// One-replica expectations over the region's interaction list:
//   v[a] = omega(sigma_Xa), M[a][b] = omega(sigma_Xa sigma_Xb).
struct ExpectationMaps {
  std::vector<std::size_t> interactions;
  std::vector<double> v;
  std::vector<double> M;  // row-major K x K

  std::size_t size() const { return interactions.size(); }
  double m(std::size_t a, std::size_t b) const { return M[a * interactions.size() + b]; }
};

ExpectationMaps expectation_maps(const ModelSpec& model, const GibbsTable& table,
                                 const std::vector<std::size_t>& interactions);
ExpectationMaps expectation_maps(const ReplicaEnsemble& ensemble, const ReplicaSpec& spec,
                                 const FlipRegion& region,
                                 std::size_t limit = kDefaultEnumerationLimit);

// Replica indices (0-based) of one covariance factor C_{a,b}.
using ReplicaPair = std::pair<std::size_t, std::size_t>;

// omega(prod_k C_{pairs[k]}) for up to two factors, assembled from per-replica
// maps: a replica in both factors contributes M(X,Y), in one factor v(X) or v(Y).
// d2 holds Delta^2 for the maps' interaction list.
double factorized_moment(std::span<const double> d2, std::span<const ExpectationMaps* const> maps,
                         std::span<const ReplicaPair> pairs);

// Per-sample product-state moment over the region's interactions.
double covariance_moment(const ReplicaEnsemble& ensemble, std::span<const ReplicaSpec> specs,
                         std::span<const ReplicaPair> pairs, const FlipRegion& region,
                         std::size_t limit = kDefaultEnumerationLimit);

// Same quantity by direct summation over all R-replica configurations.
// Intended as an oracle; refuses more than 2^24 joint states.
double covariance_moment_direct(const ReplicaEnsemble& ensemble, std::span<const ReplicaSpec> specs,
                                std::span<const ReplicaPair> pairs, const FlipRegion& region);

// The five per-sample moments entering the Lemma-1 integrand at (t, s):
//   c12          omega_{t,s}(C12)
//   c12_sq       omega_{t,s}(C12^2)
//   c12c23_tst   omega_{t,s,t}(C12 C23)   (middle replica at s)
//   c12c23_sts   omega_{s,t,s}(C12 C23)   (middle replica at t)
//   c12c34       omega_{t,s,s,t}(C12 C34)
struct NodeMoments {
  double c12 = 0.0;
  double c12_sq = 0.0;
  double c12c23_tst = 0.0;
  double c12c23_sts = 0.0;
  double c12c34 = 0.0;
};

NodeMoments node_moments(std::span<const double> d2, const ExpectationMaps& at_t,
                         const ExpectationMaps& at_s);

// sum_{X,Y} D_X D_Y [M_t - v_t v_t](X,Y) [M_s - v_s v_s](X,Y), unnormalised.
double truncated_correlation_sum(std::span<const double> d2, const ExpectationMaps& at_t,
                                 const ExpectationMaps& at_s);

}  // namespace spinflip
