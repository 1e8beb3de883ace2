#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "spinflip/model.hpp"
#include "spinflip/replica.hpp"

namespace spinflip {

struct McPlan {
  std::uint64_t seed = 1;
  std::uint64_t n_samples = 10000;
  double z_threshold = 4.0;
  unsigned parallel_width = 1;  // 0 = hardware concurrency
};

void validate(const McPlan& plan);

// Streaming count, mean and sum of squared deviations (Welford), with a
// pairwise merge for combining partial results.
class Accumulator {
 public:
  void add(double x);
  void merge(const Accumulator& other);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double m2() const { return m2_; }
  // Unbiased (n - 1) sample variance; 0 for fewer than two values.
  double variance() const;
  double std_error() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
};

Estimate estimate(const Accumulator& acc);

// Samples are grouped in fixed blocks of this size. Each block is accumulated
// sequentially and the blocks are merged in index order, so the result does
// not depend on the number of workers.
inline constexpr std::uint64_t kSampleBlock = 64;

// fn(sample_index, out) writes n_outputs values for one disorder sample.
using SampleFunction = std::function<void(std::uint64_t, std::span<double>)>;

std::vector<Accumulator> run_samples(const McPlan& plan, std::size_t n_outputs,
                                     const SampleFunction& fn);

// Av of the per-sample covariance_moment, with disorder drawn per sample index.
Estimate quenched_moment(const ModelSpec& model, const McPlan& plan, const FlipRegion& flip,
                         std::span<const ReplicaSpec> specs, std::span<const ReplicaPair> pairs,
                         const FlipRegion& region);

struct ScalarResult {
  Estimate estimate;
  Accumulator accumulator;
};

// Functional of a single disorder copy (copy 0 of each sample index).
using SampleFunctional = std::function<double(const DisorderSample&)>;

ScalarResult quenched_scalar(const ModelSpec& model, const McPlan& plan,
                             const SampleFunctional& functional);

struct Comparison {
  bool pass = false;
  double z_score = 0.0;
};

// |a - b| <= z * sqrt(sa^2 + sb^2). Exact estimates (both errors zero) are
// compared at 1e-9 and report z = 0 on a match, infinity otherwise.
Comparison compare(const Estimate& a, const Estimate& b, double z);

inline constexpr double kExactTolerance = 1e-9;

}  // namespace spinflip
