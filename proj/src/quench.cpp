#include "spinflip/quench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace spinflip {

void validate(const McPlan& plan) {
  if (plan.n_samples < 2) throw std::invalid_argument("need at least two samples");
  if (!(plan.z_threshold > 0.0)) throw std::invalid_argument("z threshold must be positive");
}

void Accumulator::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void Accumulator::merge(const Accumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double d = other.mean_ - mean_;
  mean_ += d * nb / n;
  m2_ += other.m2_ + d * d * na * nb / n;
  n_ += other.n_;
}

double Accumulator::variance() const {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double Accumulator::std_error() const {
  return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

Estimate estimate(const Accumulator& acc) { return {acc.mean(), acc.std_error(), acc.count()}; }

std::vector<Accumulator> run_samples(const McPlan& plan, std::size_t n_outputs,
                                     const SampleFunction& fn) {
  validate(plan);
  const std::uint64_t n_blocks = (plan.n_samples + kSampleBlock - 1) / kSampleBlock;
  std::vector<std::vector<Accumulator>> blocks(n_blocks, std::vector<Accumulator>(n_outputs));

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    std::vector<double> out(n_outputs);
    while (true) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      const std::uint64_t begin = b * kSampleBlock;
      const std::uint64_t end = std::min(plan.n_samples, begin + kSampleBlock);
      try {
        for (std::uint64_t i = begin; i < end; ++i) {
          fn(i, out);
          for (std::size_t k = 0; k < n_outputs; ++k) blocks[b][k].add(out[k]);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_blocks);
        return;
      }
    }
  };

  unsigned width = plan.parallel_width == 0 ? std::thread::hardware_concurrency() : plan.parallel_width;
  width = std::max(1u, std::min<unsigned>(width, static_cast<unsigned>(n_blocks)));
  if (width == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < width; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<Accumulator> total(n_outputs);
  for (const auto& block : blocks) {
    for (std::size_t k = 0; k < n_outputs; ++k) total[k].merge(block[k]);
  }
  return total;
}

Estimate quenched_moment(const ModelSpec& model, const McPlan& plan, const FlipRegion& flip,
                         std::span<const ReplicaSpec> specs, std::span<const ReplicaPair> pairs,
                         const FlipRegion& region) {
  const NormalStream stream(plan.seed);
  const auto acc = run_samples(plan, 1, [&](std::uint64_t i, std::span<double> out) {
    const auto ensemble = make_ensemble(model, flip, stream, i);
    out[0] = covariance_moment(ensemble, specs, pairs, region);
  });
  return estimate(acc[0]);
}

ScalarResult quenched_scalar(const ModelSpec& model, const McPlan& plan,
                             const SampleFunctional& functional) {
  const NormalStream stream(plan.seed);
  const auto acc = run_samples(plan, 1, [&](std::uint64_t i, std::span<double> out) {
    out[0] = functional(sample_disorder(model, stream, i, 0));
  });
  return {estimate(acc[0]), acc[0]};
}

Comparison compare(const Estimate& a, const Estimate& b, double z) {
  const double diff = std::abs(a.mean - b.mean);
  const double err = std::hypot(a.std_error, b.std_error);
  if (err == 0.0) {
    const bool pass = diff <= kExactTolerance;
    return {pass, pass ? 0.0 : std::numeric_limits<double>::infinity()};
  }
  const double score = diff / err;
  return {score <= z, score};
}

}  // namespace spinflip
