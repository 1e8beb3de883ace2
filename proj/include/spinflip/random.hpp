#pragma once

#include <array>
#include <cstdint>

namespace spinflip {

// Philox4x32-10 (Salmon et al., SC'11). A stateless bijection of a 128-bit
// counter under a 64-bit key; every draw in the project is addressed by a
// counter, so results never depend on evaluation order.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);
};

// Maps the top 53 bits of (hi, lo) to a double in [0, 1).
double uniform_from_bits(std::uint32_t hi, std::uint32_t lo);

// Two independent standard normals from one Philox block (Box-Muller on
// 53-bit uniforms; the radial uniform is taken in (0, 1] so the log is finite).
std::array<double, 2> gaussian_pair(const Philox4x32::Counter& counter,
                                    const Philox4x32::Key& key);

// Addressable source of standard normal variates.
//
// The variate for (sample, copy, index) is component index % 2 of the Box-Muller
// pair produced by the counter {index / 2, copy, sample_lo, sample_hi} under
// the key {seed_lo, seed_hi}.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  double operator()(std::uint64_t sample, std::uint32_t copy, std::uint64_t index) const;

 private:
  std::uint64_t seed_;
};

}  // namespace spinflip
