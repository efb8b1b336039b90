#pragma once

#include <array>
#include <cstdint>

namespace chemtau {

// Counter-keyed xoshiro256++ stream. Each (seed, stream) pair yields an
// independent deterministic sequence, so an ensemble can assign
// stream = trajectory index and merge results in index order regardless
// of how trajectories are scheduled across threads.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();

  // Exponential waiting time with the given rate (rate > 0).
  double exponential(double rate);

  // Exact Poisson sample: product-of-uniforms below mean 10, Hoermann's
  // PTRS transformed rejection above. No normal approximation at any mean.
  long long poisson(double mean);

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace chemtau
