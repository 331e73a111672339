#pragma once

#include <cstdint>

namespace adamprecond {

// xorshift64* stream, state seeded through one splitmix64 round so that
// seed 0 and neighbouring seeds give unrelated streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // uniform on [0, 1) with 53 random bits
  double uniform();
  double uniform(double lo, double hi);
  // Box-Muller, both variates used in order
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t& x);

// Independent sub-stream seed for (seed, stream) pairs.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace adamprecond
