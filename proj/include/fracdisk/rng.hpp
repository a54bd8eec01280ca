#pragma once

#include <cstdint>
#include <random>

namespace fracdisk {

// Reproducible stream identifier. Identical (seed, stream_id) pairs produce
// identical sample sequences; child() derives statistically independent
// sub-streams (one per Monte Carlo path, worker, ...) by hashing.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  RngStream child(std::uint64_t index) const;

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

// Purpose channels: each purpose draws from its own engine so that, e.g.,
// swapping the Brownian channel never perturbs the subordinator samples.
enum class Channel : std::uint64_t {
  Subordinator = 1,
  Brownian = 2,
  Jumps = 3,
  Auxiliary = 4,
};

std::uint64_t splitmix64(std::uint64_t x);

class Rng {
 public:
  Rng(const RngStream& stream, Channel channel);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double exponential();
  double normal() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace fracdisk
