#include "fracdisk/rng.hpp"

#include <cmath>

namespace fracdisk {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream RngStream::child(std::uint64_t index) const {
  return {seed, splitmix64(stream_id ^ splitmix64(index ^ 0xD1B54A32D192ED03ULL))};
}

Rng::Rng(const RngStream& stream, Channel channel) {
  std::uint64_t key = splitmix64(stream.seed);
  key = splitmix64(key ^ stream.stream_id);
  key = splitmix64(key ^ static_cast<std::uint64_t>(channel));
  engine_.seed(key);
}

double Rng::exponential() { return -std::log(uniform()); }

}  // namespace fracdisk
