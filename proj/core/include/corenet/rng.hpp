#pragma once

#include <cstdint>
#include <random>

namespace corenet {

// Identifies one independent random stream. Streams with equal (seed, id)
// produce identical sequences regardless of which thread consumes them.
struct StreamId {
  std::uint64_t layer = 0;
  std::uint64_t neuron = 0;
  std::uint64_t sign = 0;
  std::uint64_t trial = 0;
  std::uint64_t purpose = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t seed, const StreamId& id);

class RngStream {
 public:
  RngStream(std::uint64_t seed, const StreamId& id) : engine_(derive_seed(seed, id)) {}
  explicit RngStream(std::uint64_t seed) : engine_(derive_seed(seed, StreamId{})) {}

  // Uniform in [0, 1) with 53 random bits; fixed mapping across platforms.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n);

  // Standard normal by Box-Muller.
  double normal();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace corenet
