#pragma once

#include <atomic>
#include <cstdint>

namespace corenet {

// Warning counters shared by concurrent workers.
struct Diagnostics {
  std::atomic<std::uint64_t> delta_capped{0};
  std::atomic<std::uint64_t> uniform_fallback{0};
  std::atomic<std::uint64_t> skipped_points{0};
  std::atomic<std::uint64_t> amplification_fallback{0};
  std::atomic<std::uint64_t> inactive_neurons{0};
};

inline void bump(std::atomic<std::uint64_t>* counter) {
  if (counter != nullptr) counter->fetch_add(1, std::memory_order_relaxed);
}

}  // namespace corenet
