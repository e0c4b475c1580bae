#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace corenet {

// Runs body(i) for i in [0, n) on up to `jobs` threads. Indices are handed out
// dynamically, so body(i) must only write state owned by i. The first
// exception thrown is rethrown after joining.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace corenet
