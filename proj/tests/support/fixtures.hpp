#pragma once

#include <cmath>
#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "corenet/linalg.hpp"
#include "corenet/network.hpp"
#include "corenet/rng.hpp"

namespace corenet::testing {

// Gaussian weights scaled by 1/sqrt(fan-in), bias column included.
inline Network random_network(const std::vector<std::size_t>& sizes, std::uint64_t seed,
                              double scale = 1.0) {
  RngStream rng(seed, StreamId{.purpose = 901});
  std::vector<WeightMatrix> weights;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    DenseMatrix w(sizes[k + 1], sizes[k] + 1);
    const double s = scale / std::sqrt(static_cast<double>(sizes[k]));
    for (double& v : w.data()) v = s * rng.normal();
    weights.emplace_back(std::move(w));
  }
  return Network(sizes, std::move(weights), true);
}

inline DenseMatrix random_points(std::size_t n, std::size_t dim, std::uint64_t seed,
                                 bool nonnegative = false) {
  RngStream rng(seed, StreamId{.purpose = 902});
  DenseMatrix x(n, dim);
  for (double& v : x.data()) v = nonnegative ? rng.uniform() : rng.normal();
  return x;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("corenet_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace corenet::testing
