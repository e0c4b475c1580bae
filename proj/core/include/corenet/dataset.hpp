#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "corenet/linalg.hpp"

namespace corenet {

enum class Split : std::uint8_t { kTrain, kValidation, kTest };

struct Dataset {
  DenseMatrix features;  // n x d
  std::vector<int> labels;
  int num_classes = 0;
  std::vector<Split> splits;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols(); }
  std::span<const double> point(std::size_t i) const { return features.row(i); }

  // Throws if labels fall outside [0, num_classes) or features are non-finite.
  void validate() const;

  std::vector<std::size_t> indices_of(Split split) const;
  Dataset subset(std::span<const std::size_t> indices) const;
  Dataset split(Split which) const { return subset(indices_of(which)); }
};

struct SplitFractions {
  double train = 0.6;
  double validation = 0.2;
  // Remainder is test.
};

// Reassigns split tags by a seeded shuffle.
void assign_splits(Dataset& data, const SplitFractions& fractions, std::uint64_t seed);

// CSV with a header row; first column is the integer label, the rest features.
// Every loaded row is tagged kTest until assign_splits is called.
Dataset load_csv(const std::filesystem::path& path);
void save_csv(const Dataset& data, const std::filesystem::path& path);

// Isotropic Gaussian blobs with class means drawn on a sphere of radius `separation`.
Dataset make_blobs(std::size_t n, int classes, std::size_t dim, double separation,
                   std::uint64_t seed);

// 8x8 digit-like glyphs in [0, 1] with jitter, stroke noise and random one-pixel shifts.
Dataset make_digits(std::size_t n, std::uint64_t seed, double noise = 0.15);

}  // namespace corenet
