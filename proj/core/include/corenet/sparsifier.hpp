#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "corenet/diagnostics.hpp"
#include "corenet/linalg.hpp"
#include "corenet/rng.hpp"
#include "corenet/sensitivity.hpp"

namespace corenet {

// Importance distribution q_j = s_j / sum(s) with an inverse-CDF table over
// the support (entries with q_j > 0).
class SamplingDistribution {
 public:
  explicit SamplingDistribution(std::span<const double> mass);
  static SamplingDistribution uniform(std::size_t n);

  std::size_t size() const { return probabilities_.size(); }
  const std::vector<double>& probabilities() const { return probabilities_; }
  const std::vector<std::size_t>& support() const { return support_; }

  std::size_t draw(RngStream& rng) const;

  // Multiplicities of m i.i.d. draws. Large m switches to sequential
  // conditional binomials, which has the same multinomial law.
  std::vector<std::uint64_t> counts(std::uint64_t m, RngStream& rng) const;

 private:
  std::vector<double> probabilities_;
  std::vector<std::size_t> support_;
  std::vector<double> cumulative_;  // over support_, last entry exactly 1
};

// Sum over j of 1 - (1 - q_j)^m: expected number of distinct indices drawn.
double expected_distinct(std::span<const double> probabilities, double m);

// Smallest m whose expected distinct count reaches `target`, or nullopt when
// the target is not below the support size (keep the set exactly).
std::optional<std::uint64_t> draws_for_distinct(std::span<const double> probabilities,
                                                double target);

// Draws m edges i.i.d. from q = s / sum(s) and reweights each sampled edge to
// count_j * w_j / (m q_j). A zero sensitivity sum falls back to uniform q.
SparseRow sparsify(std::span<const std::size_t> edges, std::span<const double> weights,
                   std::uint64_t m, std::span<const double> sensitivities, RngStream& rng,
                   Diagnostics* diag = nullptr);

// Same estimator for an explicit distribution.
SparseRow sparsify_with(std::span<const std::size_t> edges, std::span<const double> weights,
                        std::uint64_t m, const SamplingDistribution& q, RngStream& rng);

enum class SamplingScheme { kSensitivity, kUniform };

// How one sign class of a neuron is reduced.
struct ClassBudget {
  enum class Kind { kSample, kKeepAll, kKeepSupport, kDrop };
  Kind kind = Kind::kSample;
  std::uint64_t draws = 0;

  static ClassBudget sample(std::uint64_t m) { return {Kind::kSample, m}; }
  static ClassBudget keep_all() { return {Kind::kKeepAll, 0}; }
  static ClassBudget keep_support() { return {Kind::kKeepSupport, 0}; }
  static ClassBudget drop() { return {Kind::kDrop, 0}; }
};

const char* to_string(ClassBudget::Kind kind);

struct NeuronBudget {
  ClassBudget positive;
  ClassBudget negative;
};

// Sparsifies W+ and W- separately and consolidates w_hat = w_hat+ - w_hat-.
// The bias is copied unchanged. Streams: sign 0 for W+, 1 for W-.
SparseRow sparsify_neuron(const NeuronSensitivity& neuron, const NeuronBudget& budget,
                          std::uint64_t seed, StreamId stream,
                          SamplingScheme scheme = SamplingScheme::kSensitivity,
                          Diagnostics* diag = nullptr);

// The four parts of a first-layer pre-activation with signed input
// x = x_pos - x_neg: z = (pos_plus + neg_minus) - (neg_plus + pos_minus).
struct SignedParts {
  double pos_plus = 0.0;   // sum over W+ of w_j x_pos_j
  double neg_minus = 0.0;  // sum over W- of |w_j| x_neg_j
  double neg_plus = 0.0;   // sum over W+ of w_j x_neg_j
  double pos_minus = 0.0;  // sum over W- of |w_j| x_pos_j

  double z_plus() const { return pos_plus + neg_minus; }
  double z_minus() const { return neg_plus + pos_minus; }
};

// Decomposition of <row, x> over edge columns (< input_dim); bias excluded.
SignedParts signed_parts(const SparseRow& row, std::span<const double> x,
                         std::size_t input_dim);

// |<w_hat, a_hat> / <w, a> - 1|; nullopt when <w, a> = 0. Vectors are
// already bias-augmented.
std::optional<double> row_relative_error(const SparseRow& w_hat, const SparseRow& w,
                                         std::span<const double> hatted,
                                         std::span<const double> original);

struct SetError {
  double mean = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

// Mean of row_relative_error over matching rows of two (augmented) point sets.
SetError mean_relative_error(const SparseRow& w_hat, const SparseRow& w,
                             const DenseMatrix& hatted, const DenseMatrix& original);

}  // namespace corenet
