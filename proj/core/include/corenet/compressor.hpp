#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "corenet/diagnostics.hpp"
#include "corenet/network.hpp"
#include "corenet/sensitivity.hpp"
#include "corenet/sparsifier.hpp"

namespace corenet {

enum class CompressionMode { kCoreNet, kCoreNetPlus, kCoreNetPlusPlus };

const char* to_string(CompressionMode mode);
CompressionMode parse_mode(std::string_view text);

// Sample sizes from the error/failure targets.
struct TheorySizing {};
// Keep roughly `fraction` of each layer's nonzeros.
struct BudgetSizing {
  double fraction = 1.0;
};
using Sizing = std::variant<TheorySizing, BudgetSizing>;

struct CompressionConfig {
  double epsilon = 0.5;
  double delta = 0.1;
  CompressionMode mode = CompressionMode::kCoreNet;
  SensitivityConstants constants;
  Sizing sizing = TheorySizing{};
  std::uint64_t seed = 0;
  // |P'|: extend the guarantee to this many i.i.d. points.
  std::optional<std::size_t> generalize_points;
  SamplingScheme scheme = SamplingScheme::kSensitivity;
  // Recompute sensitivities through already-compressed layers.
  bool recompute_hatted = false;
  std::size_t max_amplification_trials = 25;
  DeltaOptions delta_options;
  unsigned jobs = 1;

  void validate() const;
};

struct AmplificationParams {
  std::size_t trials = 1;        // tau
  std::size_t holdout = 0;       // |T|
  double per_trial_delta = 0.0;  // delta / (4 |P| tau)
};

// tau = ceil(log(4 eta / delta) / log(10/9)), |T| = ceil(8 log(8 tau eta / delta)).
AmplificationParams amplification_params(double eta, double delta, std::size_t points = 1);

struct GeneralizedBudget {
  double delta_prime = 0.0;     // delta / (2 |P'|)
  std::size_t subsample = 0;    // |S| at delta_prime
  double log_term = 0.0;        // log(8 eta / delta_prime) = log(16 |P'| eta / delta)
  double sample_multiplier = 1.0;  // log_term / log(8 eta / delta)
};

GeneralizedBudget generalized_budget(double eta, double eta_star, double delta,
                                     std::size_t points, const SensitivityConstants& constants);

struct CompressionPlan {
  std::vector<std::size_t> subsample;  // S, indices into the validation points
  std::vector<std::size_t> holdout;    // T, disjoint from S
  double sampling_delta = 0.0;         // failure budget inside the log terms
  std::size_t required_subsample = 0;
  EpsilonSchedule schedule;
  DeltaEstimates delta_hat;
  std::vector<std::vector<NeuronBudget>> neurons;  // [weight layer][neuron]
  std::size_t formula_trials = 1;  // tau from the amplification formula
  std::size_t trials_used = 1;     // after the practical cap
  bool duplicate_draws_per_sign = true;
};

struct CompressedNetwork {
  Network network;                         // sparse layers, pruned dimensions
  std::vector<std::vector<bool>> pruned;   // [layer][neuron], layers 1..L
  std::string config_digest;
  std::string plan_digest;
  std::uint64_t seed = 0;
};

struct CompressionStats {
  std::size_t original_size = 0;
  std::size_t compressed_size = 0;
  std::vector<std::size_t> original_layer_nnz;
  std::vector<std::size_t> layer_nnz;
  std::size_t pruned_neurons = 0;
  bool no_compression = false;  // theory sizing kept every edge of every neuron
  std::uint64_t delta_capped = 0;
  std::uint64_t uniform_fallback = 0;
  std::uint64_t skipped_points = 0;
  std::uint64_t amplification_fallback = 0;
  std::uint64_t inactive_neurons = 0;
};

struct CompressionOutcome {
  CompressedNetwork compressed;
  CompressionPlan plan;
  SensitivityProfile profile;
  CompressionStats stats;
};

// Runs the full pipeline on `validation` (rows are input points).
CompressionOutcome compress(const Network& net, const DenseMatrix& validation,
                            const CompressionConfig& config);

// Hidden neurons whose activation is zero on every cached point.
std::vector<std::vector<bool>> prune_neurons(const Network& net, const ActivationCache& cache);

// Removes pruned neurons: their incoming rows and outgoing columns.
Network apply_pruning(const Network& net, const std::vector<std::vector<bool>>& pruned);

// Index of the candidate with least mean relative error on T; ties go to the
// lowest index. `hatted` and `original` are bias-augmented layer inputs on T.
std::size_t amplify_neuron(std::span<const SparseRow> candidates, const SparseRow& original_row,
                           const DenseMatrix& hatted, const DenseMatrix& original,
                           Diagnostics* diag = nullptr);

// Appends the bias constant to every row when bias_embedded.
DenseMatrix augment_rows(const DenseMatrix& points, bool bias_embedded);

}  // namespace corenet
