#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "corenet/diagnostics.hpp"
#include "corenet/linalg.hpp"
#include "corenet/network.hpp"

namespace corenet {

// K and K' bound the relative-importance distribution; lambda* = K'/2 bounds
// the subexponential tail of the delta ratio.
struct SensitivityConstants {
  double k = 2.0;
  double k_prime = 2.0;

  double lambda_star() const { return k_prime / 2.0; }
  // Multiplier relating empirical sensitivity to the true importance (3K).
  double importance_multiplier() const { return 3.0 * k; }
  void validate() const;
};

// g_j(x) = w_j a_j(x) / sum_k w_k a_k(x) over one index set with positive
// weights. A zero denominator yields an all-zero row flagged inactive.
struct ImportanceRow {
  std::vector<double> g;
  bool inactive = false;
};

ImportanceRow relative_importance(std::span<const double> weights,
                                  std::span<const double> activations);

// Sensitivities of one sign class (W+ or W-) of a neuron's incoming edges.
struct EdgeSensitivities {
  std::vector<std::size_t> edges;   // column indices into the weight row
  std::vector<double> weights;      // |w_j| > 0
  std::vector<double> sensitivity;  // s_j in [0, 1]
  double total = 0.0;               // S+ or S-
  bool inactive = true;             // no point had a positive denominator

  std::size_t size() const { return edges.size(); }
};

// s_j = max over rows x of `activations` of g_j(x), where g is taken over
// `edges` with the given positive weights.
EdgeSensitivities empirical_sensitivity(std::span<const std::size_t> edges,
                                        std::span<const double> weights,
                                        const DenseMatrix& activations);

struct NeuronSensitivity {
  EdgeSensitivities positive;
  EdgeSensitivities negative;
  std::optional<SparseEntry> bias;  // kept deterministically, never sampled
  std::size_t point_count = 0;  // size of the point set the maxima range over

  double total() const { return positive.total + negative.total; }
};

// Splits `row` (columns < input_dim are edges, column input_dim is the bias)
// into W+ and W- and computes both sensitivity sets over `points`.
NeuronSensitivity neuron_sensitivity(const SparseRow& row, std::size_t input_dim,
                                     const DenseMatrix& points);

struct LayerSensitivity {
  std::vector<NeuronSensitivity> neurons;
  bool signed_inputs = false;  // inputs decomposed into positive and negative parts
};

struct SensitivityProfile {
  std::vector<LayerSensitivity> layers;  // one per weight layer
  std::size_t sample_points = 0;         // |S|
};

// Positive and negative parts of every row, stacked: [max(x,0); max(-x,0)].
DenseMatrix split_signed_points(const DenseMatrix& points);
bool has_negative(const DenseMatrix& points);

// Sensitivities of every neuron in weight layer `layer`, from the cached
// inputs to that layer. Signed inputs use the positive/negative decomposition.
LayerSensitivity layer_sensitivity(const Network& net, std::size_t layer,
                                   const DenseMatrix& layer_inputs, unsigned jobs = 1);

SensitivityProfile sensitivity_profile(const Network& net, const ActivationCache& cache,
                                       unsigned jobs = 1);

struct DeltaOptions {
  double cap = 1e6;
};

// (z+ + z-) / |z+ - z-|; 1 when both are zero; capped (and counted) when
// the two cancel exactly or the ratio exceeds the cap.
double delta_neuron(double z_plus, double z_minus, const DeltaOptions& options = {},
                    std::atomic<std::uint64_t>* capped = nullptr);

struct DeltaEstimates {
  double kappa = 0.0;
  std::vector<std::vector<double>> per_neuron;  // [layer][neuron]
  std::vector<double> per_layer;                // max over neurons
};

// kappa = sqrt(2 lambda*) (1 + sqrt(2 lambda*) log(8 eta eta* / delta)).
double kappa(double lambda_star, double eta, double eta_star, double delta);

// Mean of delta_i(x) over the cached points plus kappa, per neuron.
DeltaEstimates delta_hat(const Network& net, const ActivationCache& cache,
                         const SensitivityConstants& constants, double delta,
                         const DeltaOptions& options = {}, Diagnostics* diag = nullptr,
                         unsigned jobs = 1);

// Per-point delta ratios of each neuron in weight layer `layer`.
std::vector<std::vector<double>> neuron_deltas(const Network& net, std::size_t layer,
                                               const DenseMatrix& layer_inputs,
                                               const DeltaOptions& options = {},
                                               Diagnostics* diag = nullptr);

struct EpsilonSchedule {
  double epsilon = 0.0;
  double delta = 0.0;
  double epsilon_prime = 0.0;
  // layer_epsilon[k] is eps_{k+2} for k = 0..L-1; the last entry is eps_{L+1}.
  std::vector<double> layer_epsilon;

  double for_weight_layer(std::size_t k) const { return layer_epsilon.at(k); }
};

// eps' = eps / (2 (L-1)), eps_{L+1} = eps', eps_l = eps_{l+1} / delta_hat^l.
// `layer_delta_hat` has one entry per weight layer (l = 2..L).
EpsilonSchedule epsilon_schedule(double epsilon, double delta, std::size_t num_layers,
                                 std::span<const double> layer_delta_hat);

// ceil(K' log(8 eta eta* / delta)), at least 1.
std::size_t subsample_size(double eta, double eta_star, double delta, double k_prime);

// ceil(8 S K log(8 eta / delta) / eps_l^2), saturating at kMaxSamples.
inline constexpr std::uint64_t kMaxSamples = std::uint64_t{1} << 53;
std::uint64_t sample_complexity(double sensitivity_sum, double k, double layer_epsilon,
                                double eta, double delta);

}  // namespace corenet
