#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corenet/compressor.hpp"
#include "corenet/dataset.hpp"
#include "corenet/network.hpp"

namespace corenet {

// Mean over points of ||f_hat(x) - f(x)||_1.
double relative_error(const Network& compressed, const Network& original,
                      const DenseMatrix& points);

// acc(original) - acc(compressed) on labeled points.
double accuracy_drop(const Network& original, const Network& compressed, const Dataset& data);

// Fraction of points with f(x)_y <= gamma + max_{i != y} f(x)_i.
double margin_loss(const Network& net, double gamma, const Dataset& data);

struct GeneralizationBoundInput {
  double gamma = 0.0;
  std::size_t n = 0;
  double max_output_norm_sq = 0.0;  // max over P of ||f(x)||_2^2
  std::size_t num_layers = 0;       // L
  // Per weight layer: product of delta_hat from that layer to the last, and
  // the sum of neuron sensitivities in that layer.
  std::vector<double> delta_products;
  std::vector<double> sensitivity_sums;
  double margin_loss = 0.0;  // empirical L_gamma

  void validate() const;
};

// L_gamma + sqrt(max||f||^2 L^2 sum_l (prod delta_hat)^2 sum_i S_i / (gamma^2 n)),
// with the hidden constant taken as 1.
double generalization_bound(const GeneralizationBoundInput& input);

inline constexpr const char* kBoundConvention =
    "diagnostic only: O-tilde constant taken as 1, no log factors";

// Fills the bound input from a compression outcome on `data`.
GeneralizationBoundInput bound_input(const Network& net, const Dataset& data, double gamma,
                                     const CompressionOutcome& outcome);

enum class Scheme { kCoreNet, kCoreNetPlus, kCoreNetPlusPlus, kUniform, kL1, kL2, kHybrid, kSvd };

const char* to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

struct SweepConfig {
  std::vector<Scheme> schemes;
  std::vector<double> fractions;
  std::size_t trials = 1;
  CompressionConfig base;  // seed, eps, delta, constants; sizing is overridden
  unsigned jobs = 1;

  void validate() const;
};

struct SweepPoint {
  std::string scheme;
  double fraction = 0.0;
  std::size_t trial_count = 0;
  double size = 0.0;  // mean size(theta_hat) over trials
  double err_mean = 0.0;
  double err_std = 0.0;
  double accdrop_mean = 0.0;
  double accdrop_std = 0.0;
  std::optional<std::string> error;
};

struct CompressionReport {
  std::vector<SweepPoint> points;  // scheme-major, fractions ascending
  std::size_t trials = 0;
  std::size_t original_size = 0;
  std::string network_digest;
  std::string data_digest;
  std::string config_digest;
};

// Compresses with every (scheme, fraction, trial) using the validation split
// and evaluates on the test split. Cell failures are recorded, not thrown.
CompressionReport sweep(const Network& net, const Dataset& data, const SweepConfig& config);

// One CSV row per cell: scheme,fraction,trial_count,size,err_mean,err_std,accdrop_mean,accdrop_std
std::string report_csv(const CompressionReport& report);

// Population mean and standard deviation.
std::pair<double, double> mean_std(std::span<const double> values);

}  // namespace corenet
