#include "corenet/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "corenet/error.hpp"
#include "corenet/parallel.hpp"

namespace corenet {

void SensitivityConstants::validate() const {
  if (!(k > 0.0) || !(k_prime > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "sensitivity constants K and K' must be positive");
  }
}

ImportanceRow relative_importance(std::span<const double> weights,
                                  std::span<const double> activations) {
  if (weights.size() != activations.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "relative_importance: weights vs activations");
  }
  ImportanceRow row;
  row.g.assign(weights.size(), 0.0);
  double denom = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) denom += weights[j] * activations[j];
  if (!(denom > 0.0)) {
    row.inactive = true;
    return row;
  }
  for (std::size_t j = 0; j < weights.size(); ++j) {
    row.g[j] = weights[j] * activations[j] / denom;
  }
  return row;
}

EdgeSensitivities empirical_sensitivity(std::span<const std::size_t> edges,
                                        std::span<const double> weights,
                                        const DenseMatrix& activations) {
  if (edges.size() != weights.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "empirical_sensitivity: edges vs weights");
  }
  EdgeSensitivities out;
  out.edges.assign(edges.begin(), edges.end());
  out.weights.assign(weights.begin(), weights.end());
  out.sensitivity.assign(edges.size(), 0.0);
  std::vector<double> gathered(edges.size());
  for (std::size_t p = 0; p < activations.rows(); ++p) {
    const auto a = activations.row(p);
    for (std::size_t j = 0; j < edges.size(); ++j) gathered[j] = a[edges[j]];
    const ImportanceRow g = relative_importance(weights, gathered);
    if (g.inactive) continue;
    out.inactive = false;
    for (std::size_t j = 0; j < edges.size(); ++j) {
      out.sensitivity[j] = std::max(out.sensitivity[j], g.g[j]);
    }
  }
  for (double s : out.sensitivity) out.total += s;
  return out;
}

NeuronSensitivity neuron_sensitivity(const SparseRow& row, std::size_t input_dim,
                                     const DenseMatrix& points) {
  std::vector<std::size_t> pos_idx, neg_idx;
  std::vector<double> pos_w, neg_w;
  NeuronSensitivity ns;
  for (const auto& e : row) {
    if (e.col >= input_dim) {
      ns.bias = e;
    } else if (e.value > 0.0) {
      pos_idx.push_back(e.col);
      pos_w.push_back(e.value);
    } else if (e.value < 0.0) {
      neg_idx.push_back(e.col);
      neg_w.push_back(-e.value);
    }
  }
  ns.positive = empirical_sensitivity(pos_idx, pos_w, points);
  ns.negative = empirical_sensitivity(neg_idx, neg_w, points);
  ns.point_count = points.rows();
  return ns;
}

DenseMatrix split_signed_points(const DenseMatrix& points) {
  const std::size_t n = points.rows();
  DenseMatrix out(2 * n, points.cols());
  for (std::size_t p = 0; p < n; ++p) {
    const auto x = points.row(p);
    for (std::size_t j = 0; j < x.size(); ++j) {
      out(p, j) = std::max(x[j], 0.0);
      out(n + p, j) = std::max(-x[j], 0.0);
    }
  }
  return out;
}

bool has_negative(const DenseMatrix& points) {
  return std::any_of(points.data().begin(), points.data().end(), [](double v) { return v < 0; });
}

LayerSensitivity layer_sensitivity(const Network& net, std::size_t layer,
                                   const DenseMatrix& layer_inputs, unsigned jobs) {
  const WeightMatrix& w = net.weight(layer);
  const std::size_t input_dim = net.layer_sizes()[layer];
  LayerSensitivity out;
  out.signed_inputs = has_negative(layer_inputs);
  const DenseMatrix split = out.signed_inputs ? split_signed_points(layer_inputs) : DenseMatrix{};
  const DenseMatrix& points = out.signed_inputs ? split : layer_inputs;
  out.neurons.resize(w.rows());
  parallel_for(w.rows(), jobs, [&](std::size_t i) {
    out.neurons[i] = neuron_sensitivity(w.row(i), input_dim, points);
  });
  return out;
}

SensitivityProfile sensitivity_profile(const Network& net, const ActivationCache& cache,
                                       unsigned jobs) {
  SensitivityProfile profile;
  profile.sample_points = cache.size();
  for (std::size_t k = 0; k < net.num_weight_layers(); ++k) {
    profile.layers.push_back(layer_sensitivity(net, k, cache.activations[k], jobs));
  }
  return profile;
}

double delta_neuron(double z_plus, double z_minus, const DeltaOptions& options,
                    std::atomic<std::uint64_t>* capped) {
  if (z_plus < 0.0 || z_minus < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "delta_neuron: parts must be nonnegative");
  }
  if (z_plus == 0.0 && z_minus == 0.0) return 1.0;
  const double denom = std::abs(z_plus - z_minus);
  if (denom == 0.0 || (z_plus + z_minus) / denom > options.cap) {
    bump(capped);
    return options.cap;
  }
  return (z_plus + z_minus) / denom;
}

double kappa(double lambda_star, double eta, double eta_star, double delta) {
  const double root = std::sqrt(2.0 * lambda_star);
  return root * (1.0 + root * std::log(8.0 * eta * eta_star / delta));
}

std::vector<std::vector<double>> neuron_deltas(const Network& net, std::size_t layer,
                                               const DenseMatrix& layer_inputs,
                                               const DeltaOptions& options, Diagnostics* diag) {
  const WeightMatrix& w = net.weight(layer);
  const std::size_t input_dim = net.layer_sizes()[layer];
  const std::size_t n = layer_inputs.rows();
  std::vector<std::vector<double>> out(w.rows(), std::vector<double>(n));
  std::atomic<std::uint64_t>* capped = diag ? &diag->delta_capped : nullptr;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const SparseRow row = w.row(i);
    for (std::size_t p = 0; p < n; ++p) {
      const auto a = layer_inputs.row(p);
      // With a = a_pos - a_neg, positive mass is w+ a_pos + |w-| a_neg and
      // negative mass is w+ a_neg + |w-| a_pos. Nonnegative inputs have a_neg = 0.
      double z_plus = 0.0;
      double z_minus = 0.0;
      for (const auto& e : row) {
        const double x = e.col < input_dim ? a[e.col] : 1.0;
        const double contrib = e.value * x;
        if (contrib > 0.0) {
          z_plus += contrib;
        } else {
          z_minus -= contrib;
        }
      }
      out[i][p] = delta_neuron(z_plus, z_minus, options, capped);
    }
  }
  return out;
}

DeltaEstimates delta_hat(const Network& net, const ActivationCache& cache,
                         const SensitivityConstants& constants, double delta,
                         const DeltaOptions& options, Diagnostics* diag, unsigned jobs) {
  if (cache.size() == 0) throw Error(ErrorKind::kInsufficientData, "delta_hat: empty subsample");
  constants.validate();
  DeltaEstimates est;
  est.kappa = kappa(constants.lambda_star(), static_cast<double>(net.total_neurons()),
                    static_cast<double>(net.max_width()), delta);
  const std::size_t layers = net.num_weight_layers();
  est.per_neuron.resize(layers);
  est.per_layer.resize(layers);
  parallel_for(layers, jobs, [&](std::size_t k) {
    const auto deltas = neuron_deltas(net, k, cache.activations[k], options, diag);
    auto& layer = est.per_neuron[k];
    layer.resize(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      double sum = 0.0;
      for (double d : deltas[i]) sum += d;
      layer[i] = sum / static_cast<double>(deltas[i].size()) + est.kappa;
    }
    est.per_layer[k] = *std::max_element(layer.begin(), layer.end());
  });
  return est;
}

EpsilonSchedule epsilon_schedule(double epsilon, double delta, std::size_t num_layers,
                                 std::span<const double> layer_delta_hat) {
  if (num_layers < 2) {
    throw Error(ErrorKind::kInvalidArgument, "epsilon_schedule: need L >= 2");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "epsilon_schedule: eps must be in (0,1] and delta in (0,1)");
  }
  if (layer_delta_hat.size() != num_layers - 1) {
    throw Error(ErrorKind::kDimensionMismatch, "epsilon_schedule: one delta_hat per weight layer");
  }
  EpsilonSchedule s;
  s.epsilon = epsilon;
  s.delta = delta;
  s.epsilon_prime = epsilon / (2.0 * static_cast<double>(num_layers - 1));
  s.layer_epsilon.assign(num_layers, 0.0);
  s.layer_epsilon.back() = s.epsilon_prime;
  for (std::size_t k = num_layers - 1; k-- > 0;) {
    if (!(layer_delta_hat[k] >= 1.0)) {
      throw Error(ErrorKind::kInvalidArgument, "epsilon_schedule: delta_hat must be >= 1");
    }
    s.layer_epsilon[k] = s.layer_epsilon[k + 1] / layer_delta_hat[k];
  }
  return s;
}

std::size_t subsample_size(double eta, double eta_star, double delta, double k_prime) {
  if (!(eta > 0.0 && eta_star > 0.0 && delta > 0.0 && k_prime > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "subsample_size: arguments must be positive");
  }
  const double raw = std::ceil(k_prime * std::log(8.0 * eta * eta_star / delta));
  return raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
}

std::uint64_t sample_complexity(double sensitivity_sum, double k, double layer_epsilon,
                                double eta, double delta) {
  if (!(sensitivity_sum > 0.0)) {
    throw Error(ErrorKind::kNoPositiveMass, "sample_complexity: no positive mass");
  }
  if (!(layer_epsilon > 0.0 && layer_epsilon < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "sample_complexity: eps_l must be in (0,1)");
  }
  const double raw = std::ceil(8.0 * sensitivity_sum * k * std::log(8.0 * eta / delta) /
                               (layer_epsilon * layer_epsilon));
  if (!(raw < static_cast<double>(kMaxSamples))) return kMaxSamples;
  return raw < 1.0 ? 1 : static_cast<std::uint64_t>(raw);
}

}  // namespace corenet
