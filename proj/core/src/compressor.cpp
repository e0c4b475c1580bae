#include "corenet/compressor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "corenet/error.hpp"
#include "corenet/log.hpp"
#include "corenet/parallel.hpp"
#include "corenet/serialize.hpp"

namespace corenet {

namespace {

constexpr std::uint64_t kPurposeSparsify = 0;
constexpr std::uint64_t kPurposeSplit = 1;

using Mask = std::vector<std::vector<bool>>;

}  // namespace

const char* to_string(CompressionMode mode) {
  switch (mode) {
    case CompressionMode::kCoreNet: return "corenet";
    case CompressionMode::kCoreNetPlus: return "corenet+";
    case CompressionMode::kCoreNetPlusPlus: return "corenet++";
  }
  return "unknown";
}

CompressionMode parse_mode(std::string_view text) {
  if (text == "corenet") return CompressionMode::kCoreNet;
  if (text == "corenet+" || text == "corenet_plus") return CompressionMode::kCoreNetPlus;
  if (text == "corenet++" || text == "corenet_plus_plus") return CompressionMode::kCoreNetPlusPlus;
  throw Error(ErrorKind::kInvalidArgument, "unknown mode: " + std::string(text));
}

void CompressionConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "epsilon must be in (0, 1]");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "delta must be in (0, 1)");
  }
  constants.validate();
  if (const auto* b = std::get_if<BudgetSizing>(&sizing)) {
    if (!(b->fraction > 0.0 && b->fraction <= 1.0)) {
      throw Error(ErrorKind::kInvalidArgument, "fraction must be in (0, 1]");
    }
  }
  if (generalize_points && *generalize_points < 1) {
    throw Error(ErrorKind::kInvalidArgument, "generalize point count must be >= 1");
  }
  if (max_amplification_trials < 1) {
    throw Error(ErrorKind::kInvalidArgument, "max amplification trials must be >= 1");
  }
  if (!(delta_options.cap >= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "delta cap must be >= 1");
  }
}

AmplificationParams amplification_params(double eta, double delta, std::size_t points) {
  if (!(eta >= 1.0) || !(delta > 0.0 && delta < 1.0) || points < 1) {
    throw Error(ErrorKind::kInvalidArgument, "amplification_params: need eta >= 1, delta in (0,1)");
  }
  AmplificationParams p;
  const double tau = std::ceil(std::log(4.0 * eta / delta) / std::log(10.0 / 9.0));
  p.trials = tau < 1.0 ? 1 : static_cast<std::size_t>(tau);
  const double t = static_cast<double>(p.trials);
  p.holdout = static_cast<std::size_t>(std::ceil(8.0 * std::log(8.0 * t * eta / delta)));
  p.per_trial_delta = delta / (4.0 * static_cast<double>(points) * t);
  return p;
}

GeneralizedBudget generalized_budget(double eta, double eta_star, double delta,
                                     std::size_t points, const SensitivityConstants& constants) {
  if (points < 1) throw Error(ErrorKind::kInvalidArgument, "generalized_budget: |P'| >= 1");
  GeneralizedBudget g;
  g.delta_prime = delta / (2.0 * static_cast<double>(points));
  g.subsample = subsample_size(eta, eta_star, g.delta_prime, constants.k_prime);
  g.log_term = std::log(8.0 * eta / g.delta_prime);
  g.sample_multiplier = g.log_term / std::log(8.0 * eta / delta);
  return g;
}

DenseMatrix augment_rows(const DenseMatrix& points, bool bias_embedded) {
  if (!bias_embedded) return points;
  DenseMatrix out(points.rows(), points.cols() + 1);
  for (std::size_t p = 0; p < points.rows(); ++p) {
    const auto src = points.row(p);
    auto dst = out.row(p);
    std::copy(src.begin(), src.end(), dst.begin());
    dst.back() = 1.0;
  }
  return out;
}

Mask prune_neurons(const Network& net, const ActivationCache& cache) {
  const auto& sizes = net.layer_sizes();
  Mask mask(sizes.size());
  for (std::size_t l = 0; l < sizes.size(); ++l) mask[l].assign(sizes[l], false);
  // Hidden layers only; activations[k] is layer k+1 (0-based k).
  for (std::size_t l = 1; l + 1 < sizes.size(); ++l) {
    const DenseMatrix& a = cache.activations.at(l);
    for (std::size_t i = 0; i < sizes[l]; ++i) {
      bool active = false;
      for (std::size_t p = 0; p < a.rows() && !active; ++p) active = a(p, i) > 0.0;
      mask[l][i] = !active;
    }
  }
  return mask;
}

namespace {

void check_mask(const Network& net, const Mask& pruned) {
  const auto& sizes = net.layer_sizes();
  if (pruned.size() != sizes.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "pruning mask: one entry per layer");
  }
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    if (pruned[l].size() != sizes[l]) {
      throw Error(ErrorKind::kDimensionMismatch, "pruning mask: layer width mismatch");
    }
  }
  const auto any = [](const std::vector<bool>& v) {
    return std::find(v.begin(), v.end(), true) != v.end();
  };
  if (any(pruned.front()) || any(pruned.back())) {
    throw Error(ErrorKind::kInvalidArgument, "pruning mask: input and output layers are kept");
  }
}

// Old column -> new column for one layer input, bias column last.
std::vector<std::size_t> column_map(const std::vector<bool>& pruned_inputs, bool bias,
                                    std::size_t& new_cols) {
  std::vector<std::size_t> map(pruned_inputs.size() + (bias ? 1 : 0), SIZE_MAX);
  std::size_t next = 0;
  for (std::size_t j = 0; j < pruned_inputs.size(); ++j) {
    if (!pruned_inputs[j]) map[j] = next++;
  }
  if (bias) map.back() = next++;
  new_cols = next;
  return map;
}

SparseRow remap_row(const SparseRow& row, const std::vector<std::size_t>& map) {
  SparseRow out;
  out.reserve(row.size());
  for (const auto& e : row) {
    if (map[e.col] != SIZE_MAX) out.push_back({map[e.col], e.value});
  }
  return out;
}

std::vector<std::size_t> live_sizes(const Mask& pruned) {
  std::vector<std::size_t> sizes;
  for (const auto& layer : pruned) {
    sizes.push_back(static_cast<std::size_t>(std::count(layer.begin(), layer.end(), false)));
  }
  return sizes;
}

Network assemble(const Network& net, const std::vector<std::vector<SparseRow>>& rows,
                 const Mask& pruned) {
  std::vector<WeightMatrix> weights;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::size_t cols = 0;
    const auto map = column_map(pruned[k], net.bias_embedded(), cols);
    std::vector<SparseRow> kept;
    for (std::size_t i = 0; i < rows[k].size(); ++i) {
      if (!pruned[k + 1][i]) kept.push_back(remap_row(rows[k][i], map));
    }
    weights.emplace_back(SparseRowMatrix(cols, kept));
  }
  return Network(live_sizes(pruned), std::move(weights), net.bias_embedded());
}

// relu(W aug(x)) for every row x of `inputs`.
DenseMatrix next_layer(const std::vector<SparseRow>& rows, const DenseMatrix& inputs,
                       bool bias_embedded) {
  const DenseMatrix aug = augment_rows(inputs, bias_embedded);
  DenseMatrix out(inputs.rows(), rows.size());
  for (std::size_t p = 0; p < inputs.rows(); ++p) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double z = dot(rows[i], aug.row(p));
      out(p, i) = std::max(z, 0.0);
    }
  }
  return out;
}

DenseMatrix gather_rows(const DenseMatrix& m, std::span<const std::size_t> ids) {
  DenseMatrix out(ids.size(), m.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto src = m.row(ids[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

void drop_pruned_edges(EdgeSensitivities& cls, const std::vector<bool>& pruned_inputs) {
  EdgeSensitivities kept;
  kept.inactive = cls.inactive;
  for (std::size_t j = 0; j < cls.size(); ++j) {
    if (cls.edges[j] < pruned_inputs.size() && pruned_inputs[cls.edges[j]]) continue;
    kept.edges.push_back(cls.edges[j]);
    kept.weights.push_back(cls.weights[j]);
    kept.sensitivity.push_back(cls.sensitivity[j]);
    kept.total += cls.sensitivity[j];
  }
  cls = std::move(kept);
}

// Splits `total` into integer shares proportional to `weights`, each at most
// its cap, by largest remainder; leftovers go to entries with spare room.
std::vector<std::size_t> apportion(std::size_t total, std::span<const double> weights,
                                   std::span<const std::size_t> caps) {
  const std::size_t n = weights.size();
  std::vector<std::size_t> share(n, 0);
  std::size_t capacity = std::accumulate(caps.begin(), caps.end(), std::size_t{0});
  std::size_t remaining = std::min(total, capacity);
  while (remaining > 0) {
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (share[i] < caps[i]) mass += weights[i];
    }
    if (!(mass > 0.0)) {
      for (std::size_t i = 0; i < n && remaining > 0; ++i) {
        const std::size_t add = std::min(caps[i] - share[i], remaining);
        share[i] += add;
        remaining -= add;
      }
      break;
    }
    std::vector<std::pair<double, std::size_t>> rema;
    std::size_t given = 0;
    const double pool = static_cast<double>(remaining);
    for (std::size_t i = 0; i < n; ++i) {
      if (share[i] >= caps[i]) continue;
      const double exact = pool * weights[i] / mass;
      const auto whole = std::min<std::size_t>(static_cast<std::size_t>(std::floor(exact)),
                                               caps[i] - share[i]);
      share[i] += whole;
      given += whole;
      if (share[i] < caps[i]) rema.emplace_back(exact - std::floor(exact), i);
    }
    remaining -= given;
    std::stable_sort(rema.begin(), rema.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [frac, i] : rema) {
      if (remaining == 0) break;
      ++share[i];
      --remaining;
    }
    if (given == 0 && rema.empty()) break;
  }
  return share;
}

// Draw count whose expected distinct edges land closest to target + carry.
// The shortfall or excess is carried to the next class so rounding does not
// accumulate over a layer.
ClassBudget class_budget(const EdgeSensitivities& cls, std::size_t target, SamplingScheme scheme,
                         double& carry) {
  if (cls.size() == 0) return ClassBudget::drop();
  const double want = static_cast<double>(target) + carry;
  if (target == 0 || want <= 0.0) {
    carry = want;
    return ClassBudget::drop();
  }
  if (want >= static_cast<double>(cls.size())) {
    carry = want - static_cast<double>(cls.size());
    return ClassBudget::keep_all();
  }
  std::vector<double> q;
  if (scheme == SamplingScheme::kSensitivity && cls.total > 0.0) {
    q = cls.sensitivity;
  } else {
    q.assign(cls.size(), 1.0);
  }
  const double sum = std::accumulate(q.begin(), q.end(), 0.0);
  for (double& v : q) v /= sum;
  const auto m = draws_for_distinct(q, want);
  if (!m) {
    carry = want - static_cast<double>(std::count_if(q.begin(), q.end(), [](double v) { return v > 0; }));
    return ClassBudget::keep_support();
  }
  std::uint64_t pick = std::max<std::uint64_t>(*m, 1);
  double got = expected_distinct(q, static_cast<double>(pick));
  if (pick > 1) {
    const double below = expected_distinct(q, static_cast<double>(pick - 1));
    if (want - below < got - want) {
      --pick;
      got = below;
    }
  }
  carry = want - got;
  return ClassBudget::sample(pick);
}

// Budget sizing for one layer: keep about fraction * nnz(W) entries,
// counting retained biases, spread over live neurons by edge count.
std::vector<NeuronBudget> budget_layer(const std::vector<NeuronSensitivity>& neurons,
                                       const std::vector<bool>& pruned_rows,
                                       std::size_t layer_nnz, double fraction,
                                       SamplingScheme scheme) {
  const std::size_t n = neurons.size();
  std::size_t biases = 0;
  std::vector<double> weight(n, 0.0);
  std::vector<std::size_t> cap(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (pruned_rows[i]) continue;
    if (neurons[i].bias) ++biases;
    cap[i] = neurons[i].positive.size() + neurons[i].negative.size();
    weight[i] = static_cast<double>(cap[i]);
  }
  const double raw = std::round(fraction * static_cast<double>(layer_nnz));
  const auto layer_target = static_cast<std::size_t>(raw);
  const std::size_t edge_target = layer_target > biases ? layer_target - biases : 0;
  const auto shares = apportion(edge_target, weight, cap);

  std::vector<NeuronBudget> out(n);
  double carry = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (pruned_rows[i]) {
      out[i] = {ClassBudget::drop(), ClassBudget::drop()};
      continue;
    }
    const auto& ns = neurons[i];
    const std::size_t np = ns.positive.size();
    const std::size_t nn = ns.negative.size();
    double wp = static_cast<double>(np);
    double wn = static_cast<double>(nn);
    if (scheme == SamplingScheme::kSensitivity && ns.total() > 0.0) {
      wp = ns.positive.total;
      wn = ns.negative.total;
    }
    const std::size_t caps[2] = {np, nn};
    const double weights[2] = {wp, wn};
    const auto split = apportion(shares[i], weights, caps);
    out[i].positive = class_budget(ns.positive, split[0], scheme, carry);
    out[i].negative = class_budget(ns.negative, split[1], scheme, carry);
  }
  return out;
}

std::vector<NeuronBudget> theory_layer(const std::vector<NeuronSensitivity>& neurons,
                                       const std::vector<bool>& pruned_rows, double k,
                                       double layer_epsilon, double eta, double delta,
                                       bool& compressible) {
  std::vector<NeuronBudget> out(neurons.size());
  for (std::size_t i = 0; i < neurons.size(); ++i) {
    if (pruned_rows[i]) {
      out[i] = {ClassBudget::drop(), ClassBudget::drop()};
      continue;
    }
    const auto& ns = neurons[i];
    const double s = ns.total() > 0.0 ? ns.total() : 1.0;
    const std::uint64_t m = sample_complexity(s, k, layer_epsilon, eta, delta);
    const std::size_t edges = ns.positive.size() + ns.negative.size();
    if (m < edges) compressible = true;
    out[i].positive = ns.positive.size() ? ClassBudget::sample(m) : ClassBudget::drop();
    out[i].negative = ns.negative.size() ? ClassBudget::sample(m) : ClassBudget::drop();
  }
  return out;
}

}  // namespace

Network apply_pruning(const Network& net, const Mask& pruned) {
  check_mask(net, pruned);
  std::vector<WeightMatrix> weights;
  for (std::size_t k = 0; k < net.num_weight_layers(); ++k) {
    std::size_t cols = 0;
    const auto map = column_map(pruned[k], net.bias_embedded(), cols);
    const WeightMatrix& w = net.weight(k);
    if (w.is_sparse()) {
      std::vector<SparseRow> rows;
      for (std::size_t i = 0; i < w.rows(); ++i) {
        if (!pruned[k + 1][i]) rows.push_back(remap_row(w.row(i), map));
      }
      weights.emplace_back(SparseRowMatrix(cols, rows));
      continue;
    }
    const DenseMatrix dense = w.to_dense();
    const std::size_t live_rows =
        static_cast<std::size_t>(std::count(pruned[k + 1].begin(), pruned[k + 1].end(), false));
    DenseMatrix out(live_rows, cols);
    std::size_t r = 0;
    for (std::size_t i = 0; i < dense.rows(); ++i) {
      if (pruned[k + 1][i]) continue;
      for (std::size_t j = 0; j < dense.cols(); ++j) {
        if (map[j] != SIZE_MAX) out(r, map[j]) = dense(i, j);
      }
      ++r;
    }
    weights.emplace_back(std::move(out));
  }
  return Network(live_sizes(pruned), std::move(weights), net.bias_embedded());
}

std::size_t amplify_neuron(std::span<const SparseRow> candidates, const SparseRow& original_row,
                           const DenseMatrix& hatted, const DenseMatrix& original,
                           Diagnostics* diag) {
  if (candidates.empty()) throw Error(ErrorKind::kInvalidArgument, "amplify: no candidates");
  if (hatted.rows() == 0) throw Error(ErrorKind::kInsufficientData, "amplify: empty holdout");
  std::size_t best = 0;
  double best_err = 0.0;
  bool found = false;
  for (std::size_t t = 0; t < candidates.size(); ++t) {
    const SetError e = mean_relative_error(candidates[t], original_row, hatted, original);
    if (e.used == 0) continue;
    if (!found || e.mean < best_err) {
      best = t;
      best_err = e.mean;
      found = true;
    }
  }
  if (!found) {
    bump(diag ? &diag->amplification_fallback : nullptr);
    return 0;
  }
  return best;
}

CompressionOutcome compress(const Network& net, const DenseMatrix& validation,
                            const CompressionConfig& config) {
  config.validate();
  if (validation.cols() != net.input_dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "compress: validation points do not match input");
  }
  for (const auto& w : net.weights()) {
    const DenseMatrix d = w.to_dense();
    for (double v : d.data()) {
      if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidArgument, "compress: non-finite weight");
    }
  }

  const double eta = static_cast<double>(net.total_neurons());
  const double eta_star = static_cast<double>(net.max_width());
  const bool plus = config.mode != CompressionMode::kCoreNet;
  const bool amplify = config.mode == CompressionMode::kCoreNetPlusPlus;
  const std::size_t points = config.generalize_points.value_or(1);

  CompressionOutcome outcome;
  CompressionPlan& plan = outcome.plan;
  Diagnostics diag;

  plan.sampling_delta = config.delta;
  if (config.generalize_points) plan.sampling_delta = config.delta / (2.0 * points);
  std::size_t holdout_size = 0;
  if (amplify) {
    const auto amp = amplification_params(eta, config.delta, points);
    plan.formula_trials = amp.trials;
    plan.trials_used = std::min(amp.trials, config.max_amplification_trials);
    plan.sampling_delta = amp.per_trial_delta;
    holdout_size = amp.holdout;
  }
  plan.required_subsample =
      subsample_size(eta, eta_star, plan.sampling_delta, config.constants.k_prime);

  const std::size_t need = plan.required_subsample + holdout_size;
  if (validation.rows() < need) {
    std::string msg = "validation set too small: need " + std::to_string(need) +
                      " points (|S| = " + std::to_string(plan.required_subsample);
    if (amplify) msg += ", |T| = " + std::to_string(holdout_size);
    msg += "), got " + std::to_string(validation.rows());
    throw Error(ErrorKind::kInsufficientData, msg);
  }

  std::vector<std::size_t> order(validation.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream split_rng(config.seed, StreamId{0, 0, 0, 0, kPurposeSplit});
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[split_rng.below(i)]);
  }
  plan.subsample.assign(order.begin(), order.begin() + plan.required_subsample);
  plan.holdout.assign(order.begin() + plan.required_subsample, order.begin() + need);
  std::sort(plan.subsample.begin(), plan.subsample.end());
  std::sort(plan.holdout.begin(), plan.holdout.end());

  const ActivationCache cache_s =
      cache_activations(net, gather_rows(validation, plan.subsample), plan.subsample, config.jobs);
  ActivationCache cache_t;
  if (amplify) {
    cache_t = cache_activations(net, gather_rows(validation, plan.holdout), plan.holdout,
                                config.jobs);
  }

  Mask pruned(net.num_layers());
  for (std::size_t l = 0; l < net.num_layers(); ++l) pruned[l].assign(net.layer_sizes()[l], false);
  if (plus) pruned = prune_neurons(net, cache_s);

  // Every layer's delta estimate is needed before any layer is sampled.
  plan.delta_hat = delta_hat(net, cache_s, config.constants, plan.sampling_delta,
                             config.delta_options, &diag, config.jobs);
  plan.schedule = epsilon_schedule(config.epsilon, config.delta, net.num_layers(),
                                   plan.delta_hat.per_layer);
  outcome.profile = sensitivity_profile(net, cache_s, config.jobs);

  const std::size_t layers = net.num_weight_layers();
  std::vector<std::vector<SparseRow>> rows(layers);
  plan.neurons.resize(layers);
  DenseMatrix hatted_s = cache_s.activations[0];
  DenseMatrix hatted_t = amplify ? cache_t.activations[0] : DenseMatrix{};
  bool compressible = false;

  for (std::size_t k = 0; k < layers; ++k) {
    LayerSensitivity& layer = outcome.profile.layers[k];
    if (config.recompute_hatted && k > 0) {
      layer = layer_sensitivity(net, k, hatted_s, config.jobs);
    }
    for (auto& ns : layer.neurons) {
      drop_pruned_edges(ns.positive, pruned[k]);
      drop_pruned_edges(ns.negative, pruned[k]);
      if (ns.positive.inactive && ns.negative.inactive) bump(&diag.inactive_neurons);
    }

    const std::vector<bool>& pruned_rows = pruned[k + 1];
    if (const auto* b = std::get_if<BudgetSizing>(&config.sizing)) {
      plan.neurons[k] = budget_layer(layer.neurons, pruned_rows, net.weight(k).nnz(), b->fraction,
                                     config.scheme);
    } else {
      const double layer_delta = layer.signed_inputs ? plan.sampling_delta / 4.0
                                                     : plan.sampling_delta;
      plan.neurons[k] = theory_layer(layer.neurons, pruned_rows, config.constants.k,
                                     plan.schedule.for_weight_layer(k), eta, layer_delta,
                                     compressible);
    }

    const WeightMatrix& w = net.weight(k);
    const std::size_t width = w.rows();
    rows[k].assign(width, SparseRow{});
    const std::size_t trials = amplify ? plan.trials_used : 1;
    const DenseMatrix t_hat = amplify ? augment_rows(hatted_t, net.bias_embedded()) : DenseMatrix{};
    const DenseMatrix t_orig =
        amplify ? augment_rows(cache_t.activations[k], net.bias_embedded()) : DenseMatrix{};

    parallel_for(width, config.jobs, [&](std::size_t i) {
      if (pruned_rows[i]) return;
      const NeuronSensitivity& ns = layer.neurons[i];
      const NeuronBudget& budget = plan.neurons[k][i];
      std::vector<SparseRow> candidates;
      candidates.reserve(trials);
      for (std::size_t t = 0; t < trials; ++t) {
        candidates.push_back(sparsify_neuron(ns, budget, config.seed,
                                             StreamId{k, i, 0, t, kPurposeSparsify},
                                             config.scheme, &diag));
      }
      std::size_t pick = 0;
      if (trials > 1) pick = amplify_neuron(candidates, w.row(i), t_hat, t_orig, &diag);
      rows[k][i] = std::move(candidates[pick]);
    });

    if (k + 1 < layers) {
      if (config.recompute_hatted) hatted_s = next_layer(rows[k], hatted_s, net.bias_embedded());
      if (amplify) hatted_t = next_layer(rows[k], hatted_t, net.bias_embedded());
    }
  }

  CompressedNetwork& compressed = outcome.compressed;
  compressed.network = assemble(net, rows, pruned);
  compressed.pruned = pruned;
  compressed.seed = config.seed;
  compressed.config_digest = digest(to_json(config));
  compressed.plan_digest = digest(to_json(plan));

  CompressionStats& stats = outcome.stats;
  stats.original_size = size_of(net);
  stats.compressed_size = size_of(compressed.network);
  for (std::size_t k = 0; k < layers; ++k) {
    stats.original_layer_nnz.push_back(net.weight(k).nnz());
    stats.layer_nnz.push_back(compressed.network.weight(k).nnz());
  }
  for (const auto& layer : pruned) {
    stats.pruned_neurons += static_cast<std::size_t>(std::count(layer.begin(), layer.end(), true));
  }
  stats.no_compression = std::holds_alternative<TheorySizing>(config.sizing) && !compressible;
  stats.delta_capped = diag.delta_capped.load();
  stats.uniform_fallback = diag.uniform_fallback.load();
  stats.skipped_points = diag.skipped_points.load();
  stats.amplification_fallback = diag.amplification_fallback.load();
  stats.inactive_neurons = diag.inactive_neurons.load();

  if (stats.no_compression) log_warning("no compression at these (eps, delta)");
  if (stats.delta_capped) {
    log_warning("delta ratio capped at " + std::to_string(stats.delta_capped) + " points");
  }
  if (stats.uniform_fallback) {
    log_warning(std::to_string(stats.uniform_fallback) +
                " sign classes had zero sensitivity; sampled uniformly");
  }
  if (stats.amplification_fallback) {
    log_warning(std::to_string(stats.amplification_fallback) +
                " neurons had no usable holdout points; kept trial 0");
  }
  log_info("compressed size " + std::to_string(stats.compressed_size) + " of " +
           std::to_string(stats.original_size));
  return outcome;
}

}  // namespace corenet
