#include "corenet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "corenet/baselines.hpp"
#include "corenet/error.hpp"
#include "corenet/nnw1.hpp"
#include "corenet/parallel.hpp"
#include "corenet/rng.hpp"
#include "corenet/serialize.hpp"
#include "corenet/trainer.hpp"

namespace corenet {

namespace {

constexpr std::uint64_t kPurposeSweep = 5;

void require_points(std::size_t n, const char* what) {
  if (n == 0) throw Error(ErrorKind::kInsufficientData, std::string(what) + ": empty point set");
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

}  // namespace

double relative_error(const Network& compressed, const Network& original,
                      const DenseMatrix& points) {
  require_points(points.rows(), "relative_error");
  if (compressed.input_dim() != original.input_dim() ||
      compressed.output_dim() != original.output_dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "relative_error: networks differ in I/O dims");
  }
  double sum = 0.0;
  for (std::size_t p = 0; p < points.rows(); ++p) {
    sum += l1_distance(evaluate(compressed, points.row(p)), evaluate(original, points.row(p)));
  }
  return sum / static_cast<double>(points.rows());
}

double accuracy_drop(const Network& original, const Network& compressed, const Dataset& data) {
  require_points(data.size(), "accuracy_drop");
  return accuracy(original, data) - accuracy(compressed, data);
}

double margin_loss(const Network& net, double gamma, const Dataset& data) {
  require_points(data.size(), "margin_loss");
  if (!(gamma >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "margin_loss: gamma must be >= 0");
  std::size_t losses = 0;
  for (std::size_t p = 0; p < data.size(); ++p) {
    const Vector out = evaluate(net, data.point(p));
    const auto y = static_cast<std::size_t>(data.labels[p]);
    double best_other = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (i != y) best_other = std::max(best_other, out[i]);
    }
    if (out[y] <= gamma + best_other) ++losses;
  }
  return static_cast<double>(losses) / static_cast<double>(data.size());
}

void GeneralizationBoundInput::validate() const {
  if (!(gamma > 0.0)) throw Error(ErrorKind::kInvalidArgument, "bound: gamma must be > 0");
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "bound: n must be > 0");
  if (delta_products.size() != sensitivity_sums.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "bound: one product and one sum per layer");
  }
  const auto negative = [](double v) { return !(v >= 0.0); };
  if (negative(max_output_norm_sq) || std::any_of(delta_products.begin(), delta_products.end(), negative) ||
      std::any_of(sensitivity_sums.begin(), sensitivity_sums.end(), negative)) {
    throw Error(ErrorKind::kInvalidArgument, "bound: sums must be nonnegative");
  }
}

double generalization_bound(const GeneralizationBoundInput& input) {
  input.validate();
  double layer_sum = 0.0;
  for (std::size_t l = 0; l < input.delta_products.size(); ++l) {
    layer_sum += input.delta_products[l] * input.delta_products[l] * input.sensitivity_sums[l];
  }
  const double L = static_cast<double>(input.num_layers);
  const double radicand = input.max_output_norm_sq * L * L * layer_sum /
                          (input.gamma * input.gamma * static_cast<double>(input.n));
  return input.margin_loss + std::sqrt(radicand);
}

GeneralizationBoundInput bound_input(const Network& net, const Dataset& data, double gamma,
                                     const CompressionOutcome& outcome) {
  require_points(data.size(), "bound");
  GeneralizationBoundInput in;
  in.gamma = gamma;
  in.n = data.size();
  in.num_layers = net.num_layers();
  for (std::size_t p = 0; p < data.size(); ++p) {
    const Vector out = evaluate(net, data.point(p));
    in.max_output_norm_sq = std::max(in.max_output_norm_sq, dot(out, out));
  }
  const auto& per_layer = outcome.plan.delta_hat.per_layer;
  in.delta_products.assign(per_layer.size(), 1.0);
  double product = 1.0;
  for (std::size_t k = per_layer.size(); k-- > 0;) {
    product *= per_layer[k];
    in.delta_products[k] = product;
  }
  for (const auto& layer : outcome.profile.layers) {
    double sum = 0.0;
    for (const auto& ns : layer.neurons) sum += ns.total();
    in.sensitivity_sums.push_back(sum);
  }
  in.margin_loss = margin_loss(net, gamma, data);
  return in;
}

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kCoreNet: return "corenet";
    case Scheme::kCoreNetPlus: return "corenet+";
    case Scheme::kCoreNetPlusPlus: return "corenet++";
    case Scheme::kUniform: return "uniform";
    case Scheme::kL1: return "l1";
    case Scheme::kL2: return "l2";
    case Scheme::kHybrid: return "l1l2";
    case Scheme::kSvd: return "svd";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view text) {
  for (Scheme s : {Scheme::kCoreNet, Scheme::kCoreNetPlus, Scheme::kCoreNetPlusPlus,
                   Scheme::kUniform, Scheme::kL1, Scheme::kL2, Scheme::kHybrid, Scheme::kSvd}) {
    if (text == to_string(s)) return s;
  }
  if (text == "corenet_plus") return Scheme::kCoreNetPlus;
  if (text == "corenet_plus_plus") return Scheme::kCoreNetPlusPlus;
  if (text == "hybrid") return Scheme::kHybrid;
  throw Error(ErrorKind::kInvalidArgument, "unknown scheme: " + std::string(text));
}

void SweepConfig::validate() const {
  if (schemes.empty()) throw Error(ErrorKind::kInvalidArgument, "sweep: no schemes");
  if (fractions.empty()) throw Error(ErrorKind::kInvalidArgument, "sweep: no fractions");
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "sweep: fraction outside (0, 1]");
  }
  if (trials < 1) throw Error(ErrorKind::kInvalidArgument, "sweep: trials must be >= 1");
}

std::pair<double, double> mean_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

namespace {

Network compress_with(Scheme scheme, const Network& net, const DenseMatrix& validation,
                      double fraction, CompressionConfig cfg) {
  cfg.sizing = BudgetSizing{fraction};
  cfg.jobs = 1;
  switch (scheme) {
    case Scheme::kCoreNet:
    case Scheme::kCoreNetPlus:
    case Scheme::kCoreNetPlusPlus:
      cfg.mode = scheme == Scheme::kCoreNet       ? CompressionMode::kCoreNet
                 : scheme == Scheme::kCoreNetPlus ? CompressionMode::kCoreNetPlus
                                                  : CompressionMode::kCoreNetPlusPlus;
      cfg.scheme = SamplingScheme::kSensitivity;
      return compress(net, validation, cfg).compressed.network;
    case Scheme::kUniform:
      return uniform_compress(net, validation, fraction, cfg).compressed.network;
    case Scheme::kL1:
      return entrywise_compress(net, fraction, EntrywiseScheme::kL1, cfg.seed);
    case Scheme::kL2:
      return entrywise_compress(net, fraction, EntrywiseScheme::kL2, cfg.seed);
    case Scheme::kHybrid:
      return entrywise_compress(net, fraction, EntrywiseScheme::kHybrid, cfg.seed);
    case Scheme::kSvd:
      return svd_compress(net, svd_ranks_for(net, fraction));
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown scheme");
}

struct TrialResult {
  double size = 0.0;
  double err = 0.0;
  double accdrop = 0.0;
  std::optional<std::string> error;
};

}  // namespace

CompressionReport sweep(const Network& net, const Dataset& data, const SweepConfig& config) {
  config.validate();
  const DenseMatrix validation = data.split(Split::kValidation).features;
  const Dataset test = data.split(Split::kTest);
  require_points(test.size(), "sweep test split");

  std::vector<double> fractions = config.fractions;
  std::sort(fractions.begin(), fractions.end());

  std::vector<Vector> reference(test.size());
  for (std::size_t p = 0; p < test.size(); ++p) reference[p] = evaluate(net, test.point(p));
  const double base_acc = accuracy(net, test);

  const std::size_t cells = config.schemes.size() * fractions.size();
  std::vector<TrialResult> results(cells * config.trials);
  parallel_for(results.size(), config.jobs, [&](std::size_t job) {
    const std::size_t cell = job / config.trials;
    const std::size_t trial = job % config.trials;
    const std::size_t si = cell / fractions.size();
    const std::size_t fi = cell % fractions.size();
    CompressionConfig cfg = config.base;
    cfg.seed = derive_seed(config.base.seed, StreamId{si, fi, 0, trial, kPurposeSweep});
    TrialResult& r = results[job];
    try {
      const Network out = compress_with(config.schemes[si], net, validation, fractions[fi], cfg);
      r.size = static_cast<double>(size_of(out));
      double err = 0.0;
      for (std::size_t p = 0; p < test.size(); ++p) {
        err += l1_distance(evaluate(out, test.point(p)), reference[p]);
      }
      r.err = err / static_cast<double>(test.size());
      r.accdrop = base_acc - accuracy(out, test);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });

  CompressionReport report;
  report.trials = config.trials;
  report.original_size = size_of(net);
  report.network_digest = digest_bytes(encode_nnw1(net));
  report.data_digest = digest(data);
  report.config_digest = digest(to_json(config));
  for (std::size_t cell = 0; cell < cells; ++cell) {
    SweepPoint pt;
    pt.scheme = to_string(config.schemes[cell / fractions.size()]);
    pt.fraction = fractions[cell % fractions.size()];
    std::vector<double> sizes, errs, drops;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const TrialResult& r = results[cell * config.trials + t];
      if (r.error) {
        if (!pt.error) pt.error = r.error;
        continue;
      }
      sizes.push_back(r.size);
      errs.push_back(r.err);
      drops.push_back(r.accdrop);
    }
    pt.trial_count = errs.size();
    pt.size = mean_std(sizes).first;
    std::tie(pt.err_mean, pt.err_std) = mean_std(errs);
    std::tie(pt.accdrop_mean, pt.accdrop_std) = mean_std(drops);
    report.points.push_back(std::move(pt));
  }
  return report;
}

std::string report_csv(const CompressionReport& report) {
  std::string out = "scheme,fraction,trial_count,size,err_mean,err_std,accdrop_mean,accdrop_std\n";
  char buf[512];
  for (const auto& p : report.points) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  p.scheme.c_str(), p.fraction, p.trial_count, p.size, p.err_mean, p.err_std,
                  p.accdrop_mean, p.accdrop_std);
    out += buf;
  }
  return out;
}

}  // namespace corenet
