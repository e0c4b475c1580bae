#include "corenet/sparsifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "corenet/error.hpp"

namespace corenet {

SamplingDistribution::SamplingDistribution(std::span<const double> mass) {
  double total = 0.0;
  for (double m : mass) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw Error(ErrorKind::kInvalidArgument, "SamplingDistribution: mass must be finite >= 0");
    }
    total += m;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::kNoPositiveMass, "SamplingDistribution: zero mass");
  probabilities_.reserve(mass.size());
  for (double m : mass) probabilities_.push_back(m / total);
  double acc = 0.0;
  for (std::size_t j = 0; j < probabilities_.size(); ++j) {
    if (probabilities_[j] > 0.0) {
      acc += probabilities_[j];
      support_.push_back(j);
      cumulative_.push_back(acc);
    }
  }
  cumulative_.back() = 1.0;
}

SamplingDistribution SamplingDistribution::uniform(std::size_t n) {
  const std::vector<double> ones(n, 1.0);
  return SamplingDistribution(ones);
}

std::size_t SamplingDistribution::draw(RngStream& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto pos = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                         support_.size() - 1);
  return support_[pos];
}

std::vector<std::uint64_t> SamplingDistribution::counts(std::uint64_t m, RngStream& rng) const {
  std::vector<std::uint64_t> c(probabilities_.size(), 0);
  if (m <= 16 * support_.size() + 4096) {
    for (std::uint64_t t = 0; t < m; ++t) ++c[draw(rng)];
    return c;
  }
  std::uint64_t remaining = m;
  double remaining_mass = 1.0;
  for (std::size_t k = 0; k < support_.size() && remaining > 0; ++k) {
    const std::size_t j = support_[k];
    if (k + 1 == support_.size()) {
      c[j] = remaining;
      break;
    }
    const double p = std::clamp(probabilities_[j] / remaining_mass, 0.0, 1.0);
    std::binomial_distribution<long long> binom(static_cast<long long>(remaining), p);
    const auto drawn = static_cast<std::uint64_t>(binom(rng.engine()));
    c[j] = drawn;
    remaining -= drawn;
    remaining_mass -= probabilities_[j];
    if (remaining_mass <= 0.0) remaining_mass = 1e-300;
  }
  return c;
}

double expected_distinct(std::span<const double> probabilities, double m) {
  double e = 0.0;
  for (double q : probabilities) {
    if (q <= 0.0) continue;
    e += q >= 1.0 ? 1.0 : -std::expm1(m * std::log1p(-q));
  }
  return e;
}

std::optional<std::uint64_t> draws_for_distinct(std::span<const double> probabilities,
                                                double target) {
  const auto support = static_cast<double>(
      std::count_if(probabilities.begin(), probabilities.end(), [](double q) { return q > 0; }));
  if (target >= support) return std::nullopt;
  if (target <= 0.0) return std::uint64_t{0};
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;
  while (expected_distinct(probabilities, static_cast<double>(hi)) < target) {
    if (hi >= kMaxSamples) return kMaxSamples;
    lo = hi;
    hi *= 2;
  }
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (expected_distinct(probabilities, static_cast<double>(mid)) >= target) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

SparseRow sparsify_with(std::span<const std::size_t> edges, std::span<const double> weights,
                        std::uint64_t m, const SamplingDistribution& q, RngStream& rng) {
  if (edges.size() != weights.size() || q.size() != edges.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "sparsify: edges, weights and q disagree");
  }
  if (m < 1) throw Error(ErrorKind::kInvalidArgument, "sparsify: m must be >= 1");
  const auto counts = q.counts(m, rng);
  const auto& probs = q.probabilities();
  SparseRow out;
  for (std::size_t j = 0; j < edges.size(); ++j) {
    if (counts[j] == 0) continue;
    const double scale = static_cast<double>(counts[j]) / (static_cast<double>(m) * probs[j]);
    const double value = scale * weights[j];
    out.push_back({edges[j], value});
  }
  return canonicalize(std::move(out));
}

SparseRow sparsify(std::span<const std::size_t> edges, std::span<const double> weights,
                   std::uint64_t m, std::span<const double> sensitivities, RngStream& rng,
                   Diagnostics* diag) {
  if (edges.empty()) return {};
  for (double w : weights) {
    if (!(w > 0.0)) throw Error(ErrorKind::kInvalidArgument, "sparsify: weights must be > 0");
  }
  double total = 0.0;
  for (double s : sensitivities) total += s;
  if (!(total > 0.0)) {
    bump(diag ? &diag->uniform_fallback : nullptr);
    return sparsify_with(edges, weights, m, SamplingDistribution::uniform(edges.size()), rng);
  }
  return sparsify_with(edges, weights, m, SamplingDistribution(sensitivities), rng);
}

namespace {

SparseRow sparsify_class(const EdgeSensitivities& cls, const ClassBudget& budget,
                         RngStream& rng, SamplingScheme scheme, Diagnostics* diag) {
  if (cls.size() == 0) return {};
  switch (budget.kind) {
    case ClassBudget::Kind::kDrop:
      return {};
    case ClassBudget::Kind::kKeepAll:
    case ClassBudget::Kind::kKeepSupport: {
      const bool all = budget.kind == ClassBudget::Kind::kKeepAll ||
                       scheme == SamplingScheme::kUniform || !(cls.total > 0.0);
      SparseRow exact;
      for (std::size_t j = 0; j < cls.size(); ++j) {
        if (all || cls.sensitivity[j] > 0.0) exact.push_back({cls.edges[j], cls.weights[j]});
      }
      return canonicalize(std::move(exact));
    }
    case ClassBudget::Kind::kSample:
      break;
  }
  if (budget.draws == 0) return {};
  if (scheme == SamplingScheme::kUniform) {
    return sparsify_with(cls.edges, cls.weights, budget.draws,
                         SamplingDistribution::uniform(cls.size()), rng);
  }
  return sparsify(cls.edges, cls.weights, budget.draws, cls.sensitivity, rng, diag);
}

}  // namespace

const char* to_string(ClassBudget::Kind kind) {
  switch (kind) {
    case ClassBudget::Kind::kSample: return "sample";
    case ClassBudget::Kind::kKeepAll: return "keep_all";
    case ClassBudget::Kind::kKeepSupport: return "keep_support";
    case ClassBudget::Kind::kDrop: return "drop";
  }
  return "unknown";
}

SparseRow sparsify_neuron(const NeuronSensitivity& neuron, const NeuronBudget& budget,
                          std::uint64_t seed, StreamId stream, SamplingScheme scheme,
                          Diagnostics* diag) {
  stream.sign = 0;
  RngStream pos_rng(seed, stream);
  stream.sign = 1;
  RngStream neg_rng(seed, stream);
  const SparseRow plus = sparsify_class(neuron.positive, budget.positive, pos_rng, scheme, diag);
  SparseRow minus = sparsify_class(neuron.negative, budget.negative, neg_rng, scheme, diag);

  SparseRow row = plus;
  for (auto& e : minus) row.push_back({e.col, -e.value});
  if (neuron.bias) row.push_back(*neuron.bias);
  return canonicalize(std::move(row));
}

SignedParts signed_parts(const SparseRow& row, std::span<const double> x,
                         std::size_t input_dim) {
  SignedParts p;
  for (const auto& e : row) {
    if (e.col >= input_dim) continue;
    const double xp = std::max(x[e.col], 0.0);
    const double xn = std::max(-x[e.col], 0.0);
    if (e.value > 0.0) {
      p.pos_plus += e.value * xp;
      p.neg_plus += e.value * xn;
    } else {
      p.pos_minus += -e.value * xp;
      p.neg_minus += -e.value * xn;
    }
  }
  return p;
}

std::optional<double> row_relative_error(const SparseRow& w_hat, const SparseRow& w,
                                         std::span<const double> hatted,
                                         std::span<const double> original) {
  const double denom = dot(w, original);
  if (denom == 0.0) return std::nullopt;
  return std::abs(dot(w_hat, hatted) / denom - 1.0);
}

SetError mean_relative_error(const SparseRow& w_hat, const SparseRow& w,
                             const DenseMatrix& hatted, const DenseMatrix& original) {
  if (hatted.rows() != original.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "mean_relative_error: point sets differ");
  }
  SetError err;
  double sum = 0.0;
  for (std::size_t p = 0; p < hatted.rows(); ++p) {
    const auto e = row_relative_error(w_hat, w, hatted.row(p), original.row(p));
    if (!e) {
      ++err.skipped;
      continue;
    }
    sum += *e;
    ++err.used;
  }
  if (err.used > 0) err.mean = sum / static_cast<double>(err.used);
  return err;
}

}  // namespace corenet
