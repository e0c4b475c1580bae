#include "corenet/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "corenet/error.hpp"
#include "corenet/sensitivity.hpp"
#include "corenet/sparsifier.hpp"

namespace corenet {

namespace {
constexpr std::uint64_t kPurposeEntrywise = 4;
}

const char* to_string(EntrywiseScheme scheme) {
  switch (scheme) {
    case EntrywiseScheme::kL1: return "l1";
    case EntrywiseScheme::kL2: return "l2";
    case EntrywiseScheme::kHybrid: return "l1l2";
  }
  return "unknown";
}

std::vector<double> entrywise_probabilities(const DenseMatrix& w, EntrywiseScheme scheme) {
  const MatrixNorms n = norms(w);
  if (!(n.l1 > 0.0)) throw Error(ErrorKind::kNoPositiveMass, "entrywise: all-zero matrix");
  const double fro2 = n.frobenius * n.frobenius;
  std::vector<double> p(w.data().size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double v = w.data()[j];
    const double l1 = std::abs(v) / n.l1;
    const double l2 = v * v / fro2;
    switch (scheme) {
      case EntrywiseScheme::kL1: p[j] = l1; break;
      case EntrywiseScheme::kL2: p[j] = l2; break;
      case EntrywiseScheme::kHybrid: p[j] = 0.5 * (l1 + l2); break;
    }
  }
  return p;
}

SparseRowMatrix entrywise_sparsify(const DenseMatrix& w, std::uint64_t n_samples,
                                   EntrywiseScheme scheme, RngStream& rng) {
  if (n_samples < 1) throw Error(ErrorKind::kInvalidArgument, "entrywise: n_samples must be >= 1");
  const auto p = entrywise_probabilities(w, scheme);
  const SamplingDistribution q(p);
  const auto counts = q.counts(n_samples, rng);
  const auto& probs = q.probabilities();
  std::vector<SparseRow> rows(w.rows());
  const double m = static_cast<double>(n_samples);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) continue;
    const double value = static_cast<double>(counts[j]) / (m * probs[j]) * w.data()[j];
    rows[j / w.cols()].push_back({j % w.cols(), value});
  }
  for (auto& r : rows) r = canonicalize(std::move(r));
  return SparseRowMatrix(w.cols(), rows);
}

Network entrywise_compress(const Network& net, double fraction, EntrywiseScheme scheme,
                           std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "fraction must be in (0, 1]");
  }
  std::vector<WeightMatrix> weights;
  for (std::size_t k = 0; k < net.num_weight_layers(); ++k) {
    const DenseMatrix w = net.weight(k).to_dense();
    const double target = std::round(fraction * static_cast<double>(w.nnz()));
    const auto p = entrywise_probabilities(w, scheme);
    const auto m = draws_for_distinct(p, target);
    if (!m) {
      weights.emplace_back(SparseRowMatrix::from_dense(w));
      continue;
    }
    if (*m == 0) {
      weights.emplace_back(SparseRowMatrix(w.rows(), w.cols()));
      continue;
    }
    RngStream rng(seed, StreamId{k, 0, 0, 0, kPurposeEntrywise});
    weights.emplace_back(entrywise_sparsify(w, *m, scheme, rng));
  }
  return Network(net.layer_sizes(), std::move(weights), net.bias_embedded());
}

SparseRow uniform_sparsify_neuron(const SparseRow& row, std::size_t input_dim, std::uint64_t m,
                                  std::uint64_t seed, const StreamId& stream) {
  const bool has_edge =
      std::any_of(row.begin(), row.end(), [&](const SparseEntry& e) { return e.col < input_dim; });
  if (!has_edge) throw Error(ErrorKind::kInvalidArgument, "uniform sparsify: empty row");
  if (m < 1) throw Error(ErrorKind::kInvalidArgument, "uniform sparsify: m must be >= 1");
  const NeuronSensitivity ns = neuron_sensitivity(row, input_dim, DenseMatrix(0, input_dim));
  const NeuronBudget budget{ClassBudget::sample(m), ClassBudget::sample(m)};
  return sparsify_neuron(ns, budget, seed, stream, SamplingScheme::kUniform);
}

CompressionOutcome uniform_compress(const Network& net, const DenseMatrix& validation,
                                    double fraction, const CompressionConfig& base) {
  CompressionConfig cfg = base;
  cfg.mode = CompressionMode::kCoreNet;
  cfg.scheme = SamplingScheme::kUniform;
  cfg.sizing = BudgetSizing{fraction};
  return compress(net, validation, cfg);
}

Network svd_compress(const Network& net, std::span<const std::size_t> ranks) {
  if (ranks.size() != net.num_weight_layers()) {
    throw Error(ErrorKind::kDimensionMismatch, "svd_compress: one rank per layer");
  }
  std::vector<WeightMatrix> weights;
  for (std::size_t k = 0; k < ranks.size(); ++k) {
    const DenseMatrix w = net.weight(k).to_dense();
    const SvdFactors f = truncated_svd(w, ranks[k]);
    LowRankMatrix lr{DenseMatrix(w.rows(), f.rank()), DenseMatrix(f.rank(), w.cols())};
    for (std::size_t r = 0; r < f.rank(); ++r) {
      for (std::size_t i = 0; i < w.rows(); ++i) lr.left(i, r) = f.singular_values[r] * f.left[r][i];
      for (std::size_t j = 0; j < w.cols(); ++j) lr.right(r, j) = f.right[r][j];
    }
    weights.emplace_back(std::move(lr));
  }
  return Network(net.layer_sizes(), std::move(weights), net.bias_embedded());
}

Network svd_compress(const Network& net, std::size_t rank) {
  const std::vector<std::size_t> ranks(net.num_weight_layers(), rank);
  return svd_compress(net, ranks);
}

std::vector<std::size_t> svd_ranks_for(const Network& net, double fraction) {
  std::vector<std::size_t> ranks;
  for (const auto& w : net.weights()) {
    const double per_rank = static_cast<double>(w.rows() + w.cols());
    const double r = std::round(fraction * static_cast<double>(w.nnz()) / per_rank);
    const std::size_t max_rank = std::min(w.rows(), w.cols());
    ranks.push_back(std::clamp<std::size_t>(static_cast<std::size_t>(std::max(r, 1.0)), 1, max_rank));
  }
  return ranks;
}

}  // namespace corenet
