#include "corenet/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "corenet/error.hpp"
#include "corenet/parallel.hpp"

namespace corenet {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

std::size_t WeightMatrix::rows() const {
  return std::visit([](const auto& m) { return m.rows(); }, storage_);
}

std::size_t WeightMatrix::cols() const {
  return std::visit([](const auto& m) { return m.cols(); }, storage_);
}

std::size_t WeightMatrix::nnz() const {
  return std::visit([](const auto& m) { return m.nnz(); }, storage_);
}

Vector WeightMatrix::apply(std::span<const double> v) const {
  return std::visit(Overloaded{
                        [&](const DenseMatrix& m) { return matvec(m, v); },
                        [&](const SparseRowMatrix& m) { return matvec(m, v); },
                        [&](const LowRankMatrix& m) { return matvec(m.left, matvec(m.right, v)); },
                    },
                    storage_);
}

SparseRow WeightMatrix::row(std::size_t i) const {
  return std::visit(Overloaded{
                        [&](const DenseMatrix& m) {
                          SparseRow r;
                          const auto vals = m.row(i);
                          for (std::size_t j = 0; j < vals.size(); ++j) {
                            if (vals[j] != 0.0) r.push_back({j, vals[j]});
                          }
                          return r;
                        },
                        [&](const SparseRowMatrix& m) { return m.row(i); },
                        [&](const LowRankMatrix& m) {
                          SparseRow r;
                          for (std::size_t j = 0; j < m.cols(); ++j) {
                            double acc = 0.0;
                            for (std::size_t k = 0; k < m.left.cols(); ++k) {
                              acc += m.left(i, k) * m.right(k, j);
                            }
                            if (acc != 0.0) r.push_back({j, acc});
                          }
                          return r;
                        },
                    },
                    storage_);
}

DenseMatrix WeightMatrix::to_dense() const {
  return std::visit(Overloaded{
                        [](const DenseMatrix& m) { return m; },
                        [](const SparseRowMatrix& m) { return m.to_dense(); },
                        [this](const LowRankMatrix& m) {
                          DenseMatrix d(m.rows(), m.cols());
                          for (std::size_t i = 0; i < m.rows(); ++i) {
                            for (const auto& e : row(i)) d(i, e.col) = e.value;
                          }
                          return d;
                        },
                    },
                    storage_);
}

Network::Network(std::vector<std::size_t> layer_sizes, std::vector<WeightMatrix> weights,
                 bool bias_embedded)
    : layer_sizes_(std::move(layer_sizes)),
      weights_(std::move(weights)),
      bias_embedded_(bias_embedded) {
  if (layer_sizes_.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "Network: at least two layers required");
  }
  if (weights_.size() + 1 != layer_sizes_.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "Network: weight count must be layers - 1");
  }
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const std::size_t want_cols = layer_sizes_[k] + (bias_embedded_ ? 1 : 0);
    if (weights_[k].rows() != layer_sizes_[k + 1] || weights_[k].cols() != want_cols) {
      std::ostringstream msg;
      msg << "Network: layer " << k + 2 << " weight is " << weights_[k].rows() << "x"
          << weights_[k].cols() << ", expected " << layer_sizes_[k + 1] << "x" << want_cols;
      throw Error(ErrorKind::kDimensionMismatch, msg.str());
    }
  }
}

std::size_t Network::total_neurons() const {
  return std::accumulate(layer_sizes_.begin() + 1, layer_sizes_.end(), std::size_t{0});
}

std::size_t Network::max_width() const {
  return *std::max_element(layer_sizes_.begin() + 1, layer_sizes_.end());
}

Vector augment(std::span<const double> a, bool bias_embedded) {
  Vector out(a.begin(), a.end());
  if (bias_embedded) out.push_back(1.0);
  return out;
}

ForwardPass forward(const Network& net, std::span<const double> x) {
  if (x.size() != net.input_dim()) {
    std::ostringstream msg;
    msg << "forward: input has " << x.size() << " entries, network expects " << net.input_dim();
    throw Error(ErrorKind::kDimensionMismatch, msg.str());
  }
  ForwardPass pass;
  pass.activations.emplace_back(x.begin(), x.end());
  const std::size_t n = net.num_weight_layers();
  for (std::size_t k = 0; k < n; ++k) {
    Vector z = net.weight(k).apply(augment(pass.activations.back(), net.bias_embedded()));
    if (k + 1 < n) pass.activations.push_back(relu(z));
    pass.preactivations.push_back(std::move(z));
  }
  return pass;
}

Vector evaluate(const Network& net, std::span<const double> x) {
  return forward(net, x).output();
}

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

std::size_t predict(const Network& net, std::span<const double> x) {
  return argmax(evaluate(net, x));
}

ActivationCache cache_activations(const Network& net, const DenseMatrix& points,
                                  std::vector<std::size_t> ids, unsigned jobs) {
  const std::size_t n = points.rows();
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "cache_activations: empty point set");
  if (ids.empty()) {
    ids.resize(n);
    std::iota(ids.begin(), ids.end(), 0);
  }
  if (ids.size() != n) throw Error(ErrorKind::kDimensionMismatch, "cache_activations: ids");

  ActivationCache cache;
  cache.point_ids = std::move(ids);
  const std::size_t layers = net.num_weight_layers();
  for (std::size_t k = 0; k < layers; ++k) {
    cache.activations.emplace_back(n, net.layer_sizes()[k]);
    cache.preactivations.emplace_back(n, net.layer_sizes()[k + 1]);
  }
  parallel_for(n, jobs, [&](std::size_t p) {
    const ForwardPass pass = forward(net, points.row(p));
    for (std::size_t k = 0; k < layers; ++k) {
      std::copy(pass.activations[k].begin(), pass.activations[k].end(),
                cache.activations[k].row(p).begin());
      std::copy(pass.preactivations[k].begin(), pass.preactivations[k].end(),
                cache.preactivations[k].row(p).begin());
    }
  });
  return cache;
}

std::size_t size_of(const Network& net) {
  std::size_t total = 0;
  for (const auto& w : net.weights()) total += w.nnz();
  return total;
}

Network to_sparse(const Network& net) {
  std::vector<WeightMatrix> weights;
  for (const auto& w : net.weights()) {
    weights.emplace_back(SparseRowMatrix::from_dense(w.to_dense()));
  }
  return Network(net.layer_sizes(), std::move(weights), net.bias_embedded());
}

}  // namespace corenet
