#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "corenet/linalg.hpp"

namespace corenet {

// Rank-r factorization applied as two products: left * (right * v).
// Singular values are folded into `left`.
struct LowRankMatrix {
  DenseMatrix left;   // rows x r
  DenseMatrix right;  // r x cols

  std::size_t rows() const { return left.rows(); }
  std::size_t cols() const { return right.cols(); }
  std::size_t nnz() const { return left.nnz() + right.nnz(); }

  friend bool operator==(const LowRankMatrix&, const LowRankMatrix&) = default;
};

class WeightMatrix {
 public:
  using Storage = std::variant<DenseMatrix, SparseRowMatrix, LowRankMatrix>;

  WeightMatrix() = default;
  WeightMatrix(DenseMatrix m) : storage_(std::move(m)) {}
  WeightMatrix(SparseRowMatrix m) : storage_(std::move(m)) {}
  WeightMatrix(LowRankMatrix m) : storage_(std::move(m)) {}

  std::size_t rows() const;
  std::size_t cols() const;
  std::size_t nnz() const;

  bool is_dense() const { return std::holds_alternative<DenseMatrix>(storage_); }
  bool is_sparse() const { return std::holds_alternative<SparseRowMatrix>(storage_); }
  bool is_low_rank() const { return std::holds_alternative<LowRankMatrix>(storage_); }

  const Storage& storage() const { return storage_; }

  Vector apply(std::span<const double> v) const;

  // Nonzero entries of row i.
  SparseRow row(std::size_t i) const;
  DenseMatrix to_dense() const;

  friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

 private:
  Storage storage_;
};

// Fully-connected ReLU network. layer_sizes holds eta^1..eta^L; weights[k]
// maps layer k+1 to layer k+2 (1-based layers). When bias_embedded is set,
// every weight matrix carries the bias as its last column and inputs are
// augmented with a trailing constant 1.
class Network {
 public:
  Network() = default;
  Network(std::vector<std::size_t> layer_sizes, std::vector<WeightMatrix> weights,
          bool bias_embedded);

  std::size_t num_layers() const { return layer_sizes_.size(); }
  std::size_t num_weight_layers() const { return weights_.size(); }
  std::size_t input_dim() const { return layer_sizes_.front(); }
  std::size_t output_dim() const { return layer_sizes_.back(); }
  bool bias_embedded() const { return bias_embedded_; }

  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  const std::vector<WeightMatrix>& weights() const { return weights_; }
  const WeightMatrix& weight(std::size_t k) const { return weights_.at(k); }

  // Total neurons over layers 2..L and the widest of them.
  std::size_t total_neurons() const;
  std::size_t max_width() const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<std::size_t> layer_sizes_;
  std::vector<WeightMatrix> weights_;
  bool bias_embedded_ = true;
};

// Appends the bias constant when required.
Vector augment(std::span<const double> a, bool bias_embedded);

struct ForwardPass {
  // activations[k] is the input to weight layer k: a^1 = x, a^{k+1} = relu(z^{k+1}).
  std::vector<Vector> activations;
  // preactivations[k] = z^{k+2} = W^{k+2} a^{k+1}.
  std::vector<Vector> preactivations;

  const Vector& output() const { return preactivations.back(); }
};

ForwardPass forward(const Network& net, std::span<const double> x);
Vector evaluate(const Network& net, std::span<const double> x);

// Index of the largest output; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> v);
std::size_t predict(const Network& net, std::span<const double> x);

// Per-layer activations of a point set, one row per point in input order.
struct ActivationCache {
  std::vector<std::size_t> point_ids;
  std::vector<DenseMatrix> activations;     // activations[k]: n x eta^{k+1}
  std::vector<DenseMatrix> preactivations;  // preactivations[k]: n x eta^{k+2}

  std::size_t size() const { return point_ids.size(); }
};

// `points` rows are inputs; `ids` label them (defaults to 0..n-1).
ActivationCache cache_activations(const Network& net, const DenseMatrix& points,
                                  std::vector<std::size_t> ids = {}, unsigned jobs = 1);

std::size_t size_of(const Network& net);

// Same network with every layer stored sparse.
Network to_sparse(const Network& net);

}  // namespace corenet
