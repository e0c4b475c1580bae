#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "corenet/compressor.hpp"
#include "corenet/linalg.hpp"
#include "corenet/network.hpp"
#include "corenet/rng.hpp"

namespace corenet {

enum class EntrywiseScheme { kL1, kL2, kHybrid };

const char* to_string(EntrywiseScheme scheme);

// Row-major entry probabilities: l1 |w|/||W||_1, l2 w^2/||W||_F^2, hybrid
// their mean. Throws kNoPositiveMass for an all-zero matrix.
std::vector<double> entrywise_probabilities(const DenseMatrix& w, EntrywiseScheme scheme);

// n_samples i.i.d. entry draws, each kept entry reweighted to
// count * w_ij / (n_samples * p_ij).
SparseRowMatrix entrywise_sparsify(const DenseMatrix& w, std::uint64_t n_samples,
                                   EntrywiseScheme scheme, RngStream& rng);

// Every layer sparsified to about fraction * nnz(W) kept entries.
Network entrywise_compress(const Network& net, double fraction, EntrywiseScheme scheme,
                           std::uint64_t seed);

// Per-sign uniform edge sampling of one row; columns >= input_dim (the bias)
// are copied unchanged.
SparseRow uniform_sparsify_neuron(const SparseRow& row, std::size_t input_dim, std::uint64_t m,
                                  std::uint64_t seed, const StreamId& stream);

// The compressor with uniform q in place of sensitivities, budget-sized.
CompressionOutcome uniform_compress(const Network& net, const DenseMatrix& validation,
                                    double fraction, const CompressionConfig& base);

// Each layer replaced by its rank-r truncated SVD with sigma folded into the
// left factor. size_of() of the result counts nnz(u_i) + nnz(v_i).
Network svd_compress(const Network& net, std::span<const std::size_t> ranks);
Network svd_compress(const Network& net, std::size_t rank);

// Per-layer ranks whose factor sizes come closest to fraction * nnz(W).
std::vector<std::size_t> svd_ranks_for(const Network& net, double fraction);

}  // namespace corenet
