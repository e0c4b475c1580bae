#include <gtest/gtest.h>

#include <cmath>

#include "corenet/baselines.hpp"
#include "corenet/error.hpp"
#include "fixtures.hpp"

namespace corenet {
namespace {

TEST(Baselines, EntrywiseProbabilities) {
  const DenseMatrix w(2, 2, {1, 2, 2, 0});
  const auto l2 = entrywise_probabilities(w, EntrywiseScheme::kL2);
  const std::vector<double> l2_expected{1.0 / 9, 4.0 / 9, 4.0 / 9, 0.0};
  const auto l1 = entrywise_probabilities(w, EntrywiseScheme::kL1);
  const std::vector<double> l1_expected{0.2, 0.4, 0.4, 0.0};
  const auto hy = entrywise_probabilities(w, EntrywiseScheme::kHybrid);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(l2[i], l2_expected[i], 1e-15);
    EXPECT_NEAR(l1[i], l1_expected[i], 1e-15);
    EXPECT_NEAR(hy[i], 0.5 * (l1_expected[i] + l2_expected[i]), 1e-15);
  }
  EXPECT_THROW(entrywise_probabilities(DenseMatrix(2, 2), EntrywiseScheme::kL1), Error);
  EXPECT_STREQ(to_string(EntrywiseScheme::kHybrid), "l1l2");
}

TEST(Baselines, EntrywiseUnbiased) {
  const DenseMatrix w(2, 3, {1, -2, 0.5, 3, 0, -1});
  for (auto scheme : {EntrywiseScheme::kL1, EntrywiseScheme::kL2, EntrywiseScheme::kHybrid}) {
    const int runs = 5000;
    std::vector<double> sum(6, 0.0), sum2(6, 0.0);
    for (int r = 0; r < runs; ++r) {
      RngStream rng(1, StreamId{.trial = static_cast<std::uint64_t>(r)});
      const DenseMatrix d = entrywise_sparsify(w, 4, scheme, rng).to_dense();
      for (std::size_t i = 0; i < 6; ++i) {
        sum[i] += d.data()[i];
        sum2[i] += d.data()[i] * d.data()[i];
      }
    }
    for (std::size_t i = 0; i < 6; ++i) {
      const double mean = sum[i] / runs;
      const double se = std::sqrt(std::max(sum2[i] / runs - mean * mean, 0.0) / runs);
      EXPECT_NEAR(mean, w.data()[i], 5 * se + 1e-12) << to_string(scheme) << " entry " << i;
    }
  }
}

TEST(Baselines, EntrywiseCompressMeetsBudget) {
  const Network net = testing::random_network({40, 100, 10}, 2);
  const double f = 0.3;
  const Network out = entrywise_compress(net, f, EntrywiseScheme::kL2, 5);
  const double target = f * static_cast<double>(size_of(net));
  EXPECT_NEAR(static_cast<double>(size_of(out)), target, 0.05 * target);
  EXPECT_EQ(out.layer_sizes(), net.layer_sizes());
  EXPECT_EQ(entrywise_compress(net, f, EntrywiseScheme::kL2, 5), out);
}

TEST(Baselines, UniformSingleEdgeExact) {
  const SparseRow row{{2, 0.7}, {5, 0.1}};
  const SparseRow out = uniform_sparsify_neuron(row, 5, 3, 1, StreamId{});
  EXPECT_EQ(out, row);
}

TEST(Baselines, UniformCompressMeetsBudget) {
  const Network net = testing::random_network({30, 120, 10}, 3);
  const DenseMatrix v = testing::random_points(100, 30, 4, true);
  CompressionConfig base;
  base.seed = 9;
  const auto out = uniform_compress(net, v, 0.4, base);
  const double target = 0.4 * static_cast<double>(size_of(net));
  EXPECT_NEAR(static_cast<double>(out.stats.compressed_size), target, 0.03 * target);
}

Network single_layer(const DenseMatrix& w) {
  std::vector<WeightMatrix> ws{WeightMatrix(w)};
  return Network({w.cols(), w.rows()}, std::move(ws), false);
}

TEST(Baselines, SvdSizeAccounting) {
  const Network net = single_layer(testing::random_points(10, 20, 1));
  const Network low = svd_compress(net, 2);
  ASSERT_TRUE(low.weight(0).is_low_rank());
  const auto& f = std::get<LowRankMatrix>(low.weight(0).storage());
  EXPECT_EQ(f.left.rows(), 10u);
  EXPECT_EQ(f.left.cols(), 2u);
  EXPECT_EQ(f.right.rows(), 2u);
  EXPECT_EQ(f.right.cols(), 20u);
  EXPECT_EQ(size_of(low), f.left.nnz() + f.right.nnz());
  EXPECT_EQ(size_of(low), 60u);
}

TEST(Baselines, SvdFullRankReproduces) {
  const Network net = testing::random_network({8, 12, 5}, 6);
  const Network low = svd_compress(net, std::vector<std::size_t>{9, 5});
  const DenseMatrix x = testing::random_points(30, 8, 7);
  for (std::size_t p = 0; p < x.rows(); ++p) {
    const Vector a = evaluate(net, x.row(p));
    const Vector b = evaluate(low, x.row(p));
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-6);
  }
  EXPECT_THROW(svd_compress(net, std::vector<std::size_t>{2}), Error);
}

TEST(Baselines, SvdRankOneExact) {
  DenseMatrix w(3, 4);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) w(i, j) = (i + 1.0) * (j - 1.5);
  }
  const Network net = single_layer(w);
  const Network low = svd_compress(net, 1);
  const DenseMatrix back = low.weight(0).to_dense();
  for (std::size_t i = 0; i < w.data().size(); ++i) EXPECT_NEAR(back.data()[i], w.data()[i], 1e-8);
}

TEST(Baselines, SvdRanksForFraction) {
  const Network net = testing::random_network({20, 30, 10}, 8);
  const auto ranks = svd_ranks_for(net, 0.5);
  ASSERT_EQ(ranks.size(), 2u);
  // round(f * nnz / (rows + cols)), clamped to [1, min dims].
  EXPECT_EQ(ranks[0], static_cast<std::size_t>(std::round(0.5 * 30 * 21 / (30.0 + 21.0))));
  EXPECT_EQ(ranks[1], static_cast<std::size_t>(std::round(0.5 * 10 * 31 / (10.0 + 31.0))));
  EXPECT_EQ(svd_ranks_for(net, 1e-6), (std::vector<std::size_t>{1, 1}));
}

}  // namespace
}  // namespace corenet
