#include <gtest/gtest.h>

#include <cmath>

#include "corenet/error.hpp"
#include "corenet/eval.hpp"
#include "fixtures.hpp"

namespace corenet {
namespace {

Network affine(std::size_t in, std::size_t out, const std::vector<double>& data) {
  std::vector<WeightMatrix> w{WeightMatrix(DenseMatrix(out, in + 1, data))};
  return Network({in, out}, std::move(w), true);
}

TEST(Eval, RelativeErrorOffsets) {
  const Network f = affine(1, 2, {1, 0, 1, 0});
  const Network g = affine(1, 2, {1, 1, 1, -1});
  const DenseMatrix x(3, 1, {0.5, -2, 7});
  EXPECT_DOUBLE_EQ(relative_error(g, f, x), 2.0);
  EXPECT_DOUBLE_EQ(relative_error(f, f, x), 0.0);
  EXPECT_THROW(relative_error(f, f, DenseMatrix(0, 1)), Error);
}

TEST(Eval, AccuracyDropConstantClass) {
  Dataset data;
  data.features = DenseMatrix::identity(10);
  data.num_classes = 10;
  for (int i = 0; i < 10; ++i) data.labels.push_back(i);
  data.splits.assign(10, Split::kTest);
  std::vector<WeightMatrix> w{WeightMatrix(DenseMatrix::identity(10))};
  const Network perfect({10, 10}, std::move(w), false);
  std::vector<double> constant(10 * 11, 0.0);
  constant[10] = 1.0;  // bias of output 0
  const Network always_zero = affine(10, 10, constant);
  EXPECT_NEAR(accuracy_drop(perfect, always_zero, data), 0.9, 1e-15);
}

TEST(Eval, MarginLoss) {
  Dataset data;
  data.features = DenseMatrix(2, 1, {1, 2});
  data.labels = {0, 0};
  data.num_classes = 2;
  data.splits.assign(2, Split::kTest);
  // Outputs (x, 0): margins 1 and 2.
  const Network net = affine(1, 2, {1, 0, 0, 0});
  EXPECT_DOUBLE_EQ(margin_loss(net, 0.5, data), 0.0);
  EXPECT_DOUBLE_EQ(margin_loss(net, 1.0, data), 0.5);  // exact margin counts as loss
  EXPECT_DOUBLE_EQ(margin_loss(net, 1e300, data), 1.0);
}

TEST(Eval, BoundHandTuple) {
  GeneralizationBoundInput in;
  in.gamma = 1.0;
  in.n = 8;
  in.max_output_norm_sq = 4.0;
  in.num_layers = 3;
  in.delta_products = {1.0, 1.0};
  in.sensitivity_sums = {1.5, 0.5};
  in.margin_loss = 0.1;
  EXPECT_NEAR(generalization_bound(in), 3.1, 1e-12);

  const double radical = generalization_bound(in) - 0.1;
  in.n = 32;
  EXPECT_NEAR(generalization_bound(in) - 0.1, radical / 2.0, 1e-12);

  in.sensitivity_sums = {0.0, 0.0};
  EXPECT_DOUBLE_EQ(generalization_bound(in), 0.1);
  in.gamma = 0.0;
  EXPECT_THROW(generalization_bound(in), Error);
}

TEST(Eval, MeanStd) {
  const std::vector<double> v{1, 2, 3, 4};
  const auto [m, s] = mean_std(v);
  EXPECT_DOUBLE_EQ(m, 2.5);
  EXPECT_DOUBLE_EQ(s, std::sqrt(1.25));
  const std::vector<double> one{7};
  EXPECT_DOUBLE_EQ(mean_std(one).second, 0.0);
}

TEST(Eval, SchemeNames) {
  for (Scheme s : {Scheme::kCoreNet, Scheme::kCoreNetPlus, Scheme::kCoreNetPlusPlus,
                   Scheme::kUniform, Scheme::kL1, Scheme::kL2, Scheme::kHybrid, Scheme::kSvd}) {
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  }
  EXPECT_EQ(parse_scheme("hybrid"), Scheme::kHybrid);
  EXPECT_THROW(parse_scheme("nope"), Error);
}

TEST(Eval, SweepShape) {
  Dataset data = make_blobs(600, 3, 5, 4.0, 1);
  assign_splits(data, SplitFractions{0.0, 0.5}, 2);
  const Network net = testing::random_network({5, 40, 3}, 3);
  SweepConfig cfg;
  cfg.schemes = {Scheme::kCoreNetPlus, Scheme::kUniform, Scheme::kL2, Scheme::kSvd};
  cfg.fractions = {1.0, 0.3};
  cfg.trials = 2;
  cfg.base.seed = 4;
  const auto report = sweep(net, data, cfg);
  ASSERT_EQ(report.points.size(), 8u);
  EXPECT_EQ(report.points[0].scheme, "corenet+");
  EXPECT_DOUBLE_EQ(report.points[0].fraction, 0.3);
  EXPECT_DOUBLE_EQ(report.points[1].fraction, 1.0);
  EXPECT_EQ(report.points[7].scheme, "svd");
  EXPECT_EQ(report.original_size, size_of(net));
  for (const auto& p : report.points) {
    EXPECT_FALSE(p.error.has_value()) << *p.error;
    EXPECT_EQ(p.trial_count, 2u);
    EXPECT_GE(p.err_mean, 0.0);
  }
  // Uniform at full budget keeps every edge.
  EXPECT_NEAR(report.points[3].err_mean, 0.0, 1e-9);
  cfg.jobs = 4;
  const auto again = sweep(net, data, cfg);
  EXPECT_EQ(report_csv(again), report_csv(report));

  const std::string csv = report_csv(report);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "scheme,fraction,trial_count,size,err_mean,err_std,accdrop_mean,accdrop_std");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
}

TEST(Eval, SweepSingleTrialHasZeroStd) {
  Dataset data = make_blobs(400, 2, 4, 4.0, 5);
  assign_splits(data, SplitFractions{0.0, 0.5}, 6);
  const Network net = testing::random_network({4, 20, 2}, 7);
  SweepConfig cfg;
  cfg.schemes = {Scheme::kCoreNet};
  cfg.fractions = {0.5};
  const auto report = sweep(net, data, cfg);
  ASSERT_EQ(report.points.size(), 1u);
  EXPECT_EQ(report.points[0].err_std, 0.0);
  EXPECT_EQ(report.points[0].accdrop_std, 0.0);
}

TEST(Eval, SweepRecordsCellFailures) {
  Dataset data = make_blobs(40, 2, 4, 4.0, 5);
  assign_splits(data, SplitFractions{0.5, 0.1}, 6);  // 4 validation points: too few
  const Network net = testing::random_network({4, 20, 2}, 7);
  SweepConfig cfg;
  cfg.schemes = {Scheme::kCoreNet, Scheme::kL1};
  cfg.fractions = {0.5};
  const auto report = sweep(net, data, cfg);
  ASSERT_EQ(report.points.size(), 2u);
  ASSERT_TRUE(report.points[0].error.has_value());
  EXPECT_EQ(report.points[0].trial_count, 0u);
  EXPECT_FALSE(report.points[1].error.has_value());
}

}  // namespace
}  // namespace corenet
