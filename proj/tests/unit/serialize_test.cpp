#include <gtest/gtest.h>

#include "corenet/error.hpp"
#include "corenet/serialize.hpp"
#include "fixtures.hpp"

namespace corenet {
namespace {

TEST(Serialize, Crc32Digest) {
  EXPECT_EQ(digest_bytes(""), "crc32:00000000");
  EXPECT_EQ(digest_bytes("123456789"), "crc32:cbf43926");
}

TEST(Serialize, ConfigRoundTrip) {
  CompressionConfig c;
  c.epsilon = 0.3;
  c.delta = 0.05;
  c.mode = CompressionMode::kCoreNetPlusPlus;
  c.constants.k = 3.0;
  c.sizing = BudgetSizing{0.25};
  c.seed = 99;
  c.generalize_points = 1000;
  c.scheme = SamplingScheme::kUniform;
  c.max_amplification_trials = 7;
  CompressionConfig back;
  apply_json(to_json(c), back);
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(digest(to_json(back)), digest(to_json(c)));
}

TEST(Serialize, ApplyJsonRejectsUnknownAndMistyped) {
  CompressionConfig c;
  try {
    apply_json(Json{{"epsilonn", 0.1}}, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
  }
  EXPECT_THROW(apply_json(Json{{"delta", "x"}}, c), Error);
  EXPECT_THROW(apply_json(Json::array(), c), Error);
  apply_json(Json{{"eps", 0.2}, {"kprime", 4.0}}, c);
  EXPECT_DOUBLE_EQ(c.epsilon, 0.2);
  EXPECT_DOUBLE_EQ(c.constants.k_prime, 4.0);
}

TEST(Serialize, CompressionReportFields) {
  const Network net = testing::random_network({5, 20, 3}, 1);
  const DenseMatrix v = testing::random_points(100, 5, 2, true);
  CompressionConfig c;
  c.mode = CompressionMode::kCoreNetPlus;
  c.sizing = BudgetSizing{0.5};
  const auto outcome = compress(net, v, c);
  const Json r = compression_report(outcome, c);
  EXPECT_EQ(r["original_size"].get<std::size_t>(), size_of(net));
  EXPECT_EQ(r["compressed_size"].get<std::size_t>(), outcome.stats.compressed_size);
  EXPECT_EQ(r["provenance"]["config"], outcome.compressed.config_digest);
  EXPECT_EQ(r["provenance"]["plan"], digest(to_json(outcome.plan)));
  EXPECT_TRUE(r.contains("pruned"));
}

TEST(Serialize, DatasetDigestSensitiveToContent) {
  Dataset a = make_blobs(20, 2, 2, 1.0, 1);
  const std::string d = digest(a);
  EXPECT_EQ(d, digest(make_blobs(20, 2, 2, 1.0, 1)));
  a.labels[0] = 1 - a.labels[0];
  EXPECT_NE(d, digest(a));
}

}  // namespace
}  // namespace corenet
