#include <gtest/gtest.h>

#include <fstream>

#include "corenet/dataset.hpp"
#include "corenet/error.hpp"
#include "fixtures.hpp"

namespace corenet {
namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected corenet::Error";
  return ErrorKind::kInvalidArgument;
}

TEST(Dataset, CsvRoundTripIsExact) {
  testing::TempDir dir("csv");
  Dataset data = make_blobs(50, 3, 4, 3.0, 1);
  data.features(0, 0) = 0.1 + 0.2;  // not exactly representable in short decimal
  save_csv(data, dir / "d.csv");
  const Dataset back = load_csv(dir / "d.csv");
  EXPECT_EQ(back.features, data.features);
  EXPECT_EQ(back.labels, data.labels);
  EXPECT_EQ(back.num_classes, data.num_classes);
}

TEST(Dataset, LoadErrors) {
  testing::TempDir dir("csv_err");
  EXPECT_EQ(kind_of([&] { load_csv(dir / "missing.csv"); }), ErrorKind::kNotFound);
  {
    std::ofstream(dir / "bad.csv") << "label,f0\n1,abc\n";
  }
  EXPECT_EQ(kind_of([&] { load_csv(dir / "bad.csv"); }), ErrorKind::kFormat);
  {
    std::ofstream(dir / "ragged.csv") << "label,f0,f1\n1,0.5\n";
  }
  EXPECT_EQ(kind_of([&] { load_csv(dir / "ragged.csv"); }), ErrorKind::kFormat);
}

TEST(Dataset, SplitsPartitionThePoints) {
  Dataset data = make_digits(1000, 3);
  assign_splits(data, SplitFractions{}, 7);
  const auto tr = data.indices_of(Split::kTrain).size();
  const auto va = data.indices_of(Split::kValidation).size();
  const auto te = data.indices_of(Split::kTest).size();
  EXPECT_EQ(tr + va + te, 1000u);
  EXPECT_EQ(tr, 600u);
  EXPECT_EQ(va, 200u);
  Dataset again = make_digits(1000, 3);
  assign_splits(again, SplitFractions{}, 7);
  EXPECT_EQ(again.splits, data.splits);
}

TEST(Dataset, GeneratorsAreDeterministicAndValid) {
  const Dataset a = make_digits(300, 5);
  const Dataset b = make_digits(300, 5);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.num_classes, 10);
  EXPECT_EQ(a.dim(), 64u);
  for (double v : a.features.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_NO_THROW(a.validate());
  const Dataset blobs = make_blobs(100, 4, 3, 5.0, 2);
  EXPECT_EQ(blobs.num_classes, 4);
  EXPECT_NO_THROW(blobs.validate());
}

TEST(Dataset, ValidateRejectsBadLabels) {
  Dataset d = make_blobs(10, 2, 2, 1.0, 0);
  d.labels[3] = 5;
  EXPECT_THROW(d.validate(), Error);
}

}  // namespace
}  // namespace corenet
