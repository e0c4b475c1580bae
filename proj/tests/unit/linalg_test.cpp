#include <gtest/gtest.h>

#include <cmath>

#include "corenet/error.hpp"
#include "corenet/linalg.hpp"
#include "fixtures.hpp"

namespace corenet {
namespace {

TEST(Linalg, MatvecHandExample) {
  const DenseMatrix m(2, 3, {1, 2, 3, -1, 0, 4});
  const Vector v{1, 1, 2};
  EXPECT_EQ(matvec(m, v), (Vector{9, 7}));
}

TEST(Linalg, DimensionMismatchThrows) {
  const DenseMatrix m(2, 3);
  const Vector v{1, 2};
  try {
    matvec(m, v);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimensionMismatch);
  }
}

TEST(Linalg, SparseDenseAgreement) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    DenseMatrix m = testing::random_points(17, 23, seed);
    RngStream rng(seed);
    for (double& x : m.data()) {
      if (rng.uniform() < 0.6) x = 0.0;
    }
    const Vector v = testing::random_points(1, 23, seed + 100).data();
    const auto sparse = SparseRowMatrix::from_dense(m);
    EXPECT_EQ(sparse.nnz(), m.nnz());
    const Vector a = matvec(m, v);
    const Vector b = matvec(sparse, v);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(std::abs(a[i] - b[i]), 1e-12);
    EXPECT_EQ(sparse.to_dense(), m);
  }
}

TEST(Linalg, CanonicalizeMergesAndDropsZeros) {
  const SparseRow row{{3, 1.0}, {1, 2.0}, {3, -1.0}, {0, 0.0}, {1, 0.5}};
  const SparseRow expected{{1, 2.5}};
  EXPECT_EQ(canonicalize(row), expected);
}

TEST(Linalg, SparseRowMatrixRejectsNonCanonicalRows) {
  EXPECT_THROW(SparseRowMatrix(3, std::vector<SparseRow>{{{2, 1.0}, {1, 1.0}}}), Error);
  EXPECT_THROW(SparseRowMatrix(3, std::vector<SparseRow>{{{1, 0.0}}}), Error);
  EXPECT_THROW(SparseRowMatrix(3, std::vector<SparseRow>{{{3, 1.0}}}), Error);
}

TEST(Linalg, ReluIdempotent) {
  const Vector v{-1, 0, 2, -0.5, 3};
  const Vector once = relu(v);
  EXPECT_EQ(once, (Vector{0, 0, 2, 0, 3}));
  EXPECT_EQ(relu(once), once);
}

TEST(Linalg, Norms) {
  const DenseMatrix m(2, 2, {3, -4, 0, 0});
  const auto n = norms(m);
  EXPECT_DOUBLE_EQ(n.l1, 7.0);
  EXPECT_DOUBLE_EQ(n.frobenius, 5.0);
}

TEST(Linalg, JacobiTwoByTwo) {
  const DenseMatrix m(2, 2, {2, 1, 1, 2});
  const auto eig = jacobi_eigen(m);
  ASSERT_EQ(eig.values.size(), 2u);
  EXPECT_NEAR(eig.values[0], 3.0, 1e-12);
  EXPECT_NEAR(eig.values[1], 1.0, 1e-12);
  EXPECT_NEAR(std::abs(eig.vectors(0, 0)), std::sqrt(0.5), 1e-10);
}

TEST(Linalg, SvdDiagonal) {
  const DenseMatrix m(2, 2, {3, 0, 0, 1});
  const auto f = truncated_svd(m, 1);
  ASSERT_EQ(f.rank(), 1u);
  EXPECT_NEAR(f.singular_values[0], 3.0, 1e-12);
  const DenseMatrix r = f.reconstruct();
  EXPECT_NEAR(r(0, 0), 3.0, 1e-12);
  EXPECT_NEAR(r(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(r(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(r(1, 1), 0.0, 1e-12);
}

double frobenius_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return std::sqrt(s);
}

TEST(Linalg, SvdFullRankRecovers) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const DenseMatrix m = testing::random_points(7 + seed, 12 - seed, seed);
    const auto f = truncated_svd(m, std::min(m.rows(), m.cols()));
    EXPECT_LE(frobenius_diff(f.reconstruct(), m), 1e-6 * norms(m).frobenius);
    for (std::size_t i = 1; i < f.rank(); ++i) {
      EXPECT_GE(f.singular_values[i - 1], f.singular_values[i]);
    }
    for (std::size_t i = 0; i < f.rank(); ++i) {
      for (std::size_t j = 0; j < f.rank(); ++j) {
        EXPECT_NEAR(dot(f.left[i], f.left[j]), i == j ? 1.0 : 0.0, 1e-6);
        EXPECT_NEAR(dot(f.right[i], f.right[j]), i == j ? 1.0 : 0.0, 1e-6);
      }
    }
  }
}

TEST(Linalg, SvdRankOneExact) {
  const Vector u{1, -2, 0.5, 3};
  const Vector v{2, 1, -1};
  DenseMatrix m(4, 3);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = u[i] * v[j];
  }
  const auto f = truncated_svd(m, 1);
  EXPECT_LE(frobenius_diff(f.reconstruct(), m), 1e-8);
}

TEST(Linalg, SvdRankOutOfRange) {
  const DenseMatrix m(3, 2, 1.0);
  EXPECT_THROW(truncated_svd(m, 0), Error);
  EXPECT_THROW(truncated_svd(m, 3), Error);
}

}  // namespace
}  // namespace corenet
