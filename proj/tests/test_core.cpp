#include <gtest/gtest.h>

#include "infproj/core.hpp"
#include "infproj/parallel.hpp"
#include "infproj/rng.hpp"

namespace infproj {
namespace {

TEST(SparseVec, FromEntriesCanonicalizes) {
  const sparse_vec v = sparse_vec::from_entries(
      {{3, 2.0}, {0, 0.5}, {1, 0.0}}, 5);
  ASSERT_EQ(v.nnz(), 2u);
  EXPECT_EQ(v.entries()[0].index, 0u);
  EXPECT_EQ(v.entries()[0].value, 0.5);
  EXPECT_EQ(v.entries()[1].index, 3u);
  EXPECT_EQ(v.entries()[1].value, 2.0);
}

TEST(SparseVec, RejectsDuplicatesAndOutOfRange) {
  EXPECT_THROW(sparse_vec::from_entries({{1, 1.0}, {1, 2.0}}, 4), error);
  EXPECT_THROW(sparse_vec::from_entries({{4, 1.0}}, 4), dim_error);
  sparse_vec v(3);
  v.push_back(1, 1.0);
  EXPECT_THROW(v.push_back(1, 2.0), error);
  EXPECT_THROW(v.push_back(0, 2.0), error);
}

TEST(SparseVec, EqualityIsEntrywise) {
  const sparse_vec a = sparse_vec::from_entries({{0, 1.0}, {2, -1.0}}, 3);
  const sparse_vec b = sparse_vec::from_entries({{2, -1.0}, {0, 1.0}}, 3);
  EXPECT_EQ(a, b);
  const sparse_vec c = sparse_vec::from_entries({{0, 1.0}}, 3);
  EXPECT_FALSE(a == c);
}

TEST(SparseVec, DenseRoundTripAndOps) {
  const dvec x = {1.0, 0.0, -2.0, 0.5};
  const sparse_vec v = sparse_vec::from_dense(x);
  EXPECT_EQ(v.nnz(), 3u);
  EXPECT_EQ(v.to_dense(), x);
  const dvec w = {2.0, 3.0, 1.0, -1.0};
  EXPECT_DOUBLE_EQ(v.dot(w), 1.0 * 2.0 - 2.0 * 1.0 - 0.5);
  dvec acc(4, 1.0);
  v.add_to(acc, 2.0);
  EXPECT_DOUBLE_EQ(acc[0], 3.0);
  EXPECT_DOUBLE_EQ(acc[1], 1.0);
  EXPECT_DOUBLE_EQ(acc[2], -3.0);
}

TEST(Rng, DeterministicAndSplitIsPure) {
  rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());

  rng parent(7);
  const rng child_before = parent.split(3);
  parent.next();
  parent.next();
  const rng child_after = parent.split(3);
  rng c1 = child_before, c2 = child_after;
  for (int i = 0; i < 16; ++i) EXPECT_EQ(c1.next(), c2.next());

  rng other = parent.split(4);
  rng same = parent.split(3);
  bool differs = false;
  for (int i = 0; i < 16; ++i) differs |= other.next() != same.next();
  EXPECT_TRUE(differs);
}

TEST(Rng, BoundedAndUniformRanges) {
  rng r(1);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_LT(r.bounded(17), 17u);
    const double u = r.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, NormalMoments) {
  rng r(5);
  double mean = 0.0, var = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    mean += z;
    var += z * z;
  }
  mean /= n;
  var = var / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.03);
}

TEST(Parallel, ChunkedReductionMatchesSequential) {
  const std::size_t n = 100000;
  dvec x(n);
  rng r(9);
  for (double &v : x) v = r.normal();

  const std::size_t chunk = 1024;
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  dvec partial(n_chunks, 0.0);
  for_chunks(n, chunk, [&](std::size_t c, std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += x[i];
    partial[c] = s;
  });
  double chunked = 0.0;
  for (double v : partial) chunked += v;

  dvec partial2(n_chunks, 0.0);
  for (std::size_t c = 0; c < n_chunks; ++c) {
    double s = 0.0;
    for (std::size_t i = c * chunk; i < std::min(n, (c + 1) * chunk); ++i)
      s += x[i];
    partial2[c] = s;
  }
  double sequential = 0.0;
  for (double v : partial2) sequential += v;
  EXPECT_EQ(chunked, sequential);  // bit-identical by fixed chunk grid
}

}  // namespace
}  // namespace infproj
