#ifndef INFPROJ_TESTS_TEST_UTIL_HPP
#define INFPROJ_TESTS_TEST_UTIL_HPP

#include <algorithm>
#include <vector>

#include "infproj/dataset.hpp"
#include "infproj/rng.hpp"

namespace infproj::testing {

// Random real-valued sparse dataset for gradient and objective checks.
inline dataset make_random_dataset(std::size_t n, index_t dim,
                                   std::uint64_t seed,
                                   double density = 0.7) {
  rng r(seed);
  std::vector<sparse_vec> rows;
  std::vector<int> labels;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    sparse_vec row(dim);
    bool any = false;
    for (index_t j = 0; j < dim; ++j) {
      if (r.uniform01() < density) {
        row.push_back(j, r.normal());
        any = true;
      }
    }
    if (!any) row.push_back(static_cast<index_t>(r.bounded(dim)), 1.0);
    rows.push_back(std::move(row));
    labels.push_back(r.uniform01() < 0.5 ? 1 : -1);
  }
  return dataset(std::move(rows), std::move(labels), dim);
}

inline dvec random_dvec(std::size_t n, std::uint64_t seed, double s = 1.0) {
  rng r(seed);
  dvec x(n);
  for (double &v : x) v = s * r.normal();
  return x;
}

// Margin z such that log(1 + exp(-z)) equals the requested loss value.
inline double margin_for_logistic_loss(double loss) {
  return -std::log(std::expm1(loss));
}

inline std::vector<std::uint32_t> all_indices(std::size_t n) {
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
  return idx;
}

}  // namespace infproj::testing

#endif
