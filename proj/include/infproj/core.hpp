#ifndef INFPROJ_CORE_HPP
#define INFPROJ_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace infproj {

using dvec = std::vector<double>;
using index_t = std::uint32_t;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct dim_error : error {
  dim_error(index_t index, index_t dim, const std::string &where)
      : error(where + ": index " + std::to_string(index) +
              " out of range for dimension " + std::to_string(dim)),
        index(index),
        dim(dim) {}
  index_t index;
  index_t dim;
};

struct parse_error : error {
  parse_error(std::size_t line, const std::string &what)
      : error("line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

struct config_error : error {
  using error::error;
};

struct divergence_error : error {
  divergence_error(const std::string &solver, long iteration)
      : error(solver + ": non-finite iterate at iteration " +
              std::to_string(iteration)),
        iteration(iteration) {}
  long iteration;
};

struct invariant_error : error {
  using error::error;
};

struct sparse_entry {
  index_t index;
  double value;
  friend bool operator==(const sparse_entry &a, const sparse_entry &b) {
    return a.index == b.index && a.value == b.value;
  }
};

// Canonical sparse vector: strictly increasing indices < dim, no stored zeros.
class sparse_vec {
 public:
  sparse_vec() = default;
  explicit sparse_vec(index_t dim) : dim_(dim) {}

  static sparse_vec from_entries(std::vector<sparse_entry> entries,
                                 index_t dim) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const sparse_entry &a, const sparse_entry &b) {
                       return a.index < b.index;
                     });
    sparse_vec v(dim);
    v.entries_.reserve(entries.size());
    for (const sparse_entry &e : entries) {
      if (e.index >= dim) throw dim_error(e.index, dim, "sparse_vec");
      if (!v.entries_.empty() && v.entries_.back().index == e.index)
        throw error("sparse_vec: duplicate index " + std::to_string(e.index));
      if (e.value != 0.0) v.entries_.push_back(e);
    }
    return v;
  }

  static sparse_vec from_dense(const dvec &x) {
    sparse_vec v(static_cast<index_t>(x.size()));
    for (index_t i = 0; i < x.size(); ++i)
      if (x[i] != 0.0) v.entries_.push_back({i, x[i]});
    return v;
  }

  dvec to_dense() const {
    dvec x(dim_, 0.0);
    for (const sparse_entry &e : entries_) x[e.index] = e.value;
    return x;
  }

  // Appends an entry; indices must arrive in strictly increasing order.
  void push_back(index_t index, double value) {
    if (index >= dim_) throw dim_error(index, dim_, "sparse_vec");
    if (!entries_.empty() && entries_.back().index >= index)
      throw error("sparse_vec: indices must be strictly increasing");
    if (value != 0.0) entries_.push_back({index, value});
  }

  index_t dim() const { return dim_; }
  std::size_t nnz() const { return entries_.size(); }
  std::span<const sparse_entry> entries() const { return entries_; }

  double dot(const dvec &x) const {
    double s = 0.0;
    for (const sparse_entry &e : entries_) s += e.value * x[e.index];
    return s;
  }

  double squared_norm() const {
    double s = 0.0;
    for (const sparse_entry &e : entries_) s += e.value * e.value;
    return s;
  }

  // out += scale * this
  void add_to(dvec &out, double scale) const {
    for (const sparse_entry &e : entries_) out[e.index] += scale * e.value;
  }

  friend bool operator==(const sparse_vec &a, const sparse_vec &b) {
    return a.dim_ == b.dim_ && a.entries_ == b.entries_;
  }

 private:
  std::vector<sparse_entry> entries_;
  index_t dim_ = 0;
};

inline double dot(const dvec &a, const dvec &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(const dvec &a) { return dot(a, a); }

inline double norm(const dvec &a) { return std::sqrt(squared_norm(a)); }

inline void axpy(double alpha, const dvec &x, dvec &y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(dvec &x, double alpha) {
  for (double &v : x) v *= alpha;
}

inline void fill_zero(dvec &x) { std::fill(x.begin(), x.end(), 0.0); }

inline bool all_finite(const dvec &x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

inline double squared_distance(const dvec &a, const dvec &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace infproj

#endif
