#ifndef INFPROJ_DATASET_HPP
#define INFPROJ_DATASET_HPP

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace infproj {

// Immutable sparse design matrix with ±1 labels.
class dataset {
 public:
  dataset(std::vector<sparse_vec> rows, std::vector<int> labels, index_t dim)
      : rows_(std::move(rows)), labels_(std::move(labels)), dim_(dim) {
    if (rows_.empty()) throw error("dataset: empty (n = 0) is rejected");
    if (rows_.size() != labels_.size())
      throw error("dataset: row/label count mismatch");
    for (const sparse_vec &r : rows_)
      for (const sparse_entry &e : r.entries())
        if (e.index >= dim_) throw dim_error(e.index, dim_, "dataset");
    for (int y : labels_)
      if (y != 1 && y != -1) throw error("dataset: labels must be +/-1");
    // contiguous copy of the rows for the per-sample gradient hot paths
    offset_.reserve(rows_.size() + 1);
    offset_.push_back(0);
    std::size_t total = 0;
    for (const sparse_vec &r : rows_) {
      total += r.nnz();
      offset_.push_back(total);
    }
    flat_index_.reserve(total);
    flat_value_.reserve(total);
    for (const sparse_vec &r : rows_)
      for (const sparse_entry &e : r.entries()) {
        flat_index_.push_back(e.index);
        flat_value_.push_back(e.value);
      }
  }

  std::size_t n() const { return rows_.size(); }
  index_t dim() const { return dim_; }
  const sparse_vec &row(std::size_t i) const { return rows_[i]; }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<sparse_vec> &rows() const { return rows_; }
  const std::vector<int> &labels() const { return labels_; }

  double max_row_squared_norm() const {
    double m = 0.0;
    for (const sparse_vec &r : rows_)
      m = std::max(m, r.squared_norm());
    return m;
  }

  double dot_row(std::size_t i, const dvec &x) const {
    double s = 0.0;
    for (std::size_t k = offset_[i]; k < offset_[i + 1]; ++k)
      s += flat_value_[k] * x[flat_index_[k]];
    return s;
  }

  void add_row(std::size_t i, double w, dvec &out) const {
    for (std::size_t k = offset_[i]; k < offset_[i + 1]; ++k)
      out[flat_index_[k]] += w * flat_value_[k];
  }

  dataset select(const std::vector<std::size_t> &idx) const {
    std::vector<sparse_vec> rows;
    std::vector<int> labels;
    rows.reserve(idx.size());
    labels.reserve(idx.size());
    for (std::size_t i : idx) {
      rows.push_back(rows_[i]);
      labels.push_back(labels_[i]);
    }
    return dataset(std::move(rows), std::move(labels), dim_);
  }

 private:
  std::vector<sparse_vec> rows_;
  std::vector<int> labels_;
  index_t dim_;
  std::vector<index_t> flat_index_;
  dvec flat_value_;
  std::vector<std::size_t> offset_;
};

namespace detail {

inline double parse_value(std::string_view tok, std::size_t line,
                          const char *what) {
  double v = 0.0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);  // from_chars
  if (tok.empty())
    throw parse_error(line, std::string("non-numeric ") + what);
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw parse_error(line, std::string("non-numeric ") + what + " '" +
                                std::string(tok) + "'");
  if (!std::isfinite(v))
    throw parse_error(line, std::string("non-finite ") + what + " '" +
                                std::string(tok) + "'");
  return v;
}

inline int parse_label(std::string_view tok, std::size_t line) {
  const double v = parse_value(tok, line, "label");
  if (v == 1.0) return 1;
  if (v == -1.0) return -1;
  if (v == 0.0) return -1;  // 0/1 labels map to -1/+1
  throw parse_error(line, "label '" + std::string(tok) +
                              "' not in {+1, -1, 0, 1}");
}

}  // namespace detail

// libsvm text format: "±label idx:val idx:val ...", 1-based indices,
// '#' starts a comment. Out-of-order indices are re-sorted; duplicates,
// malformed tokens and non-numeric values are errors carrying the line.
inline dataset parse_libsvm(std::istream &in,
                            std::optional<index_t> dim_override = {}) {
  std::vector<sparse_vec> raw_rows;
  std::vector<std::vector<sparse_entry>> entries;
  std::vector<int> labels;
  index_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    if (const auto hash = sv.find('#'); hash != std::string_view::npos)
      sv = sv.substr(0, hash);
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string_view {
      while (pos < sv.size() && (sv[pos] == ' ' || sv[pos] == '\t' ||
                                 sv[pos] == '\r'))
        ++pos;
      const std::size_t start = pos;
      while (pos < sv.size() && sv[pos] != ' ' && sv[pos] != '\t' &&
             sv[pos] != '\r')
        ++pos;
      return sv.substr(start, pos - start);
    };
    const std::string_view label_tok = next_token();
    if (label_tok.empty()) continue;  // blank line
    labels.push_back(detail::parse_label(label_tok, line_no));
    std::vector<sparse_entry> row;
    for (std::string_view tok = next_token(); !tok.empty();
         tok = next_token()) {
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos || colon == 0 ||
          colon + 1 == tok.size())
        throw parse_error(line_no,
                          "malformed token '" + std::string(tok) + "'");
      const std::string_view idx_tok = tok.substr(0, colon);
      unsigned long long idx = 0;
      const auto res = std::from_chars(idx_tok.data(),
                                       idx_tok.data() + idx_tok.size(), idx);
      if (res.ec != std::errc() || res.ptr != idx_tok.data() + idx_tok.size())
        throw parse_error(line_no,
                          "malformed index '" + std::string(idx_tok) + "'");
      if (idx == 0)
        throw parse_error(line_no, "index 0 (libsvm indices are 1-based)");
      const double value =
          detail::parse_value(tok.substr(colon + 1), line_no, "value");
      const index_t zero_based = static_cast<index_t>(idx - 1);
      row.push_back({zero_based, value});
      max_index = std::max(max_index, zero_based);
    }
    std::stable_sort(row.begin(), row.end(),
                     [](const sparse_entry &a, const sparse_entry &b) {
                       return a.index < b.index;
                     });
    for (std::size_t i = 1; i < row.size(); ++i)
      if (row[i].index == row[i - 1].index)
        throw parse_error(line_no, "duplicate index " +
                                       std::to_string(row[i].index + 1));
    entries.push_back(std::move(row));
  }
  if (entries.empty()) throw error("parse_libsvm: no data rows");
  index_t dim = labels.empty() ? 0 : max_index + 1;
  if (dim_override) {
    if (*dim_override < dim)
      throw error("parse_libsvm: dim override " +
                  std::to_string(*dim_override) + " smaller than max index " +
                  std::to_string(dim));
    dim = *dim_override;
  }
  raw_rows.reserve(entries.size());
  for (auto &row : entries) {
    sparse_vec v(dim);
    for (const sparse_entry &e : row) v.push_back(e.index, e.value);
    raw_rows.push_back(std::move(v));
  }
  return dataset(std::move(raw_rows), std::move(labels), dim);
}

inline dataset parse_libsvm_file(const std::string &path,
                                 std::optional<index_t> dim_override = {}) {
  std::ifstream in(path);
  if (!in) throw error("cannot open dataset file '" + path + "'");
  return parse_libsvm(in, dim_override);
}

inline std::string serialize_libsvm(const dataset &d) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < d.n(); ++i) {
    out += d.label(i) > 0 ? "+1" : "-1";
    for (const sparse_entry &e : d.row(i).entries()) {
      std::snprintf(buf, sizeof(buf), " %u:%.17g", e.index + 1, e.value);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

// Deterministic disjoint partition with sizes (ceil(frac*n), rest).
inline std::pair<dataset, dataset> split_train_test(const dataset &d,
                                                    double frac,
                                                    std::uint64_t seed) {
  if (!(frac > 0.0 && frac < 1.0))
    throw error("split_train_test: fraction must lie in (0, 1)");
  if (d.n() < 2) throw error("split_train_test: need at least 2 rows");
  const std::size_t n = d.n();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  rng r(seed);
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(idx[i], idx[r.bounded(i + 1)]);
  const auto n_train = static_cast<std::size_t>(
      std::ceil(frac * static_cast<double>(n) - 1e-9));
  if (n_train == 0 || n_train >= n)
    throw error("split_train_test: split leaves an empty part");
  std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + n_train);
  std::vector<std::size_t> test_idx(idx.begin() + n_train, idx.end());
  return {d.select(train_idx), d.select(test_idx)};
}

inline dataset subsample(const dataset &d, std::size_t count,
                         std::uint64_t seed) {
  if (count < 1 || count > d.n())
    throw error("subsample: count out of range");
  if (count == d.n()) return d;
  const std::size_t n = d.n();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  rng r(seed);
  for (std::size_t i = 0; i < count; ++i)
    std::swap(idx[i], idx[i + r.bounded(n - i)]);
  idx.resize(count);
  return d.select(idx);
}

// 0-1 error of the linear classifier sign(<x, row>); zero margin counts +1.
inline double error01(const dataset &d, const dvec &x) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < d.n(); ++i) {
    const double m = d.dot_row(i, x);
    const int pred = m < 0.0 ? -1 : 1;
    if (pred != d.label(i)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(d.n());
}

}  // namespace infproj

#endif
