#ifndef INFPROJ_SYNTHETIC_HPP
#define INFPROJ_SYNTHETIC_HPP

#include <limits>

#include "core.hpp"
#include "dataset.hpp"
#include "problem.hpp"
#include "rng.hpp"

namespace infproj {

// Sparse binary-feature classification data from a planted linear teacher.
// Labels are thresholded at an empirical quantile (so the class ratio is
// exact) and a small fraction is flipped to keep the problem non-separable.
inline dataset make_synthetic_classification(std::size_t n, index_t dim,
                                             std::size_t avg_nnz,
                                             std::uint64_t seed,
                                             double positive_fraction = 0.24,
                                             double flip_fraction = 0.05) {
  if (n < 1 || dim < 1 || avg_nnz < 1)
    throw error("make_synthetic_classification: bad sizes");
  rng r(seed);
  dvec teacher(dim);
  for (double &v : teacher)
    v = r.normal() / std::sqrt(static_cast<double>(avg_nnz));
  std::vector<sparse_vec> rows;
  rows.reserve(n);
  dvec margins(n);
  std::vector<index_t> idx;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = std::min<std::size_t>(
        dim, 1 + r.bounded(2 * avg_nnz));  // mean ~= avg_nnz
    idx.clear();
    while (idx.size() < k) {
      const index_t j = static_cast<index_t>(r.bounded(dim));
      if (std::find(idx.begin(), idx.end(), j) == idx.end()) idx.push_back(j);
    }
    std::sort(idx.begin(), idx.end());
    sparse_vec row(dim);
    for (index_t j : idx) row.push_back(j, 1.0);
    margins[i] = row.dot(teacher) + 0.3 * r.normal();
    rows.push_back(std::move(row));
  }
  dvec sorted = margins;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t cut = std::min<std::size_t>(
      n - 1, static_cast<std::size_t>((1.0 - positive_fraction) *
                                      static_cast<double>(n)));
  const double threshold = sorted[cut];
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = margins[i] > threshold ? 1 : -1;
    if (r.uniform01() < flip_fraction) labels[i] = -labels[i];
  }
  return dataset(std::move(rows), std::move(labels), dim);
}

// Smooth bi-convex test problem with a planted stationary point:
//   f0(x, y) = g(x) - y^T ell(x),  g(x) = x^T diag(a) x / 2 - b^T x,
//   ell(x) = C x + d,              h(y) = (kappa/2) ||y||^2 on its orthant.
// Per-sample oracles add zero-mean offsets (eps_i to grad g, delta_i to ell),
// so the full-batch call is exact. b and d are derived from a chosen interior
// (x*, y*), which is therefore the unique stationary point when
// diag(a) - C^T C / kappa is positive definite.
class synthetic_quadratic_problem {
 public:
  struct spec {
    std::size_t dim_x = 6;
    std::size_t dim_y = 3;
    std::size_t n = 64;
    y_orthant orthant = y_orthant::nonneg;
    double kappa = 1.0;
    double noise_g = 0.5;
    double noise_ell = 0.5;
    double y_cap = 10.0;
    std::uint64_t seed = 1;
  };

  explicit synthetic_quadratic_problem(const spec &s) : spec_(s) {
    rng r(s.seed);
    a_.resize(s.dim_x);
    c_.assign(s.dim_y * s.dim_x, 0.0);
    x_star_.resize(s.dim_x);
    y_star_.resize(s.dim_y);
    for (double &v : c_) v = 0.4 * r.normal();
    // column sums of squares, to make diag(a) dominate C^T C / kappa
    for (std::size_t j = 0; j < s.dim_x; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < s.dim_y; ++i)
        col += c_[i * s.dim_x + j] * c_[i * s.dim_x + j];
      a_[j] = 1.0 + col * static_cast<double>(s.dim_x) / s.kappa +
              r.uniform01();
    }
    const double sgn = s.orthant == y_orthant::nonpos ? -1.0 : 1.0;
    for (double &v : x_star_) v = r.uniform(-1.0, 1.0);
    for (double &v : y_star_)
      v = sgn * r.uniform(0.2, std::min(2.0, 0.8 * s.y_cap));
    b_.assign(s.dim_x, 0.0);
    for (std::size_t j = 0; j < s.dim_x; ++j) b_[j] = a_[j] * x_star_[j];
    apply_ct(y_star_, b_, -1.0);  // b = A x* - C^T y*
    // d = kappa y* - C x*
    d_.assign(s.dim_y, 0.0);
    apply_c(x_star_, d_);
    for (std::size_t i = 0; i < s.dim_y; ++i)
      d_[i] = s.kappa * y_star_[i] - d_[i];
    // zero-mean per-sample offsets
    eps_.assign(s.n * s.dim_x, 0.0);
    delta_.assign(s.n * s.dim_y, 0.0);
    fill_centered(eps_, s.dim_x, s.noise_g, r);
    fill_centered(delta_, s.dim_y, s.noise_ell, r);
  }

  std::size_t dim_x() const { return spec_.dim_x; }
  std::size_t dim_y() const { return spec_.dim_y; }
  std::size_t n_samples() const { return spec_.n; }
  y_orthant domain_y() const { return spec_.orthant; }
  double kappa() const { return spec_.kappa; }
  double y_cap() const { return spec_.y_cap; }
  const dvec &planted_x() const { return x_star_; }
  const dvec &planted_y() const { return y_star_; }

  double g_value(const dvec &x, batch_span batch = {}) const {
    double v = 0.0;
    for (std::size_t j = 0; j < dim_x(); ++j)
      v += 0.5 * a_[j] * x[j] * x[j] - b_[j] * x[j];
    const std::size_t m = batch.empty() ? spec_.n : batch.size();
    double noise = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = batch.empty() ? k : batch[k];
      const double *e = &eps_[i * dim_x()];
      for (std::size_t j = 0; j < dim_x(); ++j) noise += e[j] * x[j];
    }
    return v + noise / static_cast<double>(m);
  }

  void g_grad(const dvec &x, batch_span batch, dvec &gx) const {
    gx.assign(dim_x(), 0.0);
    const std::size_t m = batch.empty() ? spec_.n : batch.size();
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = batch.empty() ? k : batch[k];
      const double *e = &eps_[i * dim_x()];
      for (std::size_t j = 0; j < dim_x(); ++j) gx[j] += e[j];
    }
    for (std::size_t j = 0; j < dim_x(); ++j)
      gx[j] = a_[j] * x[j] - b_[j] + gx[j] / static_cast<double>(m);
  }

  void ell_value(const dvec &x, batch_span batch, dvec &out) const {
    out.assign(dim_y(), 0.0);
    apply_c(x, out);
    const std::size_t m = batch.empty() ? spec_.n : batch.size();
    dvec noise(dim_y(), 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = batch.empty() ? k : batch[k];
      const double *e = &delta_[i * dim_y()];
      for (std::size_t j = 0; j < dim_y(); ++j) noise[j] += e[j];
    }
    for (std::size_t j = 0; j < dim_y(); ++j)
      out[j] += d_[j] + noise[j] / static_cast<double>(m);
  }

  // grad ell(x)^T y = C^T y (the Jacobian is exact for every sample).
  void ell_jacvec(const dvec &, const dvec &y, batch_span, dvec &gx) const {
    gx.assign(dim_x(), 0.0);
    apply_ct(y, gx, 1.0);
  }

  void f0_grads(const dvec &x, const dvec &y, batch_span batch, dvec &gx,
                dvec &gy) const {
    g_grad(x, batch, gx);
    dvec cty(dim_x(), 0.0);
    apply_ct(y, cty, 1.0);
    axpy(-1.0, cty, gx);
    ell_value(x, batch, gy);
    scale(gy, -1.0);
  }

  double h_value(const dvec &y) const {
    return 0.5 * spec_.kappa * squared_norm(y);
  }

  void h_grad(const dvec &y, dvec &gy) const {
    gy = y;
    scale(gy, spec_.kappa);
  }

  void prox_h_vec(dvec &y, double eta, double cap) const {
    const box_lims b = lims(cap);
    for (double &v : y) v = std::clamp(v / (1.0 + eta * spec_.kappa), b.lo, b.hi);
  }

  void project_x(dvec &) const {}

  void y_star(const dvec &x, dvec &y) const {
    y.assign(dim_y(), 0.0);
    apply_c(x, y);
    const box_lims b = lims(spec_.y_cap);
    for (std::size_t i = 0; i < dim_y(); ++i)
      y[i] = std::clamp((y[i] + d_[i]) / spec_.kappa, b.lo, b.hi);
  }

  double objective(const dvec &x) const {
    dvec s(dim_y(), 0.0);
    apply_c(x, s);
    dvec ys;
    y_star(x, ys);
    double v = g_value(x);
    for (std::size_t i = 0; i < dim_y(); ++i)
      v += 0.5 * spec_.kappa * ys[i] * ys[i] - ys[i] * (s[i] + d_[i]);
    return v;
  }

  void objective_grad(const dvec &x, dvec &out) const {
    dvec ys;
    y_star(x, ys);
    g_grad(x, {}, out);
    dvec cty(dim_x(), 0.0);
    apply_ct(ys, cty, 1.0);
    axpy(-1.0, cty, out);
  }

  double objective_and_grad(const dvec &x, dvec &out) const {
    objective_grad(x, out);
    return objective(x);
  }

  double conjugate_smoothness() const { return 1.0 / spec_.kappa; }

  variance_reg_problem::constants smoothness_constants(const dvec &) const {
    double l_g = 0.0, frob = 0.0;
    for (double v : a_) l_g = std::max(l_g, v);
    for (double v : c_) frob += v * v;
    return {l_g, std::sqrt(frob), 0.0};
  }

  double default_y_cap(const dvec &) const { return spec_.y_cap; }

 private:
  struct box_lims {
    double lo, hi;
  };
  box_lims lims(double cap) const {
    switch (spec_.orthant) {
      case y_orthant::nonneg:
        return {0.0, cap};
      case y_orthant::nonpos:
        return {-cap, 0.0};
      default:
        return {-cap, cap};
    }
  }

  void apply_c(const dvec &x, dvec &out) const {  // out += C x
    for (std::size_t i = 0; i < dim_y(); ++i) {
      double s = 0.0;
      const double *row = &c_[i * dim_x()];
      for (std::size_t j = 0; j < dim_x(); ++j) s += row[j] * x[j];
      out[i] += s;
    }
  }

  void apply_ct(const dvec &y, dvec &out, double w) const {  // out += w C^T y
    for (std::size_t i = 0; i < dim_y(); ++i) {
      const double *row = &c_[i * dim_x()];
      for (std::size_t j = 0; j < dim_x(); ++j) out[j] += w * row[j] * y[i];
    }
  }

  static void fill_centered(dvec &buf, std::size_t width, double sigma,
                            rng &r) {
    const std::size_t n = buf.size() / width;
    for (double &v : buf) v = sigma * r.normal();
    for (std::size_t j = 0; j < width; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += buf[i * width + j];
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) buf[i * width + j] -= mean;
    }
  }

  spec spec_;
  dvec a_, b_, c_, d_;
  dvec x_star_, y_star_;
  dvec eps_, delta_;
};

}  // namespace infproj

#endif
