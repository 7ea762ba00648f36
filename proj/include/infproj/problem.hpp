#ifndef INFPROJ_PROBLEM_HPP
#define INFPROJ_PROBLEM_HPP

#include <limits>
#include <span>

#include "core.hpp"
#include "dataset.hpp"
#include "parallel.hpp"

namespace infproj {

enum class loss_kind { logistic, truncated_logistic };

enum class y_orthant { nonneg, nonpos, free_ };

using batch_span = std::span<const std::uint32_t>;

// Per-sample loss evaluated against a dense model; the gradient w.r.t. the
// model is coef * features.
struct loss_eval {
  double value;
  double coef;
};

// Overflow-safe logistic loss log(1 + exp(-z)), z = label * <x, features>.
inline loss_eval logistic_eval(double margin, int label) {
  const double z = label * margin;
  double value, s;
  if (z >= 0.0) {
    const double e = std::exp(-z);
    value = std::log1p(e);
    s = e / (1.0 + e);
  } else {
    const double e = std::exp(z);
    value = -z + std::log1p(e);
    s = 1.0 / (1.0 + e);
  }
  return {value, -static_cast<double>(label) * s};
}

inline loss_eval truncated_eval(double margin, int label, double alpha) {
  const loss_eval base = logistic_eval(margin, label);
  const double t = base.value / alpha;
  return {alpha * std::log1p(t), base.coef / (1.0 + t)};
}

struct loss_grad {
  double value;
  sparse_vec grad;
};

namespace detail {

inline double sparse_margin(const sparse_vec &x, const sparse_vec &features) {
  double s = 0.0;
  auto xe = x.entries();
  std::size_t j = 0;
  for (const sparse_entry &f : features.entries()) {
    if (f.index >= x.dim()) throw dim_error(f.index, x.dim(), "loss");
    while (j < xe.size() && xe[j].index < f.index) ++j;
    if (j < xe.size() && xe[j].index == f.index) s += xe[j].value * f.value;
  }
  return s;
}

inline loss_grad scale_features(double value, double coef,
                                const sparse_vec &features) {
  sparse_vec g(features.dim());
  if (coef != 0.0)
    for (const sparse_entry &e : features.entries())
      g.push_back(e.index, coef * e.value);
  return {value, std::move(g)};
}

}  // namespace detail

inline loss_grad logistic_loss(const sparse_vec &x, const sparse_vec &features,
                               int label) {
  const loss_eval e = logistic_eval(detail::sparse_margin(x, features), label);
  return detail::scale_features(e.value, e.coef, features);
}

inline loss_grad truncated_loss(const sparse_vec &x,
                                const sparse_vec &features, int label,
                                double alpha_trunc) {
  if (!(alpha_trunc > 0.0)) throw error("truncated_loss: alpha must be > 0");
  const loss_eval e =
      truncated_eval(detail::sparse_margin(x, features), label, alpha_trunc);
  return detail::scale_features(e.value, e.coef, features);
}

// Variance-regularized ERM as an inf-projection problem with scalar y:
//   F(x) = mean_i l_i(x) + (lambda/2) mean_i l_i(x)^2
//          + lambda * min_{y>=0} { y^2/2 - y * mean_i l_i(x) }
// i.e. g(x) = mean l + (lambda/2) mean l^2, h(y) = (lambda/2) y^2 on y >= 0,
// and the coupling term uses ell_c(x) = lambda * mean l.
class variance_reg_problem {
 public:
  struct constants {
    double l_g;
    double g_ell;
    double l_ell;
  };

  variance_reg_problem(const dataset &data, double lambda, loss_kind kind,
                       double alpha_trunc = 0.0)
      : data_(&data), lambda_(lambda), kind_(kind), alpha_trunc_(alpha_trunc) {
    if (lambda < 0.0) throw error("variance_reg_problem: lambda must be >= 0");
    if (kind == loss_kind::truncated_logistic && !(alpha_trunc > 0.0))
      throw error("variance_reg_problem: alpha_trunc must be > 0");
  }

  const dataset &data() const { return *data_; }
  std::size_t n_samples() const { return data_->n(); }
  std::size_t dim_x() const { return data_->dim(); }
  std::size_t dim_y() const { return 1; }
  y_orthant domain_y() const { return y_orthant::nonneg; }
  double lambda() const { return lambda_; }
  loss_kind kind() const { return kind_; }
  double alpha_trunc() const { return alpha_trunc_; }

  loss_eval sample_loss(const dvec &x, std::size_t i) const {
    const double margin = data_->dot_row(i, x);
    return kind_ == loss_kind::logistic
               ? logistic_eval(margin, data_->label(i))
               : truncated_eval(margin, data_->label(i), alpha_trunc_);
  }

  // out += weight * grad l_i(x); the per-sample loss gradient used by the
  // ERM baselines.
  void add_sample_loss_grad(const dvec &x, std::size_t i, double weight,
                            dvec &out) const {
    data_->add_row(i, weight * sample_loss(x, i).coef, out);
  }

  // y*(x) = argmin_{y>=0} y^2/2 - y * mean loss; losses are nonnegative,
  // so this is exactly the mean loss.
  double inner_minimizer_ystar(const dvec &x) const {
    return std::max(0.0, mean_loss(x));
  }

  double mean_loss(const dvec &x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_samples(); ++i) s += sample_loss(x, i).value;
    return s / static_cast<double>(n_samples());
  }

  // F via the inner minimization route of the inf-projection form.
  double eval_F(const dvec &x) const {
    const std::size_t n = n_samples();
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double l = sample_loss(x, i).value;
      sum += l;
      sum_sq += l * l;
    }
    const double mean = sum / static_cast<double>(n);
    const double ystar = std::max(0.0, mean);
    return mean + 0.5 * lambda_ * sum_sq / static_cast<double>(n) +
           lambda_ * (0.5 * ystar * ystar - ystar * mean);
  }

  // F via the variance expansion: mean + (lambda/2)(mean l^2 - mean^2).
  double eval_F_expanded(const dvec &x) const {
    const std::size_t n = n_samples();
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double l = sample_loss(x, i).value;
      sum += l;
      sum_sq += l * l;
    }
    const double mean = sum / static_cast<double>(n);
    return mean +
           0.5 * lambda_ * (sum_sq / static_cast<double>(n) - mean * mean);
  }

  // grad F = mean (1 + lambda l_i - lambda y*(x)) grad l_i.
  void full_gradient_F(const dvec &x, dvec &out) const {
    out.assign(dim_x(), 0.0);
    const double ystar = inner_minimizer_ystar(x);
    const std::size_t n = n_samples();
    for (std::size_t i = 0; i < n; ++i) {
      const loss_eval e = sample_loss(x, i);
      data_->add_row(i, (1.0 + lambda_ * (e.value - ystar)) * e.coef, out);
    }
    scale(out, 1.0 / static_cast<double>(n));
  }

  sparse_vec full_gradient_F(const dvec &x) const {
    dvec g;
    full_gradient_F(x, g);
    return sparse_vec::from_dense(g);
  }

  // Partial gradients of f(x, y) over a batch (with-replacement indices):
  //   grad_x = batch mean of (1 + lambda l_i - lambda y) grad l_i
  //   grad_y = lambda (y - batch mean l_i)
  void stochastic_grads(const dvec &x, double y, batch_span batch, dvec &gx,
                        double &gy) const {
    gx.assign(dim_x(), 0.0);
    const std::size_t m = batch.empty() ? n_samples() : batch.size();
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t i = batch.empty() ? b : check_index(batch[b]);
      const loss_eval e = sample_loss(x, i);
      loss_sum += e.value;
      data_->add_row(i, (1.0 + lambda_ * (e.value - y)) * e.coef, gx);
    }
    scale(gx, 1.0 / static_cast<double>(m));
    gy = lambda_ * (y - loss_sum / static_cast<double>(m));
  }

  // prox of h(y) = (lambda/2) y^2 + indicator{0 <= y <= cap}.
  double prox_h(double y_hat, double eta,
                double cap = std::numeric_limits<double>::infinity()) const {
    if (!(eta > 0.0)) throw error("prox_h: eta must be > 0");
    return std::clamp(y_hat / (1.0 + eta * lambda_), 0.0, cap);
  }

  // --- oracle surface used by the solvers (empty batch = full pass) ---

  double g_value(const dvec &x, batch_span batch = {}) const {
    const std::size_t m = batch.empty() ? n_samples() : batch.size();
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t i = batch.empty() ? b : check_index(batch[b]);
      const double l = sample_loss(x, i).value;
      sum += l;
      sum_sq += l * l;
    }
    return (sum + 0.5 * lambda_ * sum_sq) / static_cast<double>(m);
  }

  void g_grad(const dvec &x, batch_span batch, dvec &gx) const {
    gx.assign(dim_x(), 0.0);
    const std::size_t m = batch.empty() ? n_samples() : batch.size();
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t i = batch.empty() ? b : check_index(batch[b]);
      const loss_eval e = sample_loss(x, i);
      data_->add_row(i, (1.0 + lambda_ * e.value) * e.coef, gx);
    }
    scale(gx, 1.0 / static_cast<double>(m));
  }

  // ell_c(x) = lambda * mean loss (the m = 1 coupling map).
  void ell_value(const dvec &x, batch_span batch, dvec &out) const {
    out.assign(1, 0.0);
    const std::size_t m = batch.empty() ? n_samples() : batch.size();
    double sum = 0.0;
    for (std::size_t b = 0; b < m; ++b)
      sum += sample_loss(x, batch.empty() ? b : check_index(batch[b])).value;
    out[0] = lambda_ * sum / static_cast<double>(m);
  }

  // grad ell_c(x)^T y for scalar y.
  void ell_jacvec(const dvec &x, const dvec &y, batch_span batch,
                  dvec &gx) const {
    gx.assign(dim_x(), 0.0);
    const std::size_t m = batch.empty() ? n_samples() : batch.size();
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t i = batch.empty() ? b : check_index(batch[b]);
      data_->add_row(i, sample_loss(x, i).coef, gx);
    }
    scale(gx, lambda_ * y[0] / static_cast<double>(m));
  }

  double h_value(const dvec &y) const {
    return 0.5 * lambda_ * y[0] * y[0];
  }

  void h_grad(const dvec &y, dvec &gy) const {
    gy.assign(1, lambda_ * y[0]);
  }

  void prox_h_vec(dvec &y, double eta, double cap) const {
    y[0] = prox_h(y[0], eta, cap);
  }

  // Partial gradients of the smooth part f0 = g - y ell_c over one batch.
  void f0_grads(const dvec &x, const dvec &y, batch_span batch, dvec &gx,
                dvec &gy) const {
    gx.assign(dim_x(), 0.0);
    gy.assign(1, 0.0);
    const std::size_t m = batch.empty() ? n_samples() : batch.size();
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t i = batch.empty() ? b : check_index(batch[b]);
      const loss_eval e = sample_loss(x, i);
      loss_sum += e.value;
      data_->add_row(i, (1.0 + lambda_ * (e.value - y[0])) * e.coef, gx);
    }
    scale(gx, 1.0 / static_cast<double>(m));
    gy[0] = -lambda_ * loss_sum / static_cast<double>(m);
  }

  // L_{h*}: h is lambda-strongly convex, so h* is (1/lambda)-smooth.
  double conjugate_smoothness() const {
    return lambda_ > 0.0 ? 1.0 / lambda_
                         : std::numeric_limits<double>::infinity();
  }

  void project_x(dvec &) const {}  // X = R^d; hook for box constraints

  void y_star(const dvec &x, dvec &y) const {
    y.assign(1, inner_minimizer_ystar(x));
  }

  double objective(const dvec &x) const { return eval_F(x); }

  void objective_grad(const dvec &x, dvec &out) const {
    full_gradient_F(x, out);
  }

  // F and grad F from a single margin pass (per-sample losses are cached,
  // so the second sweep only re-walks the sparse rows). Large datasets run
  // the margin pass in parallel over a fixed chunk grid; partials combine
  // in chunk order, so the result is identical for any thread cap.
  double objective_and_grad(const dvec &x, dvec &out) const {
    const std::size_t n = n_samples();
    std::vector<loss_eval> evals(n);
    constexpr std::size_t chunk = 4096;
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    dvec part_sum(n_chunks, 0.0), part_sq(n_chunks, 0.0);
    for_chunks(n, chunk, [&](std::size_t c, std::size_t b, std::size_t e) {
      double s = 0.0, sq = 0.0;
      for (std::size_t i = b; i < e; ++i) {
        evals[i] = sample_loss(x, i);
        s += evals[i].value;
        sq += evals[i].value * evals[i].value;
      }
      part_sum[c] = s;
      part_sq[c] = sq;
    });
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
      sum += part_sum[c];
      sum_sq += part_sq[c];
    }
    const double mean = sum / static_cast<double>(n);
    const double ystar = std::max(0.0, mean);
    out.assign(dim_x(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      data_->add_row(
          i, (1.0 + lambda_ * (evals[i].value - ystar)) * evals[i].coef, out);
    scale(out, 1.0 / static_cast<double>(n));
    return mean + 0.5 * lambda_ * sum_sq / static_cast<double>(n) +
           lambda_ * (0.5 * ystar * ystar - ystar * mean);
  }

  // Conservative smoothness constants for the MSPG step size; B is a loss
  // bound taken at the start point.
  constants smoothness_constants(const dvec &x0) const {
    const double r2 = data_->max_row_squared_norm();
    double curv = 0.25 * r2;
    if (kind_ == loss_kind::truncated_logistic) curv += r2 / alpha_trunc_;
    double loss_bound = 0.0;
    for (std::size_t i = 0; i < n_samples(); ++i)
      loss_bound = std::max(loss_bound, sample_loss(x0, i).value);
    const double l_g = (1.0 + lambda_ * loss_bound) * curv + lambda_ * r2;
    const double g_ell = lambda_ * std::sqrt(r2);
    const double l_ell = lambda_ * curv;
    return {l_g, g_ell, l_ell};
  }

  double default_y_cap(const dvec &x0) const {
    return std::max(10.0 * mean_loss(x0), 1e-2);
  }

 private:
  std::size_t check_index(std::uint32_t i) const {
    if (i >= n_samples())
      throw dim_error(i, static_cast<index_t>(n_samples()),
                      "stochastic batch");
    return i;
  }

  const dataset *data_;
  double lambda_;
  loss_kind kind_;
  double alpha_trunc_;
};

}  // namespace infproj

#endif
