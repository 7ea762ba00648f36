#ifndef INFPROJ_BASELINES_HPP
#define INFPROJ_BASELINES_HPP

#include <algorithm>
#include <numeric>
#include <vector>

#include "core.hpp"
#include "observer.hpp"
#include "parallel.hpp"
#include "problem.hpp"
#include "rng.hpp"

namespace infproj {

// Dual variable of the min-max formulation: P in the probability simplex,
// restricted to the chi-square ball D_phi(P || uniform) <= rho with
// phi(t) = (t-1)^2/2, i.e. (n/2) ||P - 1/n||^2 <= rho.
struct dual_weights {
  dvec p;
  double rho = 0.0;
};

inline double chi2_divergence(const dvec &p) {
  const double n = static_cast<double>(p.size());
  double s = 0.0;
  for (double v : p) {
    const double d = n * v - 1.0;
    s += d * d;
  }
  return 0.5 * s / n;
}

inline void check_dual_weights(const dual_weights &w, double sum_tol = 1e-10,
                               double ball_tol = 1e-8) {
  double sum = 0.0;
  for (double v : w.p) {
    if (v < 0.0) throw invariant_error("dual weights: negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > sum_tol)
    throw invariant_error("dual weights: sum deviates from 1 by " +
                          std::to_string(sum - 1.0));
  if (chi2_divergence(w.p) > w.rho + ball_tol)
    throw invariant_error("dual weights: chi-square ball violated");
}

// Exact Euclidean projection onto the probability simplex (sort-based).
inline void project_simplex(dvec &v) {
  const std::size_t n = v.size();
  dvec u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0, tau = 0.0;
  std::size_t k = 0;
  for (std::size_t j = 0; j < n; ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) {
      tau = t;
      k = j + 1;
    }
  }
  (void)k;
  for (double &x : v) x = std::max(0.0, x - tau);
}

// Euclidean projection onto {P in simplex : chi2(P) <= rho}. The ball is a
// Euclidean ball of radius sqrt(2 rho / n) around the uniform vector, so for
// a fixed ball multiplier theta the KKT point is the simplex projection of
// (q + theta u)/(1 + theta); theta is found by bisection on the ball
// residual (any sign-change point satisfies the KKT system).
inline dvec project_chi2_simplex(const dvec &q, double rho,
                                 double kkt_tol = 1e-10) {
  const std::size_t n = q.size();
  if (n < 1) throw error("project_chi2_simplex: empty input");
  if (!(rho > 0.0)) throw error("project_chi2_simplex: rho must be > 0");
  if (!all_finite(q)) throw error("project_chi2_simplex: non-finite input");
  const double uniform = 1.0 / static_cast<double>(n);
  const double r_sq = 2.0 * rho / static_cast<double>(n);

  auto candidate = [&](double theta, dvec &out) {
    out = q;
    const double w = 1.0 / (1.0 + theta);
    for (double &v : out) v = w * (v + theta * uniform);
    project_simplex(out);
    double d = 0.0;
    for (double v : out) {
      const double e = v - uniform;
      d += e * e;
    }
    return d - r_sq;  // ball residual
  };

  dvec p;
  double g0 = candidate(0.0, p);
  if (g0 <= kkt_tol) return p;

  double lo = 0.0, hi = 1.0;
  dvec tmp;
  while (candidate(hi, tmp) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e18)
      throw error("project_chi2_simplex: ball multiplier diverged");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = candidate(mid, tmp);
    if (g > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    // complementary slackness residual |theta * g|
    if (std::abs(g) * mid <= kkt_tol && g <= kkt_tol) break;
  }
  candidate(hi, p);  // feasible side
  return p;
}

struct bmd_config {
  double eta_theta = 0.1;
  double eta_p = 1e-6;
  double rho = 1.0;
  long iters = 1000;
  long batch = 16;
  std::uint64_t seed = 0;
  long log_every = 0;
  long check_every = 100;  // dual-weight invariant sampling in release runs
  bool measure_timing = false;
};

struct bmd_result {
  dvec theta;
  dual_weights weights;
  double solve_seconds = 0.0;
  double dual_update_seconds = 0.0;  // measured when measure_timing
  long iters = 0;
  std::uint64_t work_units = 0;
};

// Min-max DRO baseline: importance-weighted primal SGD step plus a full
// O(n) dual ascent step projected back onto the chi-square ball.
template <class Problem>
bmd_result bmd_minmax(const Problem &p, const bmd_config &cfg,
                      solver_observer *obs = nullptr,
                      const dvec *theta_start = nullptr) {
  const std::size_t n = p.n_samples();
  if (cfg.iters < 1) throw error("bmd: iteration budget must be >= 1");
  if (cfg.batch < 1) throw error("bmd: batch must be >= 1");
  const double t0 = fine_clock_seconds();

  dvec theta = theta_start ? *theta_start : dvec(p.dim_x(), 0.0);
  dual_weights w;
  w.rho = cfg.rho;
  w.p.assign(n, 1.0 / static_cast<double>(n));

  rng r(cfg.seed);
  const long log_every =
      cfg.log_every > 0 ? cfg.log_every : std::max<long>(1, cfg.iters / 100);
  std::vector<std::uint32_t> batch(cfg.batch);
  dvec losses(n);
  std::uint64_t work = 0;
  double dual_cpu = 0.0;

  dvec grad(p.dim_x());

  for (long t = 1; t <= cfg.iters; ++t) {
    // primal: theta <- theta - eta * (n/|B|) sum_{i in B} P_i grad l_i
    for (std::uint32_t &bi : batch)
      bi = static_cast<std::uint32_t>(r.bounded(n));
    const double scale_w =
        static_cast<double>(n) / static_cast<double>(cfg.batch);
    fill_zero(grad);
    for (std::uint32_t bi : batch)
      p.add_sample_loss_grad(theta, bi, scale_w * w.p[bi], grad);
    axpy(-cfg.eta_theta, grad, theta);
    work += static_cast<std::uint64_t>(cfg.batch);

    // dual: P <- proj(P + eta_p * l(theta)), full loss vector, O(n)
    const double td0 = cfg.measure_timing ? fine_clock_seconds() : 0.0;
    if (cfg.eta_p != 0.0) {
      for (std::size_t i = 0; i < n; ++i)
        losses[i] = w.p[i] + cfg.eta_p * p.sample_loss(theta, i).value;
      w.p = project_chi2_simplex(losses, cfg.rho);
    }
    if (cfg.measure_timing) dual_cpu += fine_clock_seconds() - td0;
    work += n;

    if (!all_finite(theta)) throw divergence_error("bmd", t);
#ifndef NDEBUG
    check_dual_weights(w);
#else
    if (cfg.check_every > 0 && t % cfg.check_every == 0)
      check_dual_weights(w);
#endif

    if (obs && ((t - 1) % log_every == 0 || t == cfg.iters)) {
      double obj = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        obj += w.p[i] * p.sample_loss(theta, i).value;
      work += n;
      log_event ev;
      ev.step = t;
      ev.x = &theta;
      ev.objective = obj;  // current weighted loss <P, l(theta)>
      fill_zero(grad);
      for (std::size_t i = 0; i < n; ++i)
        p.add_sample_loss_grad(theta, i, w.p[i], grad);
      work += n;
      ev.grad_norm = norm(grad);
      ev.work_seconds = work_unit_seconds * static_cast<double>(work);
      ev.extras = {{"chi2", chi2_divergence(w.p)},
                   {"p_max", *std::max_element(w.p.begin(), w.p.end())}};
      obs->log(ev);
    }
  }
  check_dual_weights(w);

  bmd_result res;
  res.theta = std::move(theta);
  res.weights = std::move(w);
  res.iters = cfg.iters;
  res.work_units = work;
  res.dual_update_seconds = dual_cpu;
  res.solve_seconds = fine_clock_seconds() - t0;
  return res;
}

struct sgd_config {
  double eta = 0.1;
  long iters = 1000;
  long batch = 16;
  std::uint64_t seed = 0;
  long log_every = 0;
};

struct sgd_result {
  dvec theta;
  double solve_seconds = 0.0;
  long iters = 0;
  std::uint64_t work_units = 0;
};

// Plain mini-batch SGD on the unregularized mean loss, constant step.
template <class Problem>
sgd_result sgd_erm(const Problem &p, const sgd_config &cfg,
                   solver_observer *obs = nullptr,
                   const dvec *theta_start = nullptr) {
  const std::size_t n = p.n_samples();
  if (cfg.iters < 1) throw error("sgd_erm: iteration budget must be >= 1");
  if (cfg.batch < 1) throw error("sgd_erm: batch must be >= 1");
  const double t0 = fine_clock_seconds();

  dvec theta = theta_start ? *theta_start : dvec(p.dim_x(), 0.0);
  rng r(cfg.seed);
  const long log_every =
      cfg.log_every > 0 ? cfg.log_every : std::max<long>(1, cfg.iters / 100);
  std::vector<std::uint32_t> batch(cfg.batch);
  dvec grad(p.dim_x());
  std::uint64_t work = 0;

  for (long t = 1; t <= cfg.iters; ++t) {
    for (std::uint32_t &bi : batch)
      bi = static_cast<std::uint32_t>(r.bounded(n));
    fill_zero(grad);
    const double s = 1.0 / static_cast<double>(cfg.batch);
    for (std::uint32_t bi : batch) p.add_sample_loss_grad(theta, bi, s, grad);
    axpy(-cfg.eta, grad, theta);
    work += static_cast<std::uint64_t>(cfg.batch);
    if (!all_finite(theta)) throw divergence_error("sgd_erm", t);

    if (obs && ((t - 1) % log_every == 0 || t == cfg.iters)) {
      double obj = 0.0;
      dvec g(p.dim_x(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        obj += p.sample_loss(theta, i).value;
        p.add_sample_loss_grad(theta, i, 1.0, g);
      }
      work += n;
      log_event ev;
      ev.step = t;
      ev.x = &theta;
      ev.objective = obj / static_cast<double>(n);
      ev.grad_norm = norm(g) / static_cast<double>(n);
      ev.work_seconds = work_unit_seconds * static_cast<double>(work);
      obs->log(ev);
    }
  }

  sgd_result res;
  res.theta = std::move(theta);
  res.iters = cfg.iters;
  res.work_units = work;
  res.solve_seconds = fine_clock_seconds() - t0;
  return res;
}

}  // namespace infproj

#endif
