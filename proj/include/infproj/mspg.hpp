#ifndef INFPROJ_MSPG_HPP
#define INFPROJ_MSPG_HPP

#include <limits>
#include <vector>

#include "core.hpp"
#include "observer.hpp"
#include "rng.hpp"
#include "spg.hpp"

namespace infproj {

// Joint smoothness constant of f0 over (x, y):
//   L = sqrt(max(2 Lg^2 + 4 Ll^2 Dy^2 + Gl^2, 4 Gl^2)).
inline double joint_smoothness_L(double l_g, double g_ell, double l_ell,
                                 double d_y) {
  if (l_g < 0.0 || g_ell < 0.0 || l_ell < 0.0 || d_y < 0.0)
    throw error("joint_smoothness_L: constants must be >= 0");
  const double a =
      2.0 * l_g * l_g + 4.0 * l_ell * l_ell * d_y * d_y + g_ell * g_ell;
  return std::sqrt(std::max(a, 4.0 * g_ell * g_ell));
}

struct mspg_config {
  long iters = 100;     // T
  double c = 0.1;       // step fraction, eta = c/L, 0 < c < 1/2
  long b = 1;           // batch growth base, m_t = b (t+1)
  long batch_cap = 0;   // 0 = n
  double l_override = 0.0;
  double y_cap = 0.0;   // 0 = problem default; the joint constant needs bounded dom(h)
  std::uint64_t seed = 0;
  long log_every = 0;   // 0 = max(1, T/100)
  bool check_bridge = true;
};

struct mspg_log_point {
  long t = 0;
  long m_t = 0;
  double objective = 0.0;
  double grad_norm_F = 0.0;        // clipped-domain stationarity measure
  double grad_map_residual = 0.0;  // ||w - prox-step(w)|| / eta, full batch
  double dist_y = 0.0;             // dist(0, d_y f(w)) incl. normal cone
  double bridge_rhs = 0.0;         // conjugate-duality bound on grad_norm_F
  double work_seconds = 0.0;
};

struct mspg_result {
  dvec x_tau, y_tau;  // output w_tau, tau uniform on {1..T}
  dvec x_last, y_last;
  long tau = 0;
  double eta = 0.0;
  double l_used = 0.0;
  double d_y = 0.0;
  long full_batch_from = -1;  // first iteration with m_t = n, -1 if never
  double objective_gap = 0.0;  // f(w_1) - min logged f, informational
  // informational rate constants: c1 = (2c(1-2c)+2)/(c(1-2c)),
  // c2 = (6-4c)/(1-2c), and the gradient variance at the start point
  double c1 = 0.0;
  double c2 = 0.0;
  double sigma0_sq = 0.0;
  std::vector<mspg_log_point> log_points;
  double solve_seconds = 0.0;
  std::uint64_t work_units = 0;
};

namespace detail {

// dist(0, r + N_[lo,hi](v)) for one coordinate of the y-part subdifferential.
inline double normal_cone_dist(double r, double v, double lo, double hi) {
  if (v <= lo) return std::max(0.0, -r);  // cone (-inf, 0]
  if (v >= hi) return std::max(0.0, r);   // cone [0, inf)
  return std::abs(r);
}

}  // namespace detail

// Mini-batch stochastic proximal gradient on w = (x, y) with increasing
// batch sizes m_t = b (t+1) and constant step eta = c/L.
template <class Problem>
mspg_result mspg(const Problem &p, const mspg_config &cfg,
                 solver_observer *obs = nullptr, const dvec *x_start = nullptr,
                 const dvec *y_start = nullptr) {
  if (cfg.iters < 1) throw error("mspg: iteration budget must be >= 1");
  if (!(cfg.c > 0.0 && cfg.c < 0.5))
    throw error("mspg: step fraction c must lie in (0, 1/2)");
  if (cfg.b < 1) throw error("mspg: batch base b must be >= 1");
  const std::size_t n = p.n_samples();
  const long cap = cfg.batch_cap > 0
                       ? std::min<long>(cfg.batch_cap, static_cast<long>(n))
                       : static_cast<long>(n);

  const double t0 = fine_clock_seconds();
  dvec x = x_start ? *x_start : dvec(p.dim_x(), 0.0);
  dvec y = y_start ? *y_start : dvec(p.dim_y(), 0.0);

  const double d_y = cfg.y_cap > 0.0 ? cfg.y_cap : p.default_y_cap(x);
  const auto consts = p.smoothness_constants(x);
  const double l_used =
      cfg.l_override > 0.0
          ? cfg.l_override
          : joint_smoothness_L(consts.l_g, consts.g_ell, consts.l_ell, d_y);
  const double eta = cfg.c / l_used;
  const double holder_factor = p.conjugate_smoothness();  // L_{h*}, v = 1

  rng r(cfg.seed);
  const long tau = static_cast<long>(r.bounded(cfg.iters)) + 1;
  const long log_every =
      cfg.log_every > 0 ? cfg.log_every : std::max<long>(1, cfg.iters / 100);

  mspg_result res;
  res.tau = tau;
  res.eta = eta;
  res.l_used = l_used;
  res.d_y = d_y;
  res.c1 = (2.0 * cfg.c * (1.0 - 2.0 * cfg.c) + 2.0) /
           (cfg.c * (1.0 - 2.0 * cfg.c));
  res.c2 = (6.0 - 4.0 * cfg.c) / (1.0 - 2.0 * cfg.c);
  {
    // single-sample gradient variance around the full-batch gradient at w_1
    dvec gxf, gyf, gxi, gyi;
    p.f0_grads(x, y, {}, gxf, gyf);
    double var = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::uint32_t one[1] = {i};
      p.f0_grads(x, y, one, gxi, gyi);
      var += squared_distance(gxi, gxf) + squared_distance(gyi, gyf);
    }
    res.sigma0_sq = var / static_cast<double>(n);
  }

  std::vector<std::uint32_t> batch;
  dvec gx(p.dim_x()), gy(p.dim_y());
  dvec gxf, gyf, x_look, y_look, ystar, grad_f_clip, scratch;
  std::uint64_t work = 0;
  double min_logged_f = std::numeric_limits<double>::infinity();
  double f_first = 0.0;

  for (long t = 1; t <= cfg.iters; ++t) {
    if (t == tau) {
      res.x_tau = x;
      res.y_tau = y;
    }
    const bool log_now = (t - 1) % log_every == 0 || t == cfg.iters;
    if (log_now) {
      // full-batch lookahead: gradient-mapping residual and the bound that
      // bridges the joint stationarity measure to grad F
      p.f0_grads(x, y, {}, gxf, gyf);
      x_look = x;
      axpy(-eta, gxf, x_look);
      p.project_x(x_look);
      y_look = y;
      axpy(-eta, gyf, y_look);
      p.prox_h_vec(y_look, eta, d_y);
      const double res_sq =
          squared_distance(x, x_look) + squared_distance(y, y_look);
      mspg_log_point lp;
      lp.t = t;
      lp.m_t = std::min<long>(cfg.b * (t + 1), cap);
      lp.grad_map_residual = std::sqrt(res_sq) / eta;

      // dist(0, d_y f(w)) with the domain's normal cone
      p.h_grad(y, gy);
      const box_domain ydom = box_domain::for_orthant(p.domain_y(), d_y);
      double dist_sq = 0.0;
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double dj = detail::normal_cone_dist(gyf[j] + gy[j], y[j],
                                                   ydom.lo, ydom.hi);
        dist_sq += dj * dj;
      }
      lp.dist_y = std::sqrt(dist_sq);

      // stationarity of F on the clipped domain: grad g - grad ell^T y*_clip
      p.y_star(x, ystar);
      for (double &v : ystar) v = std::clamp(v, ydom.lo, ydom.hi);
      p.g_grad(x, {}, grad_f_clip);
      p.ell_jacvec(x, ystar, {}, scratch);
      axpy(-1.0, scratch, grad_f_clip);
      lp.grad_norm_F = norm(grad_f_clip);
      const double coupling =
          consts.g_ell > 0.0 ? consts.g_ell * holder_factor * lp.dist_y : 0.0;
      lp.bridge_rhs = norm(gxf) + coupling;
      if (cfg.check_bridge &&
          lp.grad_norm_F > lp.bridge_rhs + 1e-7 * (1.0 + lp.grad_norm_F))
        throw invariant_error(
            "mspg: stationarity bridge violated at iteration " +
            std::to_string(t));

      lp.objective = p.g_value(x) + p.h_value(y);
      p.ell_value(x, {}, scratch);
      lp.objective -= dot(y, scratch);
      if (t == 1) f_first = lp.objective;
      min_logged_f = std::min(min_logged_f, lp.objective);
      work += 7 * n;
      lp.work_seconds = work_unit_seconds * static_cast<double>(work);
      if (obs) {
        log_event ev;
        ev.step = t;
        ev.x = &x;
        ev.y = &y;
        ev.objective = lp.objective;
        ev.grad_norm = lp.grad_norm_F;
        ev.work_seconds = lp.work_seconds;
        ev.extras = {{"m_t", static_cast<double>(lp.m_t)},
                     {"grad_map_residual", lp.grad_map_residual},
                     {"dist_y", lp.dist_y},
                     {"bridge_rhs", lp.bridge_rhs},
                     {"eta", eta}};
        obs->log(ev);
      }
      res.log_points.push_back(lp);
    }

    const long m_t = std::min<long>(cfg.b * (t + 1), cap);
    const bool full = m_t == static_cast<long>(n);
    if (res.full_batch_from < 0 && full) res.full_batch_from = t;
    if (!full) {
      batch.resize(m_t);
      for (std::uint32_t &bi : batch)
        bi = static_cast<std::uint32_t>(r.bounded(n));
    }
    p.f0_grads(x, y, full ? batch_span{} : batch_span{batch}, gx, gy);
    work += static_cast<std::uint64_t>(m_t);

    axpy(-eta, gx, x);
    p.project_x(x);
    axpy(-eta, gy, y);
    p.prox_h_vec(y, eta, d_y);
    if (!all_finite(x) || !all_finite(y)) throw divergence_error("mspg", t);
  }

  res.x_last = std::move(x);
  res.y_last = std::move(y);
  res.objective_gap = f_first - min_logged_f;
  res.work_units = work;
  res.solve_seconds = fine_clock_seconds() - t0;
  return res;
}

}  // namespace infproj

#endif
