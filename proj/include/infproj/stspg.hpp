#ifndef INFPROJ_STSPG_HPP
#define INFPROJ_STSPG_HPP

#include <limits>
#include <vector>

#include "core.hpp"
#include "observer.hpp"
#include "rng.hpp"
#include "spg.hpp"

namespace infproj {

enum class subproblem_mode { dc_linearized, bi_convex };

enum class stage_schedule_kind { paper, fixed };

struct stspg_config {
  long stages = 10;  // K
  double gamma = 1.0;
  double mu = 1.0;
  double alpha_samp = 1.0;  // tau-sampling exponent, >= 1
  stage_schedule_kind schedule = stage_schedule_kind::paper;
  long fixed_iters = 0;  // per-stage budget for the fixed schedule
  spg_rule rule_x = spg_rule::nonsmooth;
  spg_rule rule_y = spg_rule::nonsmooth;
  long batch = 1;  // samples per oracle draw; 0 = deterministic full batch
  double y_cap = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  bool diagnose_vhat = false;  // approximate v_k with an extra-budget solve
  long vhat_factor = 50;
  bool collect_inner = false;  // keep inner x-iterates per stage
};

struct stage_snapshot {
  long k = 0;
  dvec x_k, y_k, x_next, y_next;
  double work_seconds = 0.0;  // deterministic work clock
  double objective_F = 0.0;
  double grad_norm_F = 0.0;
  double vhat_gap = std::numeric_limits<double>::quiet_NaN();
  double vhat_grad_norm = std::numeric_limits<double>::quiet_NaN();
  double vhat_dist = std::numeric_limits<double>::quiet_NaN();
  std::vector<dvec> inner_x;
};

struct stspg_result {
  dvec x_tau;       // stage-tau start point
  dvec x_tau_next;  // the iterate the analysis samples, x_{tau+1}
  dvec x_last;      // x_{K+1}
  dvec y_last;
  long tau = 0;
  std::vector<stage_snapshot> snapshots;
  double solve_seconds = 0.0;
  double inner_seconds = 0.0;  // time inside the SPG loops only
  std::uint64_t work_units = 0;
  long inner_iterations = 0;
};

// T_k = ceil(k / gm) + 1 with a float-noise guard on exact ratios.
inline long stage_iters(long k, double gm) {
  return static_cast<long>(
             std::ceil(static_cast<double>(k) / gm - 1e-9)) + 1;
}

inline long paper_or_fixed_iters(const stspg_config &cfg, long k, double gm) {
  return cfg.schedule == stage_schedule_kind::paper
             ? stage_iters(k, gm)
             : std::max<long>(1, cfg.fixed_iters);
}

// P(tau = k) proportional to k^alpha over {1..K}.
inline long sample_stage_index(long stages, double alpha, rng &r) {
  double total = 0.0;
  for (long k = 1; k <= stages; ++k)
    total += std::pow(static_cast<double>(k), alpha);
  const double u = r.uniform01() * total;
  double acc = 0.0;
  for (long k = 1; k <= stages; ++k) {
    acc += std::pow(static_cast<double>(k), alpha);
    if (u < acc) return k;
  }
  return stages;
}

namespace detail {

inline void fill_batch(std::vector<std::uint32_t> &batch, std::size_t n,
                       rng &r) {
  for (std::uint32_t &b : batch)
    b = static_cast<std::uint32_t>(r.bounded(n));
}

}  // namespace detail

// Stage-k x-subproblem oracle. DC mode freezes the linearization point x_k:
//   grad = dg(x; xi_g) - grad ell(x_k; xi_l)^T y_k,
// bi-convex mode evaluates the Jacobian at the current x instead. xi_g and
// xi_l are independent draws.
template <class Problem>
auto build_subproblem_x(const Problem &p, dvec x_k, dvec y_k,
                        subproblem_mode mode, long batch,
                        std::uint64_t *work = nullptr) {
  const bool dc = mode == subproblem_mode::dc_linearized;
  if (dc && p.domain_y() != y_orthant::nonneg)
    throw error("build_subproblem_x: DC linearization requires dom(h) in the "
                "nonnegative orthant");
  if (!dc && p.domain_y() != y_orthant::nonpos)
    throw error("build_subproblem_x: bi-convex mode requires dom(h) in the "
                "nonpositive orthant");
  return [&p, x_k = std::move(x_k), y_k = std::move(y_k), dc, batch, work,
          idx = std::vector<std::uint32_t>(batch > 0 ? batch : 0),
          scratch = dvec()](const dvec &x, dvec &g, rng &r) mutable {
    if (batch > 0) detail::fill_batch(idx, p.n_samples(), r);
    p.g_grad(x, idx, g);
    if (batch > 0) detail::fill_batch(idx, p.n_samples(), r);
    p.ell_jacvec(dc ? x_k : x, y_k, idx, scratch);
    axpy(-1.0, scratch, g);
    if (work)
      *work += 2 * (batch > 0 ? static_cast<std::uint64_t>(batch)
                              : p.n_samples());
  };
}

// Stage-k y-subproblem oracle: grad = dh(y) - ell(x_{k+1}; xi_l'), with the
// draw independent of the x-stage samples.
template <class Problem>
auto build_subproblem_y(const Problem &p, dvec x_next, long batch,
                        std::uint64_t *work = nullptr) {
  return [&p, x_next = std::move(x_next), batch, work,
          idx = std::vector<std::uint32_t>(batch > 0 ? batch : 0),
          scratch = dvec()](const dvec &y, dvec &g, rng &r) mutable {
    p.h_grad(y, g);
    if (batch > 0) detail::fill_batch(idx, p.n_samples(), r);
    p.ell_value(x_next, idx, scratch);
    axpy(-1.0, scratch, g);
    if (work)
      *work += batch > 0 ? static_cast<std::uint64_t>(batch)
                         : p.n_samples();
  };
}

template <class Problem>
stspg_result st_spg(const Problem &p, const stspg_config &cfg,
                    const dvec *x_start = nullptr,
                    const dvec *y_start = nullptr,
                    solver_observer *obs = nullptr) {
  if (cfg.stages < 1) throw error("st_spg: stages must be >= 1");
  if (!(cfg.gamma > 0.0) || !(cfg.mu > 0.0))
    throw error("st_spg: gamma and mu must be > 0");
  if (cfg.alpha_samp < 1.0) throw error("st_spg: alpha_samp must be >= 1");
  if (cfg.schedule == stage_schedule_kind::fixed && cfg.fixed_iters < 1)
    throw error("st_spg: fixed schedule needs fixed_iters >= 1");
  const subproblem_mode mode = p.domain_y() == y_orthant::nonneg
                                   ? subproblem_mode::dc_linearized
                                   : subproblem_mode::bi_convex;
  if (p.domain_y() == y_orthant::free_)
    throw error("st_spg: dom(h) must lie in an orthant");

  const double t0 = fine_clock_seconds();
  const rng master(cfg.seed);
  const box_domain dom_x = box_domain::all();
  const box_domain dom_y = box_domain::for_orthant(p.domain_y(), cfg.y_cap);

  dvec x = x_start ? *x_start : dvec(p.dim_x(), 0.0);
  dvec y;
  if (y_start) {
    y = *y_start;
  } else {
    y.assign(p.dim_y(), 0.0);
  }
  if (!dom_y.contains(y)) throw error("st_spg: infeasible y start");

  stspg_result res;
  res.snapshots.reserve(cfg.stages);
  std::uint64_t work = 0;

  for (long k = 1; k <= cfg.stages; ++k) {
    stage_snapshot snap;
    snap.k = k;
    snap.x_k = x;
    snap.y_k = y;

    const long t_x = paper_or_fixed_iters(cfg, k, cfg.gamma);
    const long t_y = paper_or_fixed_iters(cfg, k, cfg.mu);

    auto oracle_x = build_subproblem_x(p, x, y, mode, cfg.batch, &work);
    spg_config sx;
    sx.iters = t_x;
    sx.gamma = cfg.gamma;
    sx.rule = cfg.rule_x;
    sx.seed = master.split(static_cast<std::uint64_t>(k), 0).seed();
    sx.collect_iterates = cfg.collect_inner;
    spg_result rx = spg(oracle_x, x, dom_x, sx);

    auto oracle_y = build_subproblem_y(p, rx.z_hat, cfg.batch, &work);
    spg_config sy;
    sy.iters = t_y;
    sy.gamma = cfg.mu;
    sy.rule = cfg.rule_y;
    sy.seed = master.split(static_cast<std::uint64_t>(k), 1).seed();
    spg_result ry = spg(oracle_y, y, dom_y, sy);

    snap.x_next = rx.z_hat;
    snap.y_next = ry.z_hat;
    if (cfg.collect_inner) snap.inner_x = std::move(rx.iterates);
    res.inner_iterations += t_x + t_y;
    res.inner_seconds += rx.solve_seconds + ry.solve_seconds;

    if (cfg.diagnose_vhat) {
      auto oracle_v = build_subproblem_x(p, x, y, mode, cfg.batch, &work);
      spg_config sv = sx;
      sv.iters = t_x * std::max<long>(1, cfg.vhat_factor);
      sv.seed = master.split(static_cast<std::uint64_t>(k), 7).seed();
      sv.collect_iterates = false;
      spg_result rv = spg(oracle_v, x, dom_x, sv);
      snap.vhat_gap = std::sqrt(squared_distance(snap.x_next, rv.z_hat));
      snap.vhat_dist = std::sqrt(squared_distance(x, rv.z_hat));
      dvec gv;
      p.objective_grad(rv.z_hat, gv);
      work += 2 * p.n_samples();
      snap.vhat_grad_norm = norm(gv);
    }

    x = snap.x_next;
    y = snap.y_next;
    if (!all_finite(x) || !all_finite(y)) throw divergence_error("st_spg", k);

    dvec gf;
    snap.objective_F = p.objective_and_grad(x, gf);
    snap.grad_norm_F = norm(gf);
    work += 2 * p.n_samples();
    snap.work_seconds = work_unit_seconds * static_cast<double>(work);

    if (obs) {
      log_event ev;
      ev.step = k;
      ev.x = &x;
      ev.y = &y;
      ev.objective = snap.objective_F;
      ev.grad_norm = snap.grad_norm_F;
      ev.work_seconds = snap.work_seconds;
      ev.canonical = true;
      ev.extras = {{"stage_tx", static_cast<double>(t_x)},
                   {"stage_ty", static_cast<double>(t_y)},
                   {"y_norm", norm(y)}};
      if (cfg.diagnose_vhat) {
        ev.extras.emplace_back("vhat_gap", snap.vhat_gap);
        ev.extras.emplace_back("vhat_grad_norm", snap.vhat_grad_norm);
        ev.extras.emplace_back("vhat_dist", snap.vhat_dist);
      }
      obs->log(ev);
    }
    res.snapshots.push_back(std::move(snap));
  }

  rng tau_rng = master.split(0xA11CE);
  res.tau = sample_stage_index(cfg.stages, cfg.alpha_samp, tau_rng);
  res.x_tau = res.snapshots[res.tau - 1].x_k;
  res.x_tau_next = res.snapshots[res.tau - 1].x_next;
  res.x_last = std::move(x);
  res.y_last = std::move(y);
  res.work_units = work;
  res.solve_seconds = fine_clock_seconds() - t0;
  return res;
}

}  // namespace infproj

#endif
