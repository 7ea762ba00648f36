#ifndef INFPROJ_CHECKS_HPP
#define INFPROJ_CHECKS_HPP

#include <functional>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "diagnostics.hpp"
#include "problem.hpp"
#include "stspg.hpp"
#include "synthetic.hpp"

namespace infproj {

struct check_result {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace checks {

inline dataset check_dataset(std::uint64_t seed, std::size_t n = 24,
                             index_t dim = 8) {
  rng r(seed);
  std::vector<sparse_vec> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    sparse_vec row(dim);
    for (index_t j = 0; j < dim; ++j)
      if (r.uniform01() < 0.6) row.push_back(j, r.normal());
    if (row.nnz() == 0) row.push_back(0, 1.0);
    rows.push_back(std::move(row));
    labels.push_back(r.uniform01() < 0.5 ? 1 : -1);
  }
  return dataset(std::move(rows), std::move(labels), dim);
}

inline std::vector<dvec> sample_points(std::size_t count, std::size_t dim,
                                       std::uint64_t seed, double s = 1.0) {
  rng r(seed);
  std::vector<dvec> pts(count, dvec(dim));
  for (dvec &p : pts)
    for (double &v : p) v = s * r.normal();
  return pts;
}

inline check_result audit_check(const std::string &suite,
                                const std::string &name,
                                const std::function<double(const dvec &)> &fn,
                                const std::function<dvec(const dvec &)> &grad,
                                const std::vector<dvec> &points,
                                double tol = 1e-5) {
  const audit_result res = finite_diff_audit(fn, grad, points, 1e-6);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "finite_diff_audit max rel err %.3g (tol %g)",
                res.max_rel_err, tol);
  return {suite, name, res.max_rel_err <= tol, buf};
}

// Finite-difference audits of every loss gradient and solver-facing oracle.
inline std::vector<check_result> gradient_suite(std::uint64_t seed) {
  std::vector<check_result> out;
  const dataset d = check_dataset(seed);
  const index_t dim = d.dim();
  const variance_reg_problem logi(d, 1.2, loss_kind::logistic);
  const variance_reg_problem trunc(d, 0.8, loss_kind::truncated_logistic,
                                   3.0);
  const auto pts = sample_points(100, dim, seed + 1);

  for (const auto *p : {&logi, &trunc}) {
    const char *tag =
        p->kind() == loss_kind::logistic ? "logistic" : "truncated";
    out.push_back(audit_check(
        "gradients", std::string(tag) + "_mean_loss",
        [p](const dvec &x) {
          double s = 0.0;
          for (std::size_t i = 0; i < p->n_samples(); ++i)
            s += p->sample_loss(x, i).value;
          return s / static_cast<double>(p->n_samples());
        },
        [p](const dvec &x) {
          dvec g(x.size(), 0.0);
          for (std::size_t i = 0; i < p->n_samples(); ++i)
            p->add_sample_loss_grad(
                x, i, 1.0 / static_cast<double>(p->n_samples()), g);
          return g;
        },
        pts));
    out.push_back(audit_check(
        "gradients", std::string(tag) + "_full_gradient_F",
        [p](const dvec &x) { return p->eval_F(x); },
        [p](const dvec &x) {
          dvec g;
          p->full_gradient_F(x, g);
          return g;
        },
        pts));
    out.push_back(audit_check(
        "gradients", std::string(tag) + "_g_oracle",
        [p](const dvec &x) { return p->g_value(x); },
        [p](const dvec &x) {
          dvec g;
          p->g_grad(x, {}, g);
          return g;
        },
        pts));
  }

  // joint smooth part f0(x, y) in x and in y
  const double y0 = 0.6;
  out.push_back(audit_check(
      "gradients", "f0_x_part",
      [&](const dvec &x) {
        dvec lc;
        logi.ell_value(x, {}, lc);
        return logi.g_value(x) - y0 * lc[0];
      },
      [&](const dvec &x) {
        dvec gx, gy;
        logi.f0_grads(x, {y0}, {}, gx, gy);
        return gx;
      },
      pts));
  out.push_back(audit_check(
      "gradients", "f0_y_part",
      [&](const dvec &y) {
        dvec lc;
        const dvec x0 = sample_points(1, dim, seed + 2)[0];
        logi.ell_value(x0, {}, lc);
        return -y[0] * lc[0];
      },
      [&](const dvec &y) {
        const dvec x0 = sample_points(1, dim, seed + 2)[0];
        dvec gx, gy;
        logi.f0_grads(x0, y, {}, gx, gy);
        return gy;
      },
      sample_points(100, 1, seed + 3)));

  // stage subproblem oracles, full batch
  {
    const dvec xk = sample_points(1, dim, seed + 4)[0];
    const dvec yk = {0.9};
    auto oracle = build_subproblem_x(logi, xk, yk,
                                     subproblem_mode::dc_linearized, 0);
    out.push_back(audit_check(
        "gradients", "stage_x_dc_oracle",
        [&](const dvec &x) {
          dvec lc, jac;
          logi.ell_value(xk, {}, lc);
          logi.ell_jacvec(xk, dvec{1.0}, {}, jac);
          dvec diff = x;
          axpy(-1.0, xk, diff);
          return logi.g_value(x) - yk[0] * (lc[0] + dot(jac, diff));
        },
        [&](const dvec &x) {
          dvec g(x.size());
          rng r(0);
          oracle(x, g, r);
          return g;
        },
        pts));
    auto oracle_y = build_subproblem_y(logi, xk, 0);
    out.push_back(audit_check(
        "gradients", "stage_y_oracle",
        [&](const dvec &y) {
          dvec lc;
          logi.ell_value(xk, {}, lc);
          return logi.h_value(y) - y[0] * lc[0];
        },
        [&](const dvec &y) {
          dvec g(1);
          rng r(0);
          oracle_y(y, g, r);
          return g;
        },
        sample_points(100, 1, seed + 5)));
  }

  // synthetic smooth problem, x and y parts plus objective F
  {
    synthetic_quadratic_problem::spec spec;
    spec.seed = seed + 6;
    const synthetic_quadratic_problem q(spec);
    const auto qx = sample_points(100, spec.dim_x, seed + 7);
    const dvec yq = {0.4, 0.2, 0.7};
    out.push_back(audit_check(
        "gradients", "synthetic_f0_x_part",
        [&](const dvec &x) {
          dvec lv;
          q.ell_value(x, {}, lv);
          return q.g_value(x) - dot(yq, lv);
        },
        [&](const dvec &x) {
          dvec gx, gy;
          q.f0_grads(x, yq, {}, gx, gy);
          return gx;
        },
        qx));
    out.push_back(audit_check(
        "gradients", "synthetic_objective_F",
        [&](const dvec &x) { return q.objective(x); },
        [&](const dvec &x) {
          dvec g;
          q.objective_grad(x, g);
          return g;
        },
        qx));
  }
  return out;
}

inline std::vector<check_result> lemma1_suite(std::uint64_t seed) {
  std::vector<check_result> out;
  for (double p : {2.0, 3.0, 4.0}) {
    const lemma1_report rep = check_lemma1(p, 10000, seed + int(p));
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "p=%g varrho=%.6g L=%.6g v=%.6g holder_viol=%zu "
                  "convexity_viol=%zu",
                  rep.p, rep.varrho, rep.L, rep.v, rep.holder_violations,
                  rep.convexity_violations);
    out.push_back(
        {"lemma1", "conjugate_pair_p" + std::to_string(int(p)), rep.ok(), buf});
  }
  return out;
}

inline std::vector<check_result> projection_suite(std::uint64_t seed) {
  std::vector<check_result> out;
  rng r(seed);
  bool feasible = true, idempotent = true, nonexpansive = true;
  double worst_div = 0.0, worst_idem = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 2 + r.bounded(16);
    const double rho = 0.005 + 2.0 * r.uniform01();
    dvec a(n), b(n);
    for (double &v : a) v = r.uniform(-1.0, 2.0);
    for (double &v : b) v = r.uniform(-1.0, 2.0);
    const dvec pa = project_chi2_simplex(a, rho);
    const dvec pb = project_chi2_simplex(b, rho);
    double sum = 0.0;
    for (double v : pa) {
      if (v < 0.0) feasible = false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-10) feasible = false;
    worst_div = std::max(worst_div, chi2_divergence(pa) - rho);
    if (chi2_divergence(pa) > rho + 1e-8) feasible = false;
    const dvec paa = project_chi2_simplex(pa, rho);
    for (std::size_t i = 0; i < n; ++i)
      worst_idem = std::max(worst_idem, std::abs(paa[i] - pa[i]));
    if (squared_distance(pa, pb) >
        squared_distance(a, b) * (1.0 + 1e-9) + 1e-15)
      nonexpansive = false;
  }
  if (worst_idem > 1e-12) idempotent = false;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max ball excess %.3g", worst_div);
  out.push_back({"projection", "chi2_ball_feasibility", feasible, buf});
  std::snprintf(buf, sizeof(buf), "max re-projection move %.3g", worst_idem);
  out.push_back({"projection", "idempotence", idempotent, buf});
  out.push_back({"projection", "nonexpansiveness", nonexpansive,
                 nonexpansive ? "holds on 500 random pairs" : "violated"});
  return out;
}

inline std::vector<check_result> invariant_suite(std::uint64_t seed) {
  std::vector<check_result> out;
  rng r(seed);

  {  // F-equality across random instances
    double worst = 0.0;
    for (int rep = 0; rep < 300; ++rep) {
      const dataset d = check_dataset(r.next(), 1 + r.bounded(24),
                                      static_cast<index_t>(1 + r.bounded(8)));
      const variance_reg_problem p(d, 10.0 * r.uniform01(),
                                   loss_kind::logistic);
      const dvec x = sample_points(1, d.dim(), r.next(), 2.0)[0];
      const double a = p.eval_F(x), b = p.eval_F_expanded(x);
      worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a)));
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max relative gap %.3g", worst);
    out.push_back({"invariants", "F_inner_min_vs_expansion", worst <= 1e-10,
                   buf});
  }

  {  // oracle unbiasedness by enumeration
    const dataset d = check_dataset(seed + 11);
    const variance_reg_problem p(d, 1.3, loss_kind::logistic);
    const dvec x = sample_points(1, d.dim(), seed + 12)[0];
    dvec mean_gx(d.dim(), 0.0), gx;
    double mean_gy = 0.0, gy = 0.0;
    for (std::uint32_t i = 0; i < d.n(); ++i) {
      const std::uint32_t b[1] = {i};
      p.stochastic_grads(x, 0.5, b, gx, gy);
      axpy(1.0, gx, mean_gx);
      mean_gy += gy;
    }
    scale(mean_gx, 1.0 / static_cast<double>(d.n()));
    mean_gy /= static_cast<double>(d.n());
    p.stochastic_grads(x, 0.5, {}, gx, gy);
    double worst = std::abs(mean_gy - gy);
    for (std::size_t j = 0; j < d.dim(); ++j)
      worst = std::max(worst, std::abs(mean_gx[j] - gx[j]));
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max deviation %.3g", worst);
    out.push_back({"invariants", "oracle_unbiasedness", worst <= 1e-12, buf});
  }

  {  // prox feasibility and nonexpansiveness
    const dataset d = check_dataset(seed + 13);
    const variance_reg_problem p(d, 0.9, loss_kind::logistic);
    bool ok = true;
    for (int i = 0; i < 10000; ++i) {
      const double a = r.uniform(-40.0, 40.0), b = r.uniform(-40.0, 40.0);
      const double eta = 1e-3 + 4.0 * r.uniform01();
      const double pa = p.prox_h(a, eta), pb = p.prox_h(b, eta);
      if (pa < 0.0 || std::abs(pa - pb) > std::abs(a - b) * (1.0 + 1e-12))
        ok = false;
    }
    out.push_back({"invariants", "prox_feasible_nonexpansive", ok,
                   ok ? "holds on 10^4 pairs" : "violated"});
  }

  {  // stage schedules and tau sampling
    bool ok = stage_iters(4, 0.5) == 9 && stage_iters(1, 1.0) == 2 &&
              stage_iters(5, 2.0) == 4;
    rng rr(seed + 14);
    std::vector<long> counts(6, 0);
    const long draws = 50000;
    for (long i = 0; i < draws; ++i) ++counts[sample_stage_index(5, 1.0, rr)];
    for (int k = 1; k <= 5; ++k) {
      const double pk = static_cast<double>(k) / 15.0;
      const double sigma = std::sqrt(draws * pk * (1.0 - pk));
      if (std::abs(counts[k] - draws * pk) > 4.0 * sigma) ok = false;
    }
    out.push_back({"invariants", "stage_schedule_and_sampling", ok,
                   ok ? "schedules exact; sampling within 4 sigma"
                      : "violated"});
  }
  return out;
}

// Deliberately broken gradient: demonstrates that the audit catches a
// wrong-sign gradient (negative control; this check is expected to fail).
inline std::vector<check_result> selftest_fail_suite(std::uint64_t seed) {
  const auto pts = sample_points(10, 4, seed);
  auto fn = [](const dvec &x) { return 0.5 * squared_norm(x); };
  auto wrong = [](const dvec &x) {
    dvec g = x;
    scale(g, -1.0);  // sign flipped on purpose
    return g;
  };
  const audit_result res = finite_diff_audit(fn, wrong, pts, 1e-6);
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "finite_diff_audit max rel err %.3g (injected wrong sign)",
                res.max_rel_err);
  return {{"selftest-fail", "finite_diff_audit_negative_control",
           res.max_rel_err <= 1e-5, buf}};
}

}  // namespace checks

// Runs the selected suites; "all" = every suite except the negative control.
inline std::vector<check_result> run_check_suites(
    const std::vector<std::string> &suites, std::uint64_t seed = 0) {
  std::vector<check_result> out;
  auto want = [&](const char *name) {
    for (const std::string &s : suites)
      if (s == name || s == "all") return true;
    return false;
  };
  auto append = [&](std::vector<check_result> v) {
    for (check_result &c : v) out.push_back(std::move(c));
  };
  if (want("gradients")) append(checks::gradient_suite(seed + 1));
  if (want("lemma1")) append(checks::lemma1_suite(seed + 2));
  if (want("projection")) append(checks::projection_suite(seed + 3));
  if (want("invariants")) append(checks::invariant_suite(seed + 4));
  for (const std::string &s : suites)
    if (s == "selftest-fail")
      append(checks::selftest_fail_suite(seed + 5));
  if (out.empty())
    throw config_error("check: no known suite selected");
  return out;
}

}  // namespace infproj

#endif
