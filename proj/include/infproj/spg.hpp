#ifndef INFPROJ_SPG_HPP
#define INFPROJ_SPG_HPP

#include <cstdio>
#include <limits>

#include "core.hpp"
#include "parallel.hpp"
#include "problem.hpp"
#include "rng.hpp"

namespace infproj {

// Axis-aligned domain handle: all of space, an orthant or a box. The prox
// step of SPG stays closed-form on these because the objective is a
// separable quadratic.
struct box_domain {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static box_domain all() { return {}; }
  static box_domain nonneg(
      double cap = std::numeric_limits<double>::infinity()) {
    return {0.0, cap};
  }
  static box_domain nonpos(
      double cap = std::numeric_limits<double>::infinity()) {
    return {-cap, 0.0};
  }
  static box_domain for_orthant(
      y_orthant o, double cap = std::numeric_limits<double>::infinity()) {
    switch (o) {
      case y_orthant::nonneg:
        return nonneg(cap);
      case y_orthant::nonpos:
        return nonpos(cap);
      default:
        return all();
    }
  }

  void project(dvec &z) const {
    for (double &v : z) v = std::clamp(v, lo, hi);
  }
  bool contains(const dvec &z) const {
    for (double v : z)
      if (v < lo || v > hi) return false;
    return true;
  }
};

enum class spg_rule { smooth, nonsmooth };

struct spg_config {
  long iters = 100;  // T
  double gamma = 1.0;
  spg_rule rule = spg_rule::smooth;
  std::uint64_t seed = 0;
  double l_estimate = 0.0;  // when > 0, warn if gamma < 3L
  bool collect_iterates = false;
};

struct spg_result {
  dvec z_hat;   // t-weighted average of z_1..z_T
  dvec z_last;  // z_{T+1}
  long iters = 0;
  double solve_seconds = 0.0;  // monotonic, around the loop
  std::vector<dvec> iterates;
};

// SPG for H(z) = f(z) + (gamma/2) ||z - z1||^2 on the given domain.
// The oracle fills a stochastic (sub)gradient of f: grad(z, out, rng).
// eta_t = 3/(gamma (t+1)) under the smooth rule, 4/(gamma t) otherwise.
template <class Oracle>
spg_result spg(Oracle &&grad, const dvec &z1, const box_domain &dom,
               const spg_config &cfg) {
  if (cfg.iters < 1) throw error("spg: iteration budget must be >= 1");
  if (!(cfg.gamma > 0.0)) throw error("spg: gamma must be > 0");
  if (!dom.contains(z1)) throw error("spg: infeasible start point");
  if (cfg.l_estimate > 0.0 && cfg.gamma < 3.0 * cfg.l_estimate)
    std::fprintf(stderr,
                 "[spg] warning: gamma = %g below 3L = %g; the smooth-rule "
                 "guarantee does not apply\n",
                 cfg.gamma, 3.0 * cfg.l_estimate);

  const double t0 = fine_clock_seconds();
  rng r(cfg.seed);
  dvec z = z1;
  dvec g(z1.size());
  dvec acc(z1.size(), 0.0);
  double weight_sum = 0.0;
  spg_result res;
  if (cfg.collect_iterates) res.iterates.reserve(cfg.iters);
  for (long t = 1; t <= cfg.iters; ++t) {
    if (cfg.collect_iterates) res.iterates.push_back(z);
    axpy(static_cast<double>(t), z, acc);
    weight_sum += static_cast<double>(t);
    grad(z, g, r);
    if (!all_finite(g)) throw error("spg: non-finite subgradient at iteration " +
                                    std::to_string(t));
    const double eta = cfg.rule == spg_rule::smooth
                           ? 3.0 / (cfg.gamma * static_cast<double>(t + 1))
                           : 4.0 / (cfg.gamma * static_cast<double>(t));
    const double denom = cfg.gamma + 1.0 / eta;
    // increment form keeps exact fixed points when g and z - z1 vanish
    for (std::size_t j = 0; j < z.size(); ++j)
      z[j] = std::clamp(
          z[j] + (cfg.gamma * (z1[j] - z[j]) - g[j]) / denom, dom.lo, dom.hi);
  }
  res.z_hat = acc;
  scale(res.z_hat, 1.0 / weight_sum);
  dom.project(res.z_hat);
  res.z_last = std::move(z);
  res.iters = cfg.iters;
  res.solve_seconds = fine_clock_seconds() - t0;
  return res;
}

}  // namespace infproj

#endif
