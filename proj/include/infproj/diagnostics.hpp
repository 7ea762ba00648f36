#ifndef INFPROJ_DIAGNOSTICS_HPP
#define INFPROJ_DIAGNOSTICS_HPP

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "core.hpp"
#include "problem.hpp"
#include "rng.hpp"

namespace infproj {

// Uniform-convexity / Holder-gradient conjugate pair:
//   f (varrho, p)-uniformly convex  <=>  f* has (L, v)-Holder gradient,
//   v = 1/(p-1), L = (1/varrho)^(1/(p-1)),
//   varrho = (2v/(1+v)) (1/L)^(1/v).
struct conjugate_pair {
  double p = 2.0;
  double varrho = 1.0;
  double v = 1.0;
  double L = 1.0;

  static conjugate_pair from_uniform_convexity(double varrho, double p) {
    if (!(p >= 2.0) || !(varrho > 0.0))
      throw error("conjugate_pair: need p >= 2 and varrho > 0");
    conjugate_pair c;
    c.p = p;
    c.varrho = varrho;
    c.v = 1.0 / (p - 1.0);
    c.L = std::pow(1.0 / varrho, 1.0 / (p - 1.0));
    return c;
  }

  static conjugate_pair from_holder(double L, double v) {
    if (!(v > 0.0 && v <= 1.0) || !(L > 0.0))
      throw error("conjugate_pair: need v in (0,1] and L > 0");
    conjugate_pair c;
    c.p = 1.0 + 1.0 / v;
    c.v = v;
    c.L = L;
    c.varrho = (2.0 * v / (1.0 + v)) * std::pow(1.0 / L, 1.0 / v);
    return c;
  }
};

// Sharp uniform-convexity modulus of h(y) = |y|^p / p. The defining
// inequality is p-homogeneous, so the infimum over all pairs equals the
// infimum over the normalized slice (y1, y2) = (t+1, t):
//   psi(t) = (|t+1|^p - |t|^p)/p - |t|^{p-2} t,  varrho = 2 inf_t psi(t).
inline double power_family_modulus(double p) {
  if (!(p >= 2.0)) throw error("power_family_modulus: need p >= 2");
  auto psi = [p](double t) {
    const double hp = (std::pow(std::abs(1.0 + t), p) -
                       std::pow(std::abs(t), p)) / p;
    const double gt = t == 0.0 ? 0.0 : std::pow(std::abs(t), p - 2.0) * t;
    return hp - gt;
  };
  double best_t = 0.0, best = psi(0.0);
  for (double t = -4.0; t <= 3.0; t += 1e-3) {
    const double v = psi(t);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  double lo = best_t - 2e-3, hi = best_t + 2e-3;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (psi(m1) < psi(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return 2.0 * psi(0.5 * (lo + hi));
}

struct lemma1_report {
  double p = 0.0;
  double varrho = 0.0;
  double L = 0.0;
  double v = 0.0;
  std::size_t pairs = 0;
  std::size_t holder_violations = 0;
  std::size_t convexity_violations = 0;
  double max_holder_excess = 0.0;
  double max_convexity_excess = 0.0;
  std::vector<std::pair<double, double>> violating_pairs;
  bool ok() const {
    return holder_violations == 0 && convexity_violations == 0;
  }
};

// Numeric conjugate-duality check on the scalar family h(y) = |y|^p / p,
// linking uniform convexity of h to the Holder gradient of h*. The
// conjugate gradient is analytic: grad h*(s) = |s|^v sign(s), v = 1/(p-1).
// Asserts the Holder bound with L derived from the family modulus, and the
// primal inequality varrho |y1-y2|^p <= (h'(y1)-h'(y2))(y1-y2).
inline lemma1_report check_lemma1(double p, std::size_t sample_count,
                                  std::uint64_t seed = 0,
                                  double slack = 1e-9) {
  const double varrho = power_family_modulus(p);
  const conjugate_pair cp = conjugate_pair::from_uniform_convexity(varrho, p);
  lemma1_report rep;
  rep.p = p;
  rep.varrho = varrho;
  rep.L = cp.L;
  rep.v = cp.v;
  rep.pairs = sample_count;

  auto conj_grad = [&](double s) {
    return std::pow(std::abs(s), cp.v) * (s < 0.0 ? -1.0 : 1.0);
  };
  auto prim_grad = [&](double y) {
    return std::pow(std::abs(y), p - 1.0) * (y < 0.0 ? -1.0 : 1.0);
  };

  rng r(seed);
  for (std::size_t i = 0; i < sample_count; ++i) {
    const double s1 = r.uniform(-10.0, 10.0);
    const double s2 = r.uniform(-10.0, 10.0);
    const double lhs = std::abs(conj_grad(s1) - conj_grad(s2));
    const double rhs = cp.L * std::pow(std::abs(s1 - s2), cp.v);
    if (lhs > rhs + slack) {
      ++rep.holder_violations;
      rep.max_holder_excess = std::max(rep.max_holder_excess, lhs - rhs);
      if (rep.violating_pairs.size() < 8) rep.violating_pairs.push_back({s1, s2});
    }

    const double y1 = r.uniform(-10.0, 10.0);
    const double y2 = r.uniform(-10.0, 10.0);
    const double uc_lhs = varrho * std::pow(std::abs(y1 - y2), p);
    const double uc_rhs = (prim_grad(y1) - prim_grad(y2)) * (y1 - y2);
    if (uc_lhs > uc_rhs + slack) {
      ++rep.convexity_violations;
      rep.max_convexity_excess =
          std::max(rep.max_convexity_excess, uc_lhs - uc_rhs);
      if (rep.violating_pairs.size() < 8) rep.violating_pairs.push_back({y1, y2});
    }
  }
  return rep;
}

// Central-difference gradient audit. For each point, differences are taken
// over the given coordinate set (all coordinates when empty; sparse callers
// pass the support plus a few random probes). The per-point relative error
// is ||fd - an|| / max(1, ||an||, ||fd||); the worst one is returned.
struct audit_result {
  double max_rel_err = 0.0;
  std::size_t worst_point = 0;
  std::size_t worst_coord = 0;
};

template <class F, class G>
audit_result finite_diff_audit(
    F &&fn, G &&grad_fn, const std::vector<dvec> &points, double eps = 1e-6,
    const std::vector<std::vector<std::size_t>> *coord_sets = nullptr) {
  if (!(eps > 0.0)) throw error("finite_diff_audit: eps must be > 0");
  audit_result res;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    dvec x = points[pi];
    const dvec an = grad_fn(x);
    std::vector<std::size_t> coords;
    if (coord_sets && pi < coord_sets->size() && !(*coord_sets)[pi].empty()) {
      coords = (*coord_sets)[pi];
    } else {
      coords.resize(x.size());
      for (std::size_t j = 0; j < x.size(); ++j) coords[j] = j;
    }
    double diff_sq = 0.0, an_sq = 0.0, fd_sq = 0.0;
    double worst = 0.0;
    std::size_t worst_coord = 0;
    for (std::size_t j : coords) {
      const double keep = x[j];
      x[j] = keep + eps;
      const double fp = fn(x);
      x[j] = keep - eps;
      const double fm = fn(x);
      x[j] = keep;
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw error("finite_diff_audit: non-finite evaluation at point " +
                    std::to_string(pi) + ", coordinate " + std::to_string(j));
      const double fd = (fp - fm) / (2.0 * eps);
      const double d = fd - an[j];
      diff_sq += d * d;
      an_sq += an[j] * an[j];
      fd_sq += fd * fd;
      if (std::abs(d) > worst) {
        worst = std::abs(d);
        worst_coord = j;
      }
    }
    const double rel = std::sqrt(diff_sq) /
                       std::max({1.0, std::sqrt(an_sq), std::sqrt(fd_sq)});
    if (rel > res.max_rel_err) {
      res.max_rel_err = rel;
      res.worst_point = pi;
      res.worst_coord = worst_coord;
    }
  }
  return res;
}

// Least-squares slope of log(y) against log(x) over the trailing half.
inline double rate_slope(const dvec &x, const dvec &y) {
  if (x.size() != y.size() || x.size() < 10)
    throw error("rate_slope: need at least 10 aligned points");
  const std::size_t start = x.size() / 2;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(x.size() - start);
  for (std::size_t i = start; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw error("rate_slope: values must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = m * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) throw error("rate_slope: degenerate abscissa");
  return (m * sxy - sx * sy) / denom;
}

struct stationarity_info {
  double grad_norm = 0.0;
  double y_star = 0.0;
  double erm_term = 0.0;       // || mean grad l ||
  double weighted_term = 0.0;  // || lambda mean l grad l ||
  double coupling_term = 0.0;  // || lambda y* mean grad l ||
  double eps = 0.0;
  bool eps_stationary = false;
};

inline stationarity_info stationarity_report(const variance_reg_problem &p,
                                             const dvec &x, double eps) {
  stationarity_info info;
  info.eps = eps;
  info.y_star = p.inner_minimizer_ystar(x);
  const std::size_t n = p.n_samples();
  dvec erm(p.dim_x(), 0.0), weighted(p.dim_x(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const loss_eval e = p.sample_loss(x, i);
    p.data().add_row(i, e.coef, erm);
    p.data().add_row(i, e.value * e.coef, weighted);
  }
  scale(erm, 1.0 / static_cast<double>(n));
  scale(weighted, p.lambda() / static_cast<double>(n));
  info.erm_term = norm(erm);
  info.weighted_term = norm(weighted);
  info.coupling_term = p.lambda() * info.y_star * info.erm_term;
  dvec g;
  p.full_gradient_F(x, g);
  info.grad_norm = norm(g);
  info.eps_stationary = info.grad_norm <= eps;
  return info;
}

// Structured key-value report, emitted as text and as a CSV block.
struct kv_report {
  std::string title;
  std::vector<std::pair<std::string, double>> values;

  std::string to_text() const {
    std::string out = title + "\n";
    char buf[128];
    for (const auto &[k, v] : values) {
      std::snprintf(buf, sizeof(buf), "  %-28s %.12g\n", k.c_str(), v);
      out += buf;
    }
    return out;
  }

  std::string to_csv() const {
    std::string out = "key,value\n";
    char buf[128];
    for (const auto &[k, v] : values) {
      std::snprintf(buf, sizeof(buf), "%s,%.17g\n", k.c_str(), v);
      out += buf;
    }
    return out;
  }
};

}  // namespace infproj

#endif
