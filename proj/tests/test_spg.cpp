#include <gtest/gtest.h>

#include "infproj/spg.hpp"
#include "test_util.hpp"

namespace infproj {
namespace {

using testing::random_dvec;

TEST(Spg, ZeroObjectiveIsFixedPoint) {
  auto zero = [](const dvec &, dvec &g, rng &) { fill_zero(g); };
  const dvec z1 = random_dvec(5, 1);
  for (const spg_rule rule : {spg_rule::smooth, spg_rule::nonsmooth}) {
    spg_config cfg;
    cfg.iters = 50;
    cfg.gamma = 2.0;
    cfg.rule = rule;
    const spg_result res = spg(zero, z1, box_domain::all(), cfg);
    for (std::size_t j = 0; j < z1.size(); ++j) {
      EXPECT_DOUBLE_EQ(res.z_hat[j], z1[j]);
      EXPECT_DOUBLE_EQ(res.z_last[j], z1[j]);
    }
  }
}

TEST(Spg, WeightedAverageFormula) {
  // gamma = 1, smooth rule: eta_1 = 3/2, so z_2 = -g / (1 + 2/3) = 3 when
  // the first sampled gradient is -5; the second gradient is irrelevant for
  // the average of z_1, z_2.
  int call = 0;
  auto oracle = [&call](const dvec &, dvec &g, rng &) {
    g[0] = call++ == 0 ? -5.0 : 0.0;
  };
  spg_config cfg;
  cfg.iters = 2;
  cfg.gamma = 1.0;
  cfg.rule = spg_rule::smooth;
  const spg_result res = spg(oracle, dvec{0.0}, box_domain::all(), cfg);
  EXPECT_NEAR(res.z_hat[0], 2.0, 1e-15);  // (1*0 + 2*3) / 3
}

TEST(Spg, QuadraticReachesClosedFormMinimizer) {
  const dvec a = random_dvec(6, 3);
  auto grad = [&a](const dvec &z, dvec &g, rng &) {
    for (std::size_t j = 0; j < z.size(); ++j) g[j] = z[j] - a[j];
  };
  const dvec z1 = random_dvec(6, 4);
  spg_config cfg;
  cfg.iters = 500;
  cfg.gamma = 3.0;  // = 3L for the unit quadratic
  cfg.rule = spg_rule::smooth;
  cfg.l_estimate = 1.0;
  const spg_result res = spg(grad, z1, box_domain::all(), cfg);
  // z* = (gamma z1 + a) / (gamma + 1)
  dvec zstar(6);
  for (std::size_t j = 0; j < 6; ++j)
    zstar[j] = (cfg.gamma * z1[j] + a[j]) / (cfg.gamma + 1.0);
  auto H = [&](const dvec &z) {
    double v = 0.0;
    for (std::size_t j = 0; j < 6; ++j) {
      v += 0.5 * (z[j] - a[j]) * (z[j] - a[j]);
      v += 0.5 * cfg.gamma * (z[j] - z1[j]) * (z[j] - z1[j]);
    }
    return v;
  };
  const double scale = std::max(1.0, std::abs(H(z1)));
  EXPECT_LE(H(res.z_hat) - H(zstar), 1e-3 * scale);
}

TEST(Spg, RateRatioSmoothAndNoisy) {
  const dvec a = random_dvec(4, 11);
  const dvec z1(4, 0.0);
  auto exact = [&a](const dvec &z, dvec &g, rng &) {
    for (std::size_t j = 0; j < z.size(); ++j) g[j] = z[j] - a[j];
  };
  dvec zstar(4);
  for (std::size_t j = 0; j < 4; ++j) zstar[j] = a[j] / 4.0;
  auto H = [&](const dvec &z) {
    double v = 0.0;
    for (std::size_t j = 0; j < 4; ++j)
      v += 0.5 * (z[j] - a[j]) * (z[j] - a[j]) + 1.5 * z[j] * z[j];
    return v;
  };
  auto subopt = [&](long T, std::uint64_t seed, double sigma) {
    auto noisy = [&](const dvec &z, dvec &g, rng &r) {
      exact(z, g, r);
      for (double &v : g) v += sigma * r.normal();
    };
    spg_config cfg;
    cfg.iters = T;
    cfg.gamma = 3.0;
    cfg.rule = spg_rule::smooth;
    cfg.seed = seed;
    const spg_result res = spg(noisy, z1, box_domain::all(), cfg);
    return H(res.z_hat) - H(zstar);
  };
  // exact gradients: near-1/T^2 rate
  EXPECT_GE(subopt(100, 0, 0.0) / subopt(400, 0, 0.0), 3.0);
  // noisy gradients: near-1/T rate, averaged over seeds
  double sT = 0.0, s4T = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    sT += subopt(100, s, 0.5);
    s4T += subopt(400, s, 0.5);
  }
  EXPECT_GE(sT / s4T, 1.8);
}

TEST(Spg, FeasibilityOnOrthantAndBox) {
  auto push_negative = [](const dvec &, dvec &g, rng &) {
    for (double &v : g) v = 5.0;  // pushes iterates toward -inf
  };
  spg_config cfg;
  cfg.iters = 40;
  cfg.gamma = 0.5;
  cfg.rule = spg_rule::nonsmooth;
  cfg.collect_iterates = true;
  const spg_result res =
      spg(push_negative, dvec{1.0, 0.5}, box_domain::nonneg(), cfg);
  for (const dvec &z : res.iterates)
    for (double v : z) ASSERT_GE(v, 0.0);
  for (double v : res.z_hat) EXPECT_GE(v, 0.0);

  const spg_result boxed =
      spg(push_negative, dvec{0.2}, box_domain{0.0, 0.25}, cfg);
  EXPECT_GE(boxed.z_hat[0], 0.0);
  EXPECT_LE(boxed.z_hat[0], 0.25);
}

TEST(Spg, DeterministicReproducibility) {
  auto noisy = [](const dvec &z, dvec &g, rng &r) {
    for (std::size_t j = 0; j < z.size(); ++j)
      g[j] = z[j] + 0.3 * r.normal();
  };
  spg_config cfg;
  cfg.iters = 100;
  cfg.gamma = 1.0;
  cfg.seed = 1234;
  const spg_result a = spg(noisy, dvec(3, 1.0), box_domain::all(), cfg);
  const spg_result b = spg(noisy, dvec(3, 1.0), box_domain::all(), cfg);
  EXPECT_EQ(a.z_hat, b.z_hat);
  EXPECT_EQ(a.z_last, b.z_last);
}

TEST(Spg, ErrorPaths) {
  auto zero = [](const dvec &, dvec &g, rng &) { fill_zero(g); };
  spg_config cfg;
  cfg.iters = 0;
  EXPECT_THROW(spg(zero, dvec{0.0}, box_domain::all(), cfg), error);
  cfg.iters = 10;
  cfg.gamma = -1.0;
  EXPECT_THROW(spg(zero, dvec{0.0}, box_domain::all(), cfg), error);
  cfg.gamma = 1.0;
  EXPECT_THROW(spg(zero, dvec{-1.0}, box_domain::nonneg(), cfg), error);
  auto bad = [](const dvec &, dvec &g, rng &) {
    g[0] = std::numeric_limits<double>::quiet_NaN();
  };
  EXPECT_THROW(spg(bad, dvec{0.0}, box_domain::all(), cfg), error);
}

}  // namespace
}  // namespace infproj
