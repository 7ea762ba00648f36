#include <gtest/gtest.h>

#include "infproj/mspg.hpp"
#include "infproj/synthetic.hpp"
#include "test_util.hpp"

namespace infproj {
namespace {

using testing::make_random_dataset;
using testing::random_dvec;

TEST(JointSmoothnessL, FormulaReductions) {
  EXPECT_DOUBLE_EQ(joint_smoothness_L(1.0, 0.0, 0.0, 123.0), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(joint_smoothness_L(0.0, 1.0, 0.0, 5.0), 2.0);
  EXPECT_THROW(joint_smoothness_L(-1.0, 0.0, 0.0, 0.0), error);
}

TEST(JointSmoothnessL, BoundsSampledGradientRatios) {
  synthetic_quadratic_problem::spec spec;
  spec.seed = 3;
  const synthetic_quadratic_problem q(spec);
  const auto c = q.smoothness_constants({});
  const double L = joint_smoothness_L(c.l_g, c.g_ell, c.l_ell, spec.y_cap);
  rng r(4);
  dvec gx1, gy1, gx2, gy2;
  for (int i = 0; i < 10000; ++i) {
    const dvec x1 = random_dvec(spec.dim_x, r.next());
    const dvec x2 = random_dvec(spec.dim_x, r.next());
    dvec y1(spec.dim_y), y2(spec.dim_y);
    for (auto &v : y1) v = r.uniform(0.0, spec.y_cap);
    for (auto &v : y2) v = r.uniform(0.0, spec.y_cap);
    q.f0_grads(x1, y1, {}, gx1, gy1);
    q.f0_grads(x2, y2, {}, gx2, gy2);
    const double num = squared_distance(gx1, gx2) + squared_distance(gy1, gy2);
    const double den = squared_distance(x1, x2) + squared_distance(y1, y2);
    if (den == 0.0) continue;
    ASSERT_LE(std::sqrt(num / den), L * (1.0 + 1e-12));
  }
}

TEST(Mspg, BatchScheduleFormula) {
  synthetic_quadratic_problem::spec spec;
  spec.n = 64;
  const synthetic_quadratic_problem q(spec);
  mspg_config cfg;
  cfg.iters = 4;
  cfg.b = 2;
  cfg.log_every = 1;
  const mspg_result res = mspg(q, cfg);
  ASSERT_GE(res.log_points.size(), 3u);
  EXPECT_EQ(res.log_points[2].t, 3);
  EXPECT_EQ(res.log_points[2].m_t, 8);  // b (t+1) with b = 2, t = 3
}

TEST(Mspg, StationaryStartIsFixedPoint) {
  synthetic_quadratic_problem::spec spec;
  spec.noise_g = 0.0;
  spec.noise_ell = 0.0;
  spec.n = 8;
  const synthetic_quadratic_problem q(spec);
  mspg_config cfg;
  cfg.iters = 30;
  cfg.b = 16;  // full batch from the start (b (t+1) >= n)
  cfg.y_cap = spec.y_cap;
  const mspg_result res = mspg(q, cfg, nullptr, &q.planted_x(), &q.planted_y());
  for (std::size_t j = 0; j < q.dim_x(); ++j)
    EXPECT_DOUBLE_EQ(res.x_last[j], q.planted_x()[j]);
  for (std::size_t j = 0; j < q.dim_y(); ++j)
    EXPECT_DOUBLE_EQ(res.y_last[j], q.planted_y()[j]);
}

TEST(Mspg, FullBatchModeIsBitReproducible) {
  const dataset d = make_random_dataset(24, 5, 7);
  const variance_reg_problem p(d, 0.7, loss_kind::logistic);
  mspg_config cfg;
  cfg.iters = 60;
  cfg.b = 32;  // m_t = n immediately
  cfg.seed = 5;
  cfg.log_every = 10;
  const mspg_result a = mspg(p, cfg);
  const mspg_result b = mspg(p, cfg);
  EXPECT_EQ(a.x_last, b.x_last);
  EXPECT_EQ(a.y_last, b.y_last);
  ASSERT_EQ(a.log_points.size(), b.log_points.size());
  for (std::size_t i = 0; i < a.log_points.size(); ++i) {
    EXPECT_EQ(a.log_points[i].objective, b.log_points[i].objective);
    EXPECT_EQ(a.log_points[i].grad_map_residual,
              b.log_points[i].grad_map_residual);
  }
  EXPECT_EQ(a.full_batch_from, 1);
}

TEST(Mspg, ConvergesOnSyntheticBiconvex) {
  synthetic_quadratic_problem::spec spec;
  spec.seed = 11;
  spec.noise_g = 0.4;
  spec.noise_ell = 0.4;
  const synthetic_quadratic_problem q(spec);
  mspg_config cfg;
  cfg.iters = 2000;
  cfg.c = 0.45;
  cfg.b = 1;
  cfg.seed = 12;
  cfg.y_cap = spec.y_cap;
  const mspg_result res = mspg(q, cfg);
  dvec g;
  q.objective_grad(res.x_tau, g);
  EXPECT_LE(norm(g), 1e-2);
  // planted stationary point is where the gradient vanishes
  dvec g_star;
  q.objective_grad(q.planted_x(), g_star);
  EXPECT_LE(norm(g_star), 1e-10);
}

TEST(Mspg, YStaysFeasibleAndBridgeHolds) {
  const dataset d = make_random_dataset(30, 6, 13);
  const variance_reg_problem p(d, 1.5, loss_kind::logistic);
  mspg_config cfg;
  cfg.iters = 400;
  cfg.b = 2;
  cfg.seed = 14;
  cfg.log_every = 20;
  cfg.check_bridge = true;  // throws if the stationarity bridge is violated
  const mspg_result res = mspg(p, cfg);
  EXPECT_GE(res.y_last[0], 0.0);
  EXPECT_LE(res.y_last[0], res.d_y);
  for (const mspg_log_point &lp : res.log_points)
    EXPECT_LE(lp.grad_norm_F, lp.bridge_rhs + 1e-7 * (1.0 + lp.grad_norm_F));
}

TEST(Mspg, TauIsSavedIterate) {
  synthetic_quadratic_problem::spec spec;
  spec.n = 16;
  const synthetic_quadratic_problem q(spec);
  mspg_config cfg;
  cfg.iters = 50;
  cfg.seed = 15;
  const mspg_result res = mspg(q, cfg);
  EXPECT_GE(res.tau, 1);
  EXPECT_LE(res.tau, 50);
  EXPECT_EQ(res.x_tau.size(), q.dim_x());
  EXPECT_EQ(res.y_tau.size(), q.dim_y());
}

TEST(Mspg, DivergenceGuardFires) {
  const dataset d = make_random_dataset(10, 4, 17);
  const variance_reg_problem p(d, 1.0, loss_kind::logistic);
  mspg_config cfg;
  cfg.iters = 5000;
  cfg.l_override = 1e-12;  // absurd step size
  cfg.check_bridge = false;
  EXPECT_THROW(mspg(p, cfg), error);
}

TEST(Mspg, ConfigValidation) {
  const dataset d = make_random_dataset(5, 3, 18);
  const variance_reg_problem p(d, 1.0, loss_kind::logistic);
  mspg_config cfg;
  cfg.c = 0.5;
  EXPECT_THROW(mspg(p, cfg), error);
  cfg.c = 0.1;
  cfg.b = 0;
  EXPECT_THROW(mspg(p, cfg), error);
  cfg.b = 1;
  cfg.iters = 0;
  EXPECT_THROW(mspg(p, cfg), error);
}

}  // namespace
}  // namespace infproj
