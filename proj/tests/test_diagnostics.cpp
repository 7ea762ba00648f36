#include <gtest/gtest.h>

#include "infproj/diagnostics.hpp"
#include "infproj/mspg.hpp"
#include "infproj/synthetic.hpp"
#include "test_util.hpp"

namespace infproj {
namespace {

using testing::make_random_dataset;
using testing::random_dvec;

TEST(PowerFamilyModulus, KnownValues) {
  EXPECT_NEAR(power_family_modulus(2.0), 1.0, 1e-9);
  // p = 4: slice minimum 1/12 at t = -1/3, so the modulus is 1/6
  EXPECT_NEAR(power_family_modulus(4.0), 1.0 / 6.0, 1e-7);
  // p = 3: minimum (2 - sqrt(2))/3 of the slice
  EXPECT_NEAR(power_family_modulus(3.0), 2.0 * (2.0 - std::sqrt(2.0)) / 3.0,
              1e-7);
}

TEST(ConjugatePair, InvariantsBothDirections) {
  const conjugate_pair a = conjugate_pair::from_uniform_convexity(0.5, 3.0);
  EXPECT_DOUBLE_EQ(a.v, 0.5);
  EXPECT_DOUBLE_EQ(a.L, std::pow(2.0, 0.5));
  const conjugate_pair b = conjugate_pair::from_holder(2.0, 0.5);
  EXPECT_DOUBLE_EQ(b.p, 3.0);
  EXPECT_DOUBLE_EQ(b.varrho, (2.0 * 0.5 / 1.5) * std::pow(0.5, 2.0));
  EXPECT_THROW(conjugate_pair::from_uniform_convexity(0.0, 2.0), error);
  EXPECT_THROW(conjugate_pair::from_holder(1.0, 1.5), error);
}

TEST(Lemma1Checker, QuadraticSelfDuality) {
  const lemma1_report rep = check_lemma1(2.0, 10000, 1);
  EXPECT_NEAR(rep.varrho, 1.0, 1e-9);
  EXPECT_NEAR(rep.L, 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(rep.v, 1.0);
  EXPECT_TRUE(rep.ok());
}

TEST(Lemma1Checker, QuarticFamily) {
  const lemma1_report rep = check_lemma1(4.0, 10000, 2);
  EXPECT_NEAR(rep.v, 1.0 / 3.0, 1e-12);
  EXPECT_TRUE(rep.ok()) << "holder violations: " << rep.holder_violations
                        << ", convexity violations: "
                        << rep.convexity_violations;
}

TEST(Lemma1Checker, EqualArgumentsGiveZeroBothSides) {
  const conjugate_pair cp =
      conjugate_pair::from_uniform_convexity(power_family_modulus(4.0), 4.0);
  const double s = 3.7;
  const double lhs = std::abs(std::pow(std::abs(s), cp.v) -
                              std::pow(std::abs(s), cp.v));
  const double rhs = cp.L * std::pow(std::abs(s - s), cp.v);
  EXPECT_EQ(lhs, 0.0);
  EXPECT_EQ(rhs, 0.0);
}

TEST(FiniteDiffAudit, LinearIsExact) {
  const dvec c = random_dvec(7, 5);
  auto fn = [&c](const dvec &x) { return dot(c, x); };
  auto grad = [&c](const dvec &) { return c; };
  std::vector<dvec> points;
  for (int k = 0; k < 10; ++k) points.push_back(random_dvec(7, 50 + k));
  // no truncation error for a linear field; 1e-4 steps keep roundoff tiny
  EXPECT_LE(finite_diff_audit(fn, grad, points, 1e-4).max_rel_err, 1e-10);
}

TEST(FiniteDiffAudit, ConstantNeedsZeroGradient) {
  auto fn = [](const dvec &) { return 4.2; };
  auto zero_grad = [](const dvec &x) { return dvec(x.size(), 0.0); };
  std::vector<dvec> points = {random_dvec(4, 3)};
  EXPECT_LE(finite_diff_audit(fn, zero_grad, points).max_rel_err, 1e-10);
  // negative control: a wrong-sign gradient must be flagged
  auto wrong = [](const dvec &x) { return dvec(x.size(), 1.0); };
  EXPECT_GT(finite_diff_audit(fn, wrong, points).max_rel_err, 0.5);
}

TEST(FiniteDiffAudit, SupportRestrictionAndErrors) {
  auto fn = [](const dvec &x) { return x[0] * x[0] + x[2]; };
  auto grad = [](const dvec &x) {
    dvec g(x.size(), 0.0);
    g[0] = 2.0 * x[0];
    g[2] = 1.0;
    return g;
  };
  std::vector<dvec> points = {random_dvec(6, 8)};
  std::vector<std::vector<std::size_t>> coords = {{0, 2, 4}};
  EXPECT_LE(finite_diff_audit(fn, grad, points, 1e-6, &coords).max_rel_err,
            1e-8);
  auto bad = [](const dvec &x) {
    return x[0] > 1e8 ? std::numeric_limits<double>::quiet_NaN() : x[0];
  };
  auto bad_grad = [](const dvec &x) { return dvec(x.size(), 1.0); };
  std::vector<dvec> bad_points = {dvec{2e8}};
  EXPECT_THROW(finite_diff_audit(bad, bad_grad, bad_points), error);
  EXPECT_THROW(finite_diff_audit(fn, grad, points, 0.0), error);
}

TEST(RateSlope, ExactPowerLawsAndErrors) {
  dvec x, y_inv, y_const;
  for (int i = 1; i <= 40; ++i) {
    x.push_back(i);
    y_inv.push_back(1.0 / i);
    y_const.push_back(3.0);
  }
  EXPECT_NEAR(rate_slope(x, y_inv), -1.0, 1e-9);
  EXPECT_NEAR(rate_slope(x, y_const), 0.0, 1e-12);
  dvec small = {1, 2, 3};
  EXPECT_THROW(rate_slope(small, small), error);
  dvec bad = x;
  bad[30] = -1.0;
  EXPECT_THROW(rate_slope(x, bad), error);
}

TEST(RateSlope, MspgStationarityTraceDecaysNearInverse) {
  // min-so-far squared gradient-mapping residual on the smooth synthetic
  // problem: 20-seed mean fits a log-log slope of at most -0.7
  synthetic_quadratic_problem::spec spec;
  spec.seed = 5;
  spec.noise_g = 1.0;
  spec.noise_ell = 1.0;
  spec.n = 8192;
  const synthetic_quadratic_problem q(spec);
  const long T = 2000;
  dvec iters, mean_min;
  for (int s = 0; s < 20; ++s) {
    mspg_config c;
    c.iters = T;
    c.c = 0.45;
    c.b = 1;
    c.seed = 300 + s;
    c.log_every = 5;
    c.y_cap = q.y_cap();
    const mspg_result res = mspg(q, c);
    double run_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < res.log_points.size(); ++i) {
      const mspg_log_point &lp = res.log_points[i];
      run_min = std::min(run_min,
                         lp.grad_map_residual * lp.grad_map_residual);
      if (s == 0) {
        iters.push_back(static_cast<double>(lp.t));
        mean_min.push_back(0.0);
      }
      mean_min[i] += run_min / 20.0;
    }
  }
  EXPECT_LE(rate_slope(iters, mean_min), -0.7);
}

TEST(StationarityReport, ThresholdSemantics) {
  const dataset d = make_random_dataset(12, 5, 71);
  const variance_reg_problem p(d, 1.0, loss_kind::logistic);
  const dvec x = random_dvec(5, 72);
  const stationarity_info at_one = stationarity_report(p, x, 1e9);
  EXPECT_TRUE(at_one.eps_stationary);
  const stationarity_info at_zero = stationarity_report(p, x, 0.0);
  EXPECT_EQ(at_zero.eps_stationary, at_zero.grad_norm == 0.0);
  EXPECT_GT(at_one.grad_norm, 0.0);
  EXPECT_NEAR(at_one.y_star, p.mean_loss(x), 1e-15);
}

TEST(StationarityReport, ErmMinimizerIsStationaryAtLambdaZero) {
  // symmetric two-sample problem: mean logistic loss is minimized at x = 0
  std::vector<sparse_vec> rows;
  std::vector<int> labels = {1, -1};
  for (int i = 0; i < 2; ++i) {
    sparse_vec row(1);
    row.push_back(0, 1.0);
    rows.push_back(std::move(row));
  }
  const dataset d(std::move(rows), std::move(labels), 1);
  const variance_reg_problem p(d, 0.0, loss_kind::logistic);
  const stationarity_info info = stationarity_report(p, {0.0}, 1e-10);
  EXPECT_LE(info.grad_norm, 1e-12);
  EXPECT_TRUE(info.eps_stationary);
}

TEST(KvReport, TextAndCsv) {
  kv_report rep;
  rep.title = "demo";
  rep.values = {{"alpha", 1.5}, {"beta", -2.0}};
  EXPECT_NE(rep.to_text().find("alpha"), std::string::npos);
  const std::string csv = rep.to_csv();
  EXPECT_EQ(csv.substr(0, 10), "key,value\n");
  EXPECT_NE(csv.find("beta,-2"), std::string::npos);
}

}  // namespace
}  // namespace infproj
