#include <gtest/gtest.h>

#include <cmath>

#include "mfrg/bounds.hpp"

using namespace mfrg;

namespace {

BoundSpec geom2_spec(double delta, double K, int n_max = 12, int l_max = 4) {
  return BoundSpec{"geom2",
                   {{"delta", delta}, {"beta", 0.25}, {"mu_max", 20.0}, {"n_max", double(n_max)},
                    {"l_max", double(l_max)}, {"grid", 9.0}, {"K", K}}};
}

double direct_geom2(int n, int l, double delta, double K) {
  return std::pow(K, n + l - 2) * std::pow(delta, l + 1) * std::tgamma(n + l - 1.0) /
         ((l + 1.0) * (l + 1.0) * std::tgamma(n - 1.0));
}

}  // namespace

TEST(Bounds, Geom2LogSpaceMatchesDirectComparison) {
  const double delta = 0.5, K = 4.0;
  const FlowTable<double> t =
      build_table(spec_beta_family(geom2_spec(delta, K), false), 10, 3, uniform_grid(0.0, 20.0, 5));
  const BoundReport r = geom2_report(t, delta, K, 0.0);
  ASSERT_GT(r.records.size(), 0u);
  for (const auto& rec : r.records) {
    const double rhs = direct_geom2(rec.n, rec.l, delta, K);
    EXPECT_NEAR(std::exp(rec.log_rhs), rhs, 1e-12 * rhs);
    EXPECT_EQ(rec.pass, std::fabs(rec.lhs) <= rhs);
  }
  EXPECT_TRUE(r.ok());
}

TEST(Bounds, Geom2ConformingAndViolated) {
  EXPECT_TRUE(run_bound_spec(geom2_spec(1.0, 4.0)).ok());
  const BoundReport bad = run_bound_spec(geom2_spec(2.0, 0.5));
  EXPECT_GT(bad.summary.failures, 0u);
  ASSERT_TRUE(bad.summary.first_violation.has_value());
  EXPECT_FALSE(bad.summary.first_violation->pass);
  EXPECT_LT(bad.summary.min_margin, 1.0);
}

TEST(Bounds, ARescalingAgreesWithRescaleToA) {
  BoundSpec s = geom2_spec(0.25, 4.0, 8, 0);
  s.id = "dAbound";
  const double mu_max = 20.0;
  const FlowTable<double> t = build_table(spec_beta_family(s, false), 8, 0, uniform_grid(0.0, mu_max, 4));
  const BoundReport r = evaluate(s, t);
  EXPECT_TRUE(r.ok());
  for (const auto& rec : r.records) {
    const std::size_t i = static_cast<std::size_t>(std::lround(rec.mu / (mu_max / 3)));
    const double alpha = std::exp(rec.mu - mu_max);
    const double a = rescale_to_A(t.at(rec.n, i).value(), rec.n, alpha);
    EXPECT_NEAR(rec.lhs, a, 1e-12 * std::fabs(a));
    // |A_n| <= delta (alpha K^2 / c)^((n-2)/2) / (alpha n) is |f_n| <= delta K^(n-2)
    EXPECT_EQ(rec.pass, std::fabs(t.at(rec.n, i).value()) <= 0.25 * std::pow(4.0, rec.n - 2) * (1 + 1e-12));
  }
}

TEST(Bounds, PositiveFamilySuites) {
  BoundSpec s{"geom", {{"delta", 0.5}, {"beta", 0.5}, {"mu_max", 10.0}, {"n_max", 12.0}, {"l_max", 4.0}, {"grid", 6.0}}};
  const BoundReport g = run_bound_spec(s);
  EXPECT_TRUE(g.ok());
  std::size_t positivity = 0;
  for (const auto& r : g.records) positivity += r.note == "positivity";
  EXPECT_GT(positivity, 0u);
  s.id = "Abound";
  EXPECT_TRUE(run_bound_spec(s).ok());
}

TEST(Bounds, DispatchAndErrors) {
  for (const auto& id : bound_ids()) EXPECT_FALSE(id.empty());
  EXPECT_THROW(run_bound_spec(BoundSpec{"nope", {}}), UsageError);
  EXPECT_THROW(run_bound_spec(BoundSpec{"geom2", {{"delta", 0.5}}}), UsageError);
  const FlowTable<double> t = build_table(TwoPointFamily<double>(ScaleInvariant<double>{1.0}), 6, 0, std::vector<double>{0.0});
  EXPECT_THROW(evaluate(BoundSpec{"jv", {}}, t), UsageError);
  EXPECT_TRUE(run_bound_spec(BoundSpec{"prodh", {{"v_max", 3}, {"l_max", 6}, {"n_max", 12}}}).ok());
  EXPECT_TRUE(run_bound_spec(BoundSpec{"gnk", {{"f20", -0.002}, {"g40", 1.0 / 3200}, {"nk_max", 14}, {"coeffs", 8}}}).ok());
  EXPECT_TRUE(run_bound_spec(BoundSpec{"trivex", {{"f20", -0.002}, {"g40", 1.0 / 3200}, {"nk_max", 14}, {"coeffs", 8}}}).ok());
  EXPECT_TRUE(run_bound_spec(BoundSpec{"boundedaction", {{"eps_prime", 1e-6}, {"epsilon", 1e-2}, {"n_max", 4}}}).ok());
  const double c = kLoopConstant;
  EXPECT_TRUE(run_bound_spec(BoundSpec{"jv", {{"delta", c / 8}, {"beta", 1}, {"mu_max", 10}, {"grid", 4}}}).ok());
}

TEST(Bounds, MarginScan) {
  const auto curve = margin_scan(geom2_spec(0.0, 4.0), "delta", {0.2, 0.5, 0.8, 1.0});
  ASSERT_EQ(curve.size(), 4u);
  for (std::size_t k = 0; k + 1 < curve.size(); ++k) EXPECT_GT(curve[k].min_margin, curve[k + 1].min_margin);
  for (const auto& p : curve) EXPECT_EQ(p.failures, 0u);
  const auto one = margin_scan(geom2_spec(0.5, 4.0), "delta", {0.5});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].value, 0.5);
}

TEST(Bounds, Reproducible) {
  const BoundReport a = run_bound_spec(geom2_spec(0.5, 4.0), 1), b = run_bound_spec(geom2_spec(0.5, 4.0), 4);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].lhs, b.records[i].lhs);
    EXPECT_EQ(a.records[i].log_rhs, b.records[i].log_rhs);
  }
}
