#include <gtest/gtest.h>

#include <cmath>

#include "mfrg/hierarchy.hpp"

using namespace mfrg;

namespace {

using Poly = std::vector<Rational>;  // Taylor coefficients around a point

Poly mul(const Poly& a, const Poly& b, std::size_t len) {
  Poly c(len, Rational(0));
  for (std::size_t i = 0; i < len && i < a.size(); ++i)
    for (std::size_t j = 0; i + j < len && j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

Poly deriv(const Poly& a) {
  Poly d(a.size() - 1);
  for (std::size_t k = 0; k + 1 < a.size(); ++k) d[k] = Rational(static_cast<long>(k + 1)) * a[k + 1];
  return d;
}

// Hierarchy on truncated Taylor polynomials: index k holds f_{2k+2}.
std::vector<Poly> taylor_hierarchy(const Poly& f2, int n_max) {
  std::vector<Poly> f{f2};
  std::size_t len = f2.size() - 1;
  Poly f2m1 = f2;
  f2m1[0] -= 1;
  Poly f4 = mul(f2, f2m1, len);
  const Poly d2 = deriv(f2);
  for (std::size_t k = 0; k < len; ++k) f4[k] = (f4[k] + d2[k]) / 3;
  f.push_back(f4);
  for (int n = 4; n + 2 <= n_max; n += 2) {
    --len;
    Poly next(len, Rational(0));
    for (int n1 = 4; n1 <= n - 2; ++++n1) {
      const Poly p = mul(f[n1 / 2 - 1], f[(n + 2 - n1) / 2 - 1], len);
      for (std::size_t k = 0; k < len; ++k) next[k] += p[k];
    }
    Poly br(len, Rational(0));
    for (std::size_t k = 0; k < len; ++k) br[k] = 2 * f2[k];
    br[0] += Rational(1) - Rational(4, n);
    const Poly p = mul(f[n / 2 - 1], br, len);
    const Poly d = deriv(f[n / 2 - 1]);
    for (std::size_t k = 0; k < len; ++k)
      next[k] = (next[k] + p[k]) / (n + 1) + Rational(2, n * (n + 1)) * d[k];
    f.push_back(next);
  }
  return f;
}

}  // namespace

TEST(Hierarchy, F4Examples) {
  EXPECT_EQ(f4_from_f2(Jet<double>::constant(1.0, 2)), Jet<double>::zero(1));
  EXPECT_EQ(f4_from_f2(Jet<double>::zero(2)), Jet<double>::zero(1));
  const Rational d(1, 4), b(1, 4);
  const Jet<Rational> f2({-d, -b * d * d});
  EXPECT_EQ(f4_from_f2(f2).value(), (d * d + d - b * d * d) / 3);
  EXPECT_THROW(f4_from_f2(Jet<double>({1.0})), UsageError);
}

TEST(Hierarchy, FnStepZeroAndOrder) {
  std::vector<Jet<double>> f{Jet<double>::zero(3), Jet<double>::zero(2)};
  EXPECT_EQ(fn_step(4, f), Jet<double>::zero(1));
  std::vector<Jet<double>> low{Jet<double>::zero(1), Jet<double>::zero(0)};
  EXPECT_THROW(fn_step(4, low), UsageError);
}

TEST(Hierarchy, FixedPointSequence) {
  for (const Rational& x : fixed_point_sequence(Rational(1), 40)) {
    static int k = 0;
    if (k++ > 0) EXPECT_EQ(x, 0);
  }
  const Rational eps(1, 10);
  const auto f = fixed_point_sequence(1 + eps, 6);
  EXPECT_EQ(f[1], (1 + eps) * eps / 3);
  // The printed recursion at n = 4 gives f6 = f4 (2 f2) / 5 = (2/15)(1+eps)^2 eps.
  EXPECT_EQ(f[2], Rational(2, 15) * (1 + eps) * (1 + eps) * eps);
  for (const Rational& x : fixed_point_sequence(Rational(0), 20)) EXPECT_EQ(x, 0);
}

TEST(Hierarchy, FixedPointMatchesScaleInvariantTable) {
  const Rational f2(7, 5);
  const TwoPointFamily<Rational> fam = ScaleInvariant<Rational>{f2};
  const auto grid = uniform_grid(Rational(0), Rational(4), 3);
  const FlowTable<Rational> t = build_table(fam, 14, 2, grid);
  const auto fp = fixed_point_sequence(f2, 14);
  for (int n = 2; n <= 14; n += 2)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Jet<Rational>& j = t.at(n, i);
      EXPECT_EQ(j.value(), fp[level_index(n)]);
      for (int l = 1; l <= j.order(); ++l) EXPECT_EQ(j[l], 0);
    }
}

TEST(Hierarchy, JetRecursionMatchesTaylorPolynomialOracle) {
  const Rational delta(1, 3), beta(1, 5), mu_max(6);
  const TwoPointFamily<Rational> fam = BetaFlow<Rational>{delta, beta, -1, 0, mu_max};
  const int n_max = 14, l_max = 3;
  const Rational mu(5, 2);
  const Jet<Rational> f2 = family_jet(fam, mu, required_family_order(n_max, l_max));
  const auto jets = hierarchy_at_point(f2, n_max);
  const auto polys = taylor_hierarchy(f2.taylor(), n_max);
  for (int n = 2; n <= n_max; n += 2) {
    EXPECT_EQ(jets[level_index(n)].order(), l_max + (n_max - n) / 2);
    EXPECT_EQ(jets[level_index(n)].taylor(), polys[level_index(n)]) << "n = " << n;
  }
}

TEST(Hierarchy, TableDerivativesMatchGridFiniteDifferences) {
  const TwoPointFamily<double> fam = BetaFlow<double>{0.5, 0.25, -1, 0, 4.0};
  const auto grid = uniform_grid(1.0, 1.002, 3);
  const FlowTable<double> t = build_table(fam, 10, 1, grid);
  for (int n = 4; n <= 10; n += 2) {
    const double fd = (t.at(n, 2).value() - t.at(n, 0).value()) / 0.002;
    EXPECT_NEAR(fd, t.at(n, 1)[1], 1e-6 * (1 + std::fabs(fd)));
  }
}

TEST(Hierarchy, BuildTableExamples) {
  const auto grid = uniform_grid(0.0, 10.0, 5);
  const FlowTable<double> one = build_table(TwoPointFamily<double>(ScaleInvariant<double>{1.0}), 12, 2, grid);
  const FlowTable<double> zero = build_table(TwoPointFamily<double>(ScaleInvariant<double>{0.0}), 12, 2, grid);
  for (int n = 4; n <= 12; n += 2)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (int l = 0; l <= one.at(n, i).order(); ++l) EXPECT_EQ(one.at(n, i)[l], 0.0);
      for (int l = 0; l <= zero.at(n, i).order(); ++l) EXPECT_EQ(zero.at(n, i)[l], 0.0);
    }
  const double d = 0.25, b = 0.25;
  const FlowTable<double> bt = build_table(TwoPointFamily<double>(BetaFlow<double>{d, b, -1, 0, 10.0}), 8, 1, grid, 4);
  const double f4 = bt.at(4, grid.size() - 1).value();
  EXPECT_NEAR(f4, (d * d + d - b * d * d) / 3, 1e-15);
  EXPECT_GT(f4, 0.0);
  EXPECT_EQ(bt.effective_order(8), 1);
  EXPECT_EQ(bt.effective_order(2), 4);
}

TEST(Hierarchy, ThreadedBuildIsDeterministic) {
  const TwoPointFamily<double> fam = BetaFlow<double>{0.5, 0.25, -1, 0, 20.0};
  const auto grid = uniform_grid(0.0, 20.0, 33);
  const auto a = build_table(fam, 20, 4, grid, 1);
  const auto b = build_table(fam, 20, 4, grid, 8);
  for (int n = 2; n <= 20; n += 2)
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(a.at(n, i), b.at(n, i));
}

TEST(Hierarchy, OverflowNamesLocation) {
  const TwoPointFamily<double> fam = ScaleInvariant<double>{1e200};
  try {
    build_table(fam, 8, 0, std::vector<double>{0.0});
    FAIL() << "expected overflow";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("n = 4"), std::string::npos);
  }
}

TEST(Hierarchy, Rescaling) {
  EXPECT_DOUBLE_EQ(rescale_to_A(0.3, 2, 0.5), 0.3 / 0.5 / 2);
  EXPECT_EQ(rescale_to_A(0.0, 8, 0.5), 0.0);
  const double c = 1 / (16 * M_PI * M_PI);
  EXPECT_NEAR(rescale_to_A(0.2, 4, 1.0), 0.2 / (4 * c), 1e-12);
  EXPECT_NEAR(rescale_to_A(0.2, 4, 1.0), 4 * M_PI * M_PI * 0.2, 1e-12);
  EXPECT_THROW(rescale_to_A(1.0, 4, 0.0), UsageError);
  EXPECT_DOUBLE_EQ(rescale_to_G(0.5, 6, 1.0), 24 * 0.5);
  EXPECT_THROW(rescale_to_G(1.0, 4, -1.0), UsageError);
}

TEST(Hierarchy, UvScan) {
  const double d = 0.25, b = 0.25;
  std::function<TwoPointFamily<double>(const double&)> make = [&](const double& m) {
    return TwoPointFamily<double>(BetaFlow<double>{d, b, -1, 0, m});
  };
  const UvScanReport r = uv_limit_scan(make, std::vector<double>{10, 20, 40, 80}, 12);
  ASSERT_EQ(r.rows.size(), 6u);
  for (double v : r.rows[0].value_at_mu_max) EXPECT_EQ(v, -d);
  for (const auto& row : r.rows) EXPECT_TRUE(row.zero_values_decreasing) << "n = " << row.n;

  std::function<TwoPointFamily<double>(const double&)> rev = [](const double& m) {
    return TwoPointFamily<double>(ReversedFlow<double>{0.2, -0.5, m});
  };
  const UvScanReport t = uv_limit_scan(rev, std::vector<double>{10, 100, 1000, 10000}, 8);
  for (const auto& row : t.rows) {
    EXPECT_LT(std::fabs(row.value_at_mu_max.back()), std::fabs(row.value_at_mu_max.front()));
    EXPECT_TRUE(row.differences_shrinking) << "n = " << row.n;
  }
}
