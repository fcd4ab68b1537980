#include <gtest/gtest.h>

#include <cmath>

#include "mfrg/trivial.hpp"

using namespace mfrg;

namespace {

const Rational kF20(-1, 500);   // |f20| <= eps/4
const Rational kG40(1, 3200);   // g40 <= eps/32

Jet<Rational> f2_jet_from_taylor(const std::vector<Rational>& f2k, int order) {
  std::vector<Rational> d(order + 1);
  for (int l = 0; l <= order; ++l) d[l] = f2k[l] * factorial<Rational>(l);
  return Jet<Rational>(d, 0.0);
}

}  // namespace

TEST(Trivial, SeedExamples) {
  const auto c = seed_g(12, kF20, kG40);
  EXPECT_EQ(c.g_at(6, 0), -3 * kG40 * kG40);
  // (1/2) g41 + 2 g40 f20 = 0 at n = 4
  EXPECT_EQ(c.g_at(4, 1), -4 * kG40 * kF20);
  const auto z = seed_g(20, kF20, Rational(0));
  for (int n = 4; n <= 20; n += 2) {
    EXPECT_EQ(z.g_at(n, 0), 0);
    EXPECT_EQ(z.g_at(n, 1), 0);
  }
  EXPECT_THROW(seed_g(3, kF20, kG40), UsageError);
}

TEST(Trivial, TaylorStepExamples) {
  const auto c = build_trivial_coeffs(kF20, kG40, 4);
  EXPECT_EQ(c.f2_at(1), 3 * kG40 - kF20 * (kF20 - 1));
  const auto z = build_trivial_coeffs(Rational(0), Rational(0), 8);
  for (const auto& [key, v] : z.g) EXPECT_EQ(v, 0);
  for (const auto& v : z.f2k) EXPECT_EQ(v, 0);
  TrivialCoeffs<Rational> empty = seed_g(4, kF20, kG40);
  EXPECT_THROW(taylor_step(empty, 4, 0), UsageError);
}

TEST(Trivial, TriangleMatchesForwardHierarchyAtZero) {
  const int W = 14;
  const auto c = build_trivial_coeffs(kF20, kG40, W);
  const int order = W - 1;
  const auto f = hierarchy_at_point(f2_jet_from_taylor(c.f2k, order), 2 * W);
  for (int n = 4; n <= 2 * W; n += 2) {
    const Jet<Rational>& j = f[level_index(n)];
    const int m = n / 2 - 2;
    for (int l = 0; l <= j.order(); ++l) {
      const int k = l - m;
      if (k < 0) {
        EXPECT_EQ(j[l], 0) << "n = " << n << ", l = " << l;
      } else if (c.has_g(n, k)) {
        EXPECT_EQ(j[l], c.g_at(n, k) * factorial<Rational>(l)) << "n = " << n << ", k = " << k;
      }
    }
  }
}

TEST(Trivial, NullinOnAnsatzTable) {
  const auto c = build_trivial_coeffs(kF20, kG40, 18);
  const TwoPointFamily<Rational> fam = trivial_family(c, 17, 0.0);
  const FlowTable<Rational> t = build_table(fam, 20, 7, std::vector<Rational>{Rational(0)});
  const BoundReport r = check_nullin(t);
  EXPECT_TRUE(r.ok());
  EXPECT_GT(r.summary.total, 20u);
  // A bare f2 without the matching series breaks the structure at n = 6.
  const FlowTable<Rational> bad =
      build_table(TwoPointFamily<Rational>(ScaleInvariant<Rational>{Rational(1, 10)}), 8, 0, std::vector<Rational>{0});
  EXPECT_FALSE(check_nullin(bad).ok());
}

TEST(Trivial, AnsatzInversion) {
  const std::vector<Rational> f{Rational(1, 7), Rational(2, 9), Rational(-3, 11), Rational(5, 13), Rational(1, 2),
                                Rational(-1, 3)};
  const auto a = solve_ansatz_coeffs(f);
  EXPECT_EQ(a[0], f[0]);
  EXPECT_EQ(a[1], (f[1] + a[0]) / 2);
  EXPECT_EQ(a[2], (f[2] - a[0]) / 9);
  EXPECT_EQ(ansatz_taylor(a, 6), f);
  for (const auto& x : solve_ansatz_coeffs(std::vector<Rational>(5, Rational(0)))) EXPECT_EQ(x, 0);
}

TEST(Trivial, AnsatzTaylorMatchesFamilyJet) {
  const std::vector<Rational> a{Rational(1, 100), Rational(-1, 300), Rational(1, 700), Rational(2, 900)};
  const auto f = ansatz_taylor(a, 6);
  const Jet<Rational> j = family_jet(TwoPointFamily<Rational>(TrivialAnsatz<Rational>{a, 1e-2, 0.0}), Rational(0), 5);
  for (int l = 0; l <= 5; ++l) EXPECT_EQ(j[l], f[l] * factorial<Rational>(l));
}

TEST(Trivial, BoundsAndSigns) {
  const double eps = 1e-2;
  for (const auto& [f20, g40] : std::vector<std::pair<Rational, Rational>>{
           {Rational(1, 400), Rational(1, 3200)}, {Rational(-1, 400), Rational(1, 3200)}, {kF20, kG40}}) {
    const auto c = build_trivial_coeffs(f20, g40, 22, eps);
    EXPECT_TRUE(gnk_report(c, 24).ok());
    EXPECT_TRUE(g0g1_report(c, 24).ok());
    EXPECT_TRUE(sign_alternation_report(c, 40).ok());
  }
}

TEST(Trivial, LandauPole) {
  ASSERT_TRUE(landau_pole(0.1, 2.0).has_value());
  EXPECT_DOUBLE_EQ(*landau_pole(0.1, 2.0), 5.0);
  EXPECT_FALSE(landau_pole(0.1, -2.0).has_value());
  EXPECT_FALSE(landau_pole(0.0, 2.0).has_value());
  EXPECT_EQ(landau_coupling(0.1, 2.0, 0.0), 0.1);
  EXPECT_GT(landau_coupling(0.1, 2.0, 5.0 * (1 - 1e-7)), 1e6 * 0.1);
  EXPECT_THROW(landau_coupling(0.1, 2.0, 5.0), NumericError);
}
