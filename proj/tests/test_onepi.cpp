#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mfrg/onepi.hpp"

using namespace mfrg;

namespace {

const double kC = 1.0 / (16 * M_PI * M_PI);

// I_N(gamma) as an N-fold integral over [gamma, 1]^N.
double nested_i(double gamma, int n) {
  std::function<double(int, double)> rec = [&](int left, double shift) -> double {
    if (left == 0) return 1.0 / ((1 + shift) * (1 + shift));
    return quad::integrate([&](double x) { return rec(left - 1, shift + x); }, gamma, 1.0, 1e-12);
  };
  return rec(n, 0.0);
}

// J_v = c int_0^inf s e^-s C^v / (1 - delta C)^(2+v) ds with C = (e^{-gamma s} - e^{-s})/s.
double direct_j(int v, double mu, double delta) {
  const double gamma = std::exp(-mu);
  auto f = [&](double s) {
    if (s <= 0) return 0.0;
    const double c = (std::exp(-gamma * s) - std::exp(-s)) / s;
    return s * std::exp(-s) * std::pow(c, v) / std::pow(1 - delta * c, 2 + v);
  };
  return kC * quad::integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-12);
}

long double falling(int m, int nu) {
  long double r = 1;
  for (int i = 0; i < nu; ++i) r *= (m - i);
  return r;
}

}  // namespace

TEST(OnePi, StirlingExamplesAndBruteForce) {
  EXPECT_EQ(stirling(3, 2), 3);
  EXPECT_EQ(stirling(4, 2), 7);
  const StirlingTable t(10);
  for (int n = 1; n <= 10; ++n) {
    EXPECT_EQ(t(n, 1), 1);
    EXPECT_EQ(t(n, n), 1);
    for (int m = 0; m <= 12; ++m) {
      Integer s(0), mn(1);
      for (int nu = 1; nu <= n; ++nu) s += t(n, nu) * Integer(static_cast<long long>(falling(m, nu)));
      for (int i = 0; i < n; ++i) mn *= m;
      EXPECT_EQ(s, mn) << "n = " << n << ", m = " << m;
    }
    for (int nu = 1; nu <= n; ++nu)
      EXPECT_LE(to_double(Rational(t(n, nu))), std::pow(2.0, n) * std::exp(log_factorial(n) - log_factorial(nu)));
  }
  EXPECT_THROW(stirling(3, 4), UsageError);
}

TEST(OnePi, Compositions) {
  using V = std::vector<std::vector<int>>;
  EXPECT_EQ(compositions(4, 2), (V{{2, 2}}));
  EXPECT_EQ(compositions(8, 2), (V{{2, 6}, {4, 4}, {6, 2}}));
  EXPECT_EQ(compositions(6, 3), (V{{2, 2, 2}}));
  EXPECT_TRUE(compositions(6, 4).empty());
  for (int n = 2; n <= 24; n += 2)
    for (int v = 1; v <= n / 2; ++v) {
      const auto c = compositions(n, v);
      EXPECT_EQ(Integer(c.size()), composition_count(n, v));
      for (const auto& b : c) {
        int s = 0;
        for (int x : b) {
          EXPECT_EQ(x % 2, 0);
          EXPECT_GE(x, 2);
          s += x;
        }
        EXPECT_EQ(s, n);
      }
    }
}

TEST(OnePi, INValues) {
  EXPECT_EQ(i_n(0.3, 0), 1.0);
  for (int n = 1; n <= 4; ++n) EXPECT_NEAR(i_n(1.0, n), 0.0, 1e-300);
  for (double g : {0.05, 0.3, 0.8}) EXPECT_NEAR(i_n(g, 1), 1 / (1 + g) - 0.5, 1e-12);
  for (double g : {0.1, 0.5}) {
    for (int n = 1; n <= 3; ++n) EXPECT_NEAR(i_n(g, n), nested_i(g, n), 1e-10) << "N = " << n;
  }
}

TEST(OnePi, IJetsMatchFiniteDifferences) {
  const double mu = 0.7, h = 1e-3;
  const auto I = i_jets(mu, 3, 2);
  for (int n = 1; n <= 3; ++n) {
    const double p = i_n(std::exp(-(mu + h)), n), m = i_n(std::exp(-(mu - h)), n), z = i_n(std::exp(-mu), n);
    EXPECT_NEAR(I[n][1], (p - m) / (2 * h), 1e-6);
    EXPECT_NEAR(I[n][2], (p - 2 * z + m) / (h * h), 1e-4);
  }
  // d/dmu of 1/(1+gamma) - 1/2 is gamma/(1+gamma)^2
  const double g = std::exp(-mu);
  EXPECT_NEAR(I[1][1], g / ((1 + g) * (1 + g)), 1e-11);
}

TEST(OnePi, JKernelsAgainstDirectIntegral) {
  const Jet<double> zero = Jet<double>::zero(2, 3.0);
  const JKernels z = j_kernels(2, zero);
  EXPECT_NEAR(z.J[0].value(), kC, 1e-12 * kC);
  EXPECT_NEAR(z.J[1].value(), kC * i_n(std::exp(-3.0), 1), 1e-12);
  for (double mu : {0.5, 2.0, 10.0})
    for (double d : {kC / 8, 0.05, 0.2}) {
      const JKernels k = j_kernels(2, delta_family_jet(d, 1.0, 1, mu));
      EXPECT_TRUE(k.certified);
      for (int v = 0; v <= 2; ++v) EXPECT_NEAR(k.J[v].value(), direct_j(v, mu, d), 1e-8 * kC) << v;
    }
  EXPECT_FALSE(j_kernels(1, delta_family_jet(0.3, 1.0, 1, 1.0)).certified);
  EXPECT_THROW(j_kernels(1, delta_family_jet(1.0, 1.0, 1, 1.0)), DomainError);
}

TEST(OnePi, JKernelJetMatchesFiniteDifference) {
  const double beta = 1.0, d0 = 0.1, mu = 1.5, h = 1e-3;
  auto delta_at = [&](double m) { return d0 / (1 + (mu - m) * beta * d0); };
  const JKernels k = j_kernels(2, delta_family_jet(d0, beta, 2, mu));
  for (int v = 0; v <= 2; ++v) {
    const double p = direct_j(v, mu + h, delta_at(mu + h)), m = direct_j(v, mu - h, delta_at(mu - h));
    EXPECT_NEAR(k.J[v][1], (p - m) / (2 * h), 1e-6 * kC);
  }
}

TEST(OnePi, StepExamples) {
  const double d = 0.01, beta = 1.0, mu = 2.0;
  const Jet<double> delta = delta_family_jet(d, beta, 6, mu);
  const JKernels k = j_kernels(3, delta.truncated(5));
  const auto h = onepi_at_point(Jet<double>(-delta), k.J, 8);
  EXPECT_NEAR(h[1].value(), (d - beta * d * d) / k.J[0].value(), 1e-12 * h[1].value());
  const Jet<double> j0h6 = (k.J[0].truncated(3) * h[2].truncated(3));
  const Jet<double> rhs = (k.J[1].truncated(3) * (h[1] * h[1]).truncated(3)) + (1.0 / 6) * h[1].shifted().truncated(3);
  for (int l = 0; l <= 3; ++l) EXPECT_NEAR(j0h6[l], rhs[l], 1e-12 * (std::fabs(rhs[l]) + 1e-300));

  const JKernels z = j_kernels(3, Jet<double>::zero(5, mu));
  for (const auto& x : onepi_at_point(Jet<double>::zero(6, mu), z.J, 8)) EXPECT_EQ(x, Jet<double>::zero(x.order(), mu));
}

TEST(OnePi, StepMatchesEnumeratedCompositions) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> u(-50, 50);
  const int n = 10, order = 4;
  std::vector<Jet<Rational>> h, J;
  for (int m = 2; m <= n; m += 2) {
    std::vector<Rational> d(order + 1 + (n - m) / 2);
    for (auto& x : d) x = Rational(u(rng), 37);
    h.emplace_back(d, 0.0);
  }
  for (int v = 0; v < n / 2; ++v) {
    std::vector<Rational> d(order + 5);
    for (auto& x : d) x = Rational(u(rng), 11);
    d[0] = Rational(1) + Rational(std::abs(u(rng)), 100);
    J.emplace_back(d, 0.0);
  }
  const int o = h[level_index(n)].order() - 1;
  Jet<Rational> rhs = Jet<Rational>::zero(o);
  for (int v = 2; v <= n / 2; ++v)
    for (const auto& b : compositions(n, v)) {
      Jet<Rational> p = J[v - 1].truncated(o);
      for (int bk : b) p = p * h[level_index(bk + 2)].truncated(o);
      rhs += (v % 2 == 0) ? p : Jet<Rational>(-p);
    }
  rhs += Rational(2, n * (n - 1)) * h[level_index(n)].shifted();
  rhs += Rational(n - 4, n * (n - 1)) * h[level_index(n)].truncated(o);
  EXPECT_EQ(onepi_step(h, J, n) * J[0].truncated(o), rhs);
}

TEST(OnePi, MultinomialCrosscheck) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> u(-90, 90);
  std::map<int, Rational> h;
  for (int m = 2; m <= 26; m += 2) h[m] = Rational(u(rng), 13);
  EXPECT_TRUE(multinomial_crosscheck(4, 2, h));
  EXPECT_TRUE(multinomial_crosscheck(8, 2, h));
  for (int n = 2; n <= 24; n += 2)
    for (int v = 1; v <= n / 2; ++v) EXPECT_TRUE(multinomial_crosscheck(n, v, h));
}

TEST(OnePi, ProdhEmptySlots) {
  EXPECT_TRUE(prodh_report(5, 40, 40).ok());
  // allowing l_j = 0 breaks the v = 3 bound, barely, from l = 19 on
  std::vector<std::pair<int, int>> bad;
  for (const auto& r : prodh_report(3, 20, 6, 0).records)
    if (!r.pass) bad.emplace_back(r.n, r.l);
  EXPECT_EQ(bad, (std::vector<std::pair<int, int>>{{3, 19}, {3, 20}}));
}

TEST(OnePi, ProdhAndSmallSuite) {
  EXPECT_TRUE(prodh_report(3, 8, 16).ok());
  const double delta = kC / 8;
  const TwoPointFamily<double> fam = BetaFlow<double>{delta, 1.0, -1, 0, 20.0};
  const OnePiTable t = build_onepi_table(fam, 10, 3, uniform_grid(0.0, 20.0, 5), 2);
  EXPECT_TRUE(t.certified());
  EXPECT_TRUE(jv_report(t).ok());
  // The J_0 envelope carries a factor gamma that the delta-derivative term lacks, so it fails once gamma << beta delta.
  const BoundReport jlv = jlv_report(t, 3);
  for (const auto& r : jlv.records) {
    if (r.mu <= 10.0) EXPECT_TRUE(r.pass) << "v = " << r.n << ", l = " << r.l << ", mu = " << r.mu;
    if (!r.pass) EXPECT_EQ(r.n, 0);
  }
  ASSERT_TRUE(jlv.summary.first_violation.has_value());
  EXPECT_NEAR(jlv.summary.first_violation->lhs, kC * delta * delta, 2e-2 * kC * delta * delta);
  EXPECT_TRUE(pi4_report(t, 4 / kC, 3).ok());
  // K far below the admissible range breaks the bound.
  EXPECT_FALSE(pi4_report(t, 1.0, 3).ok());
}
