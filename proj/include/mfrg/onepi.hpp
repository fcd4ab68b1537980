#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mfrg/errors.hpp"
#include "mfrg/families.hpp"
#include "mfrg/hierarchy.hpp"
#include "mfrg/jet.hpp"
#include "mfrg/quadrature.hpp"
#include "mfrg/report.hpp"
#include "mfrg/scalar.hpp"

namespace mfrg {

/// a(n, nu) in (x d/dx)^n = sum_nu a(n, nu) x^nu d^nu.
class StirlingTable {
 public:
  explicit StirlingTable(int n_max) : n_max_(n_max) {
    detail::require(n_max >= 1, "StirlingTable: n_max must be >= 1");
    a_.assign(n_max + 1, std::vector<Integer>(n_max + 2, Integer(0)));
    a_[1][1] = 1;
    for (int n = 1; n < n_max; ++n)
      for (int nu = 1; nu <= n + 1; ++nu) a_[n + 1][nu] = Integer(nu) * a_[n][nu] + a_[n][nu - 1];
  }
  const Integer& operator()(int n, int nu) const {
    detail::require(n >= 1 && n <= n_max_ && nu >= 1 && nu <= n,
                    "stirling: need 1 <= nu <= n <= " + std::to_string(n_max_));
    return a_[n][nu];
  }
  int n_max() const { return n_max_; }

 private:
  int n_max_;
  std::vector<std::vector<Integer>> a_;
};

inline Integer stirling(int n, int nu) {
  detail::require(n >= 1 && nu >= 1 && nu <= n, "stirling: need 1 <= nu <= n");
  return StirlingTable(n)(n, nu);
}

/// Ordered compositions of even n into v even parts >= 2.
inline std::vector<std::vector<int>> compositions(int n, int v) {
  std::vector<std::vector<int>> out;
  if (n % 2 != 0 || v < 1 || 2 * v > n) return out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int left, int parts) {
    if (parts == 1) {
      cur.push_back(left);
      out.push_back(cur);
      cur.pop_back();
      return;
    }
    for (int b = 2; b <= left - 2 * (parts - 1); b += 2) {
      cur.push_back(b);
      rec(left - b, parts - 1);
      cur.pop_back();
    }
  };
  rec(n, v);
  return out;
}

/// C(n/2 - 1, v - 1).
inline Integer composition_count(int n, int v) {
  if (n % 2 != 0 || v < 1 || 2 * v > n) return 0;
  return binomial_int(n / 2 - 1, v - 1);
}

namespace detail {

inline double binomial_real(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// (exp(-gamma t) - exp(-t)) / t as a jet in mu, gamma = exp(-mu)
inline Jet<double> propagator_jet(double t, double mu, int order) {
  const Jet<double> g = exp_neg_mu_jet(mu, order);
  Jet<double> e = exp(-t * g);
  std::vector<double> d(order + 1);
  const double gamma = g.value();
  d[0] = std::exp(-gamma * t) * (-std::expm1(std::expm1(-mu) * t)) / t;
  for (int l = 1; l <= order; ++l) d[l] = e[l] / t;
  return Jet<double>(d, mu);
}

}  // namespace detail

/// Jets of I_M(gamma(mu)) for M = 0..m_max from int_0^inf t e^-t [(e^{-gamma t} - e^{-t})/t]^M dt.
inline std::vector<Jet<double>> i_jets(double mu, int m_max, int order, const quad::Tolerance& tol = {1e-11, 1e-300, 4000, 1e-13}) {
  detail::require(mu >= 0, "I_N: mu must be nonnegative");
  detail::require(m_max >= 0 && order >= 0, "I_N: negative index");
  std::vector<Jet<double>> out;
  out.push_back(Jet<double>::constant(1.0, order, mu));
  if (m_max == 0) return out;
  const std::size_t width = order + 1;
  const std::size_t dim = m_max * width;
  auto f = [&](double t) {
    std::vector<double> v(dim, 0.0);
    if (t <= 0.0 || t > 800.0) return v;
    const double w = t * std::exp(-t);
    const Jet<double> c = detail::propagator_jet(t, mu, order);
    Jet<double> p = c;
    for (int m = 1; m <= m_max; ++m) {
      for (int l = 0; l <= order; ++l) v[(m - 1) * width + l] = w * p[l];
      if (m < m_max) p = p * c;
    }
    return v;
  };
  const std::vector<double> r =
      quad::integrate_vector_half_line(f, dim, tol, "I_N at mu = " + to_string(mu));
  for (int m = 1; m <= m_max; ++m) {
    std::vector<double> d(r.begin() + (m - 1) * width, r.begin() + m * width);
    out.emplace_back(d, mu);
  }
  return out;
}

/// I_N(gamma) for gamma in [0, 1].
inline double i_n(double gamma, int n, double tol = 1e-11) {
  detail::require(gamma > 0 && gamma <= 1, "I_N: gamma must lie in (0, 1]");
  if (n == 0) return 1.0;
  return i_jets(-std::log(gamma), n, 0, {tol, 1e-300, 4000, 0.0})[n].value();
}

struct JKernels {
  std::vector<Jet<double>> J;  // J[v], v = 0..v_max
  int series_terms = 0;
  bool certified = true;        // geometric tail bound 4 delta < 0.9 available
};

/// J_v = c sum_N C(N+v+1, N) delta^N I_{v+N}(gamma), v = 0..v_max, from the jet of delta(mu).
inline JKernels j_kernels(int v_max, const Jet<double>& delta, double series_tol = 1e-16,
                          const quad::Tolerance& qtol = {1e-11, 1e-300, 4000, 1e-13}) {
  detail::require(v_max >= 0, "J_kernel: v_max must be >= 0");
  const double d = delta.value();
  if (!(d < 1.0)) throw DomainError("J_kernel: delta(mu) = " + to_string(d) + " must be < 1");
  detail::require(d >= 0.0, "J_kernel: delta(mu) must be nonnegative");
  const double mu = delta.anchor();
  const int order = delta.order();
  JKernels out;
  int n_terms = 0;
  if (d > 0.0) {
    const double q = 4.0 * d;
    out.certified = q < 0.9;
    if (out.certified) {
      double tail = q / (1.0 - q);
      while (tail > series_tol) {
        ++n_terms;
        tail *= q;
      }
    } else {
      // crude stop for the uncertified regime: binomial growth against delta^N
      double term = 1.0;
      while (n_terms < 400) {
        ++n_terms;
        term = detail::binomial_real(n_terms + v_max + 1, n_terms) * std::pow(d, n_terms);
        if (term < series_tol) break;
      }
    }
  }
  out.series_terms = n_terms;
  const std::vector<Jet<double>> I = i_jets(mu, v_max + n_terms, order, qtol);
  std::vector<Jet<double>> dpow{Jet<double>::constant(1.0, order, mu)};
  for (int n = 1; n <= n_terms; ++n) dpow.push_back(dpow.back() * delta);
  for (int v = 0; v <= v_max; ++v) {
    Jet<double> s = Jet<double>::zero(order, mu);
    for (int n = 0; n <= n_terms; ++n) s += detail::binomial_real(n + v + 1, n) * (dpow[n] * I[v + n]);
    out.J.push_back(kLoopConstant * s);
  }
  return out;
}

/// h_{n+2} from h_2..h_n and the J-kernels at one point; h[k] holds h_{2k+2}.
template <Scalar T>
Jet<T> onepi_step(const std::vector<Jet<T>>& h, const std::vector<Jet<T>>& J, int n) {
  detail::require(n >= 2 && n % 2 == 0, "onepi_step: n must be even and >= 2");
  detail::require(static_cast<int>(h.size()) > level_index(n), "onepi_step: h_" + std::to_string(n) + " missing");
  const Jet<T>& hn = h[level_index(n)];
  const int order = hn.order() - 1;
  detail::require(order >= 0, "onepi_step: h_" + std::to_string(n) + " has no derivative left");
  detail::require(static_cast<int>(J.size()) >= std::max(1, n / 2), "onepi_step: J kernels missing");
  for (const auto& j : J) detail::require(j.order() >= order, "onepi_step: J kernel order too low");
  const double a = hn.anchor();
  auto cut = [&](const Jet<T>& x) { return x.truncated(order); };

  // D[v][m]: sum over compositions of m into v even parts of prod h_{b+2}
  Jet<T> sum = Jet<T>::zero(order, a);
  std::vector<std::vector<Jet<T>>> D(2, std::vector<Jet<T>>(n + 1, Jet<T>::zero(order, a)));
  for (int m = 2; m <= n - 2; m += 2) D[1][m] = cut(h[level_index(m + 2)]);
  for (int v = 2; v <= n / 2; ++v) {
    std::vector<Jet<T>> next(n + 1, Jet<T>::zero(order, a));
    for (int m = 2 * v; m <= n; m += 2)
      for (int b = 2; b <= m - 2 * (v - 1); b += 2) {
        if (b + 2 > n) continue;
        next[m] += cut(h[level_index(b + 2)]) * D[v - 1][m - b];
      }
    D.push_back(std::move(next));
    const Jet<T> term = cut(J[v - 1]) * D[v][n];
    if (v % 2 == 0)
      sum += term;
    else
      sum -= term;
  }
  const T nn(n);
  sum += (T(2) / (nn * (nn - 1))) * hn.shifted();
  sum += (T(n - 4) / (nn * (nn - 1))) * cut(hn);
  return (sum * reciprocal(cut(J[0]))).truncated(order);
}

/// h_2..h_{n_max} at one point.
template <Scalar T>
std::vector<Jet<T>> onepi_at_point(const Jet<T>& h2, const std::vector<Jet<T>>& J, int n_max) {
  std::vector<Jet<T>> h{h2};
  for (int n = 2; n + 2 <= n_max; n += 2) h.push_back(onepi_step(h, J, n));
  return h;
}

struct OnePiTable {
  int n_max = 2;
  int l_max = 0;
  std::vector<double> mu_grid;
  std::vector<std::vector<Jet<double>>> h;  // h[level_index(n)][i]
  std::vector<JKernels> J;                 // per grid point
  TwoPointFamily<double> family;

  const Jet<double>& at(int n, std::size_t i) const {
    detail::require(n >= 2 && n <= n_max && n % 2 == 0, "OnePiTable: n out of range");
    detail::require(i < mu_grid.size(), "OnePiTable: grid index out of range");
    return h[level_index(n)][i];
  }
  bool certified() const {
    for (const auto& j : J)
      if (!j.certified) return false;
    return true;
  }
  double delta_at(std::size_t i) const { return -at(2, i).value(); }
};

/// h_2 = f_2 of the family (h_2 = -delta), J-kernels and h_n on the grid.
inline OnePiTable build_onepi_table(const TwoPointFamily<double>& family, int n_max, int l_max,
                                    const std::vector<double>& grid, int threads = 1, double series_tol = 1e-16) {
  detail::require(n_max >= 4 && n_max % 2 == 0, "build_onepi_table: n_max must be even and >= 4");
  detail::require(l_max >= 0, "build_onepi_table: l_max must be >= 0");
  OnePiTable t;
  t.n_max = n_max;
  t.l_max = l_max;
  t.mu_grid = grid;
  t.family = family;
  t.h.assign(n_max / 2, std::vector<Jet<double>>(grid.size()));
  t.J.resize(grid.size());
  const int order = required_family_order(n_max, l_max);
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    const Jet<double> h2 = family_jet(family, grid[i], order);
    const Jet<double> delta = (-h2).truncated(order - 1);
    if (!(delta.value() > 0)) throw DomainError("build_onepi_table: need delta(mu) > 0 at mu = " + to_string(grid[i]));
    t.J[i] = j_kernels(n_max / 2 - 1, delta, series_tol);
    const auto h = onepi_at_point(h2, t.J[i].J, n_max);
    for (int n = 2; n <= n_max; n += 2) {
      if (!h[level_index(n)].all_finite())
        throw NumericError("onepi: non-finite h at n = " + std::to_string(n) + ", mu = " + to_string(grid[i]));
      t.h[level_index(n)][i] = h[level_index(n)];
    }
  });
  return t;
}

/// sum_b multinomial(n; b) prod g_{b+2} against n! sum_b prod h_{b+2} under g_m = (m-2)! h_m.
inline bool multinomial_crosscheck(int n, int v, const std::map<int, Rational>& h) {
  Rational lhs(0), rhs(0);
  for (const auto& b : compositions(n, v)) {
    Rational multi = factorial<Rational>(n), gp(1), hp(1);
    for (int bk : b) {
      multi /= factorial<Rational>(bk);
      const Rational& hv = h.at(bk + 2);
      gp *= factorial<Rational>(bk) * hv;
      hp *= hv;
    }
    lhs += multi * gp;
    rhs += hp;
  }
  return lhs == factorial<Rational>(n) * rhs;
}

/// calB(n, l; mu) = delta^2 K^(n+l-2) (n+l-2)! / ((n+2)(n+1)(l+2)(l+1)), in log form.
inline double log_onepi_bound(int n, int l, double delta, double K) {
  return 2 * std::log(delta) + (n + l - 2) * std::log(K) + log_factorial(n + l - 2) -
         std::log(double(n + 2) * (n + 1) * (l + 2) * (l + 1));
}

/// jv bounds: c/(1+delta)^2 <= J_0 <= c/(1-delta)^2 and 0 < J_v <= c (1-gamma)^v / (1-delta)^(2+v).
inline BoundReport jv_report(const OnePiTable& t, double slack = 1e-9) {
  BoundReport rep;
  rep.lemma = "jv";
  rep.params = {{"n_max", std::to_string(t.n_max)}, {"grid", std::to_string(t.mu_grid.size())}};
  const double lc = std::log(kLoopConstant);
  for (std::size_t i = 0; i < t.mu_grid.size(); ++i) {
    const double mu = t.mu_grid[i], d = t.delta_at(i);
    const auto& J = t.J[i].J;
    rep.add_upper(0, 0, mu, J[0].value(), lc - 2 * std::log1p(-d), slack);
    rep.add_upper(0, 0, mu, 1.0 / J[0].value(), 2 * std::log1p(d) - lc, slack);
    for (int v = 1; v < static_cast<int>(J.size()); ++v) {
      const double one_minus_gamma = -std::expm1(-mu);
      const double lb = lc + v * std::log(one_minus_gamma) - (2 + v) * std::log1p(-d);
      rep.add_upper(v, 0, mu, J[v].value(), lb, slack);
      if (mu > 0) rep.add_positive(v, 0, mu, J[v].value(), "J_v > 0");
    }
  }
  return rep;
}

/// jlv derivative envelopes for 1 <= l <= l_max.
inline BoundReport jlv_report(const OnePiTable& t, int l_max) {
  BoundReport rep;
  rep.lemma = "jlv";
  rep.params = {{"l_max", std::to_string(l_max)}};
  const double lpi2 = std::log(M_PI * M_PI);
  for (std::size_t i = 0; i < t.mu_grid.size(); ++i) {
    const double mu = t.mu_grid[i], d = t.delta_at(i);
    const auto& J = t.J[i].J;
    for (int v = 0; v < static_cast<int>(J.size()); ++v)
      for (int l = 1; l <= l_max && l <= J[v].order(); ++l) {
        const double base = -mu + 3 * l * std::log(2.0) + log_factorial(l + 1) - lpi2;
        const double lb = v == 0 ? std::log(d) - std::log(2.0) + base : base + 2 * v * std::log(2.0);
        rep.add_upper(v, l, mu, J[v][l], lb);
      }
  }
  return rep;
}

/// INga bound: |d^l I_N| <= gamma 2^(N+2l+2) (l+1)! for 1 <= l <= l_max, N <= n_max.
inline BoundReport inga_report(const std::vector<double>& mu_grid, int n_max, int l_max) {
  BoundReport rep;
  rep.lemma = "INga";
  rep.params = {{"N_max", std::to_string(n_max)}, {"l_max", std::to_string(l_max)}};
  for (double mu : mu_grid) {
    const auto I = i_jets(mu, n_max, l_max);
    for (int N = 0; N <= n_max; ++N)
      for (int l = 1; l <= l_max; ++l)
        rep.add_upper(N, l, mu, I[N][l], -mu + (N + 2 * l + 2) * std::log(2.0) + log_factorial(l + 1));
  }
  return rep;
}

namespace detail {

inline Rational pair_weight(int x) { return Rational(1) / Rational((x + 2) * (x + 1)); }

// sum over l_1 + ... + l_v = l, l_j >= lo, step, of prod 1/((l_j+2)(l_j+1)), by enumeration
inline Rational enumerate_products(int total, int v, int lo, int step) {
  if (v == 1) return (total >= lo && (total - lo) % step == 0) ? pair_weight(total) : Rational(0);
  Rational s(0);
  for (int x = lo; x <= total - lo * (v - 1); x += step) s += pair_weight(x) * enumerate_products(total - x, v - 1, lo, step);
  return s;
}

}  // namespace detail

/// Product sums prodhl (v <= v_max, l <= l_max, l_j >= l_min) and prodhbl (2 <= v <= v_max, even n <= n_max), exact.
/// l_min = 0 admits empty slots; the sum then exceeds (3/2)^3 at v = 3, l = 19, 20.
inline BoundReport prodh_report(int v_max, int l_max, int n_max, int l_min = 1) {
  BoundReport rep;
  rep.lemma = "prodh";
  rep.params = {{"v_max", std::to_string(v_max)}, {"l_max", std::to_string(l_max)}, {"n_max", std::to_string(n_max)},
                {"l_min", std::to_string(l_min)}};
  for (int v = 1; v <= v_max; ++v)
    for (int l = std::max(l_min * v, 0); l <= l_max; ++l) {
      const Rational s = detail::enumerate_products(l, v, l_min, 1);
      const Rational rhs = pow_int(Rational(3, 2), v) * detail::pair_weight(l);
      rep.add_exact_le(v, l, 0.0, s, rhs, "prodhl");
    }
  for (int v = 2; v <= v_max; ++v)
    for (int n = 2 * v; n <= n_max; n += 2) {
      const Rational s = detail::enumerate_products(n, v, 2, 2);
      const Rational rhs = pow_int(Rational(3, 2), v) * detail::pair_weight(n);
      rep.add_exact_le(v, n, 0.0, s, rhs, "prodhbl");
    }
  return rep;
}

/// 1PI bounds on a table: |d^l h_n| <= calB(n, l) for n >= 6 and n = 4, l >= 1; |h_4| <= calB(4, 0) 4c/delta;
/// h_4 > (1-delta)^2 (delta - beta delta^2)/c > 0.
inline BoundReport pi4_report(const OnePiTable& t, double K, int l_max) {
  BoundReport rep;
  rep.lemma = "pi4";
  rep.params = {{"K", to_string(K)}, {"n_max", std::to_string(t.n_max)}, {"l_max", std::to_string(l_max)}};
  const double c = kLoopConstant;
  for (std::size_t i = 0; i < t.mu_grid.size(); ++i) {
    const double mu = t.mu_grid[i], d = t.delta_at(i);
    const Jet<double>& h2 = t.at(2, i);
    const double source = h2[1] - h2[0];  // delta - beta delta^2
    const double h4 = t.at(4, i).value();
    rep.add_positive(4, 0, mu, h4, "h4 > 0");
    rep.add_positive(4, 0, mu, h4 - (1 - d) * (1 - d) * source / c, "h4 lower bound");
    rep.add_upper(4, 0, mu, h4, log_onepi_bound(4, 0, d, K) + std::log(4 * c / d));
    for (int n = 4; n <= t.n_max; n += 2) {
      const Jet<double>& j = t.at(n, i);
      for (int l = (n == 4 ? 1 : 0); l <= l_max && l <= j.order(); ++l)
        rep.add_upper(n, l, mu, j[l], log_onepi_bound(n, l, d, K));
    }
  }
  return rep;
}

}  // namespace mfrg
