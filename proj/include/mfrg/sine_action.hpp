#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mfrg/errors.hpp"
#include "mfrg/hierarchy.hpp"
#include "mfrg/report.hpp"
#include "mfrg/scalar.hpp"

namespace mfrg {

inline std::map<int, int> prime_factorization(int n) {
  detail::require(n >= 1, "prime_factorization: n must be positive");
  std::map<int, int> f;
  for (int p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      ++f[p];
      n /= p;
    }
  }
  if (n > 1) ++f[n];
  return f;
}

/// Exponent weight of prime p in B(n): 1/4 for 2 and 3, 1/2 for 5, 9/8 for p >= 7.
inline double prime_weight(int p) {
  if (p == 2 || p == 3) return 0.25;
  if (p == 5) return 0.5;
  return 9.0 / 8.0;
}

struct PrimeBound {
  int n = 1;
  std::map<int, int> exponents;

  explicit PrimeBound(int n_) : n(n_), exponents(prime_factorization(n_)) {}

  double log_value() const {
    double s = 0.0;
    for (const auto& [p, e] : exponents) s -= prime_weight(p) * e * std::log(static_cast<double>(p));
    return s;
  }
  double value() const { return std::exp(log_value()); }

  /// log B_eps(n, l) = log B(n) + log((n + l)!/n!) + (l + 1) log eps.
  double log_value(int l, double eps) const {
    return log_value() + log_factorial(n + l) - log_factorial(n) + (l + 1) * std::log(eps);
  }
};

inline double log_bound_B(int n, int l, double eps) {
  detail::require(n >= 1 && l >= 0 && eps > 0, "bound_B: need n >= 1, l >= 0, eps > 0");
  return PrimeBound(n).log_value(l, eps);
}

inline double bound_B(int n, int l, double eps) { return std::exp(log_bound_B(n, l, eps)); }

/// Pairs (nu, n') with (1 + 2 nu) n' = m and n' even, nu = 0 first.
inline std::vector<std::pair<int, int>> odd_divisor_pairs(int m) {
  detail::require(m >= 2 && m % 2 == 0, "odd_divisor_pairs: m must be even and >= 2");
  std::vector<std::pair<int, int>> out;
  for (int d = 1; d <= m; d += 2) {
    if (m % d == 0 && (m / d) % 2 == 0) out.emplace_back((d - 1) / 2, m / d);
  }
  return out;
}

/// a(n, l) at mu = 0; row for n has entries l = 0..seed_order - (n - 2)/2.
template <Scalar T>
struct SineTable {
  int n_max = 2;
  T c;
  std::vector<std::vector<T>> a;  // a[level_index(n)][l]

  const T& at(int n, int l) const {
    detail::require(n >= 2 && n <= n_max && n % 2 == 0, "SineTable: n out of range");
    const auto& row = a[level_index(n)];
    detail::require(l >= 0 && l < static_cast<int>(row.size()),
                    "SineTable: a(" + std::to_string(n) + ", " + std::to_string(l) + ") not available");
    return row[l];
  }
  int max_l(int n) const { return static_cast<int>(a[level_index(n)].size()) - 1; }
};

/// a(n + 2, l) from the mu-derivative form of the bounded-action recursion.
template <Scalar T>
T sine_step(const SineTable<T>& t, int n, int l) {
  detail::require(n >= 2 && n % 2 == 0, "sine_step: n must be even and >= 2");
  detail::require(n <= t.n_max, "sine_step: a(" + std::to_string(n) + ", .) missing");
  const T& c = t.c;
  const T inv_n1 = T(1) / T(n + 1);
  T r(0);
  for (const auto& [nu, np] : odd_divisor_pairs(n + 2)) {
    if (nu == 0) continue;
    const T sgn = (nu % 2 == 1) ? T(1) : T(-1);  // (-1)^(nu - 1)
    r += inv_n1 * T(np - 1) * sgn / factorial<T>(2 * nu) * t.at(np, l);
    r += inv_n1 * T(np) * sgn / factorial<T>(2 * nu - 1) * t.at(np, l);
  }
  T q(0);
  for (int lp = 0; lp <= l; ++lp) {
    const T bin = binomial<T>(l, lp);
    for (int n1 = 2; n1 <= n; n1 += 2) {
      const int n2 = n + 2 - n1;
      for (const auto& [nu1, np] : odd_divisor_pairs(n1)) {
        for (const auto& [nu2, npp] : odd_divisor_pairs(n2)) {
          const T sgn = ((nu1 + nu2) % 2 == 0) ? T(1) : T(-1);
          q += bin * sgn / (factorial<T>(2 * nu1) * factorial<T>(2 * nu2)) * t.at(np, lp) * t.at(npp, l - lp);
        }
      }
    }
  }
  r += q * inv_n1 / c;
  const T k = T(2) * inv_n1 / c;
  r += k * T(n - 4) / T(2 * n) * t.at(n, l) + k / T(n) * t.at(n, l + 1);
  for (const auto& [nu, np] : odd_divisor_pairs(n)) {
    if (nu == 0) continue;
    const T sgn = (nu % 2 == 0) ? T(1) : T(-1);  // (-1)^nu
    const T inv_f = T(1) / factorial<T>(2 * nu + 1);
    r += k * T(np - 4) / T(2 * np) * sgn * inv_f * t.at(np, l);
    r += k / T(np) * sgn * inv_f * t.at(np, l + 1);
    r += k * sgn * T(nu) * inv_f * t.at(np, l);
  }
  return r;
}

/// Builds a(n, l) for n <= n_max from the seeds a(2, l), l = 0..L; row n keeps L - (n - 2)/2 + 1 entries.
template <Scalar T>
SineTable<T> build_sine_table(const std::vector<T>& seed, int n_max, const T& c) {
  detail::require(n_max >= 2 && n_max % 2 == 0, "build_sine_table: n_max must be even and >= 2");
  detail::require(c > 0, "build_sine_table: c must be positive");
  const int L = static_cast<int>(seed.size()) - 1;
  detail::require(L >= (n_max - 2) / 2, "build_sine_table: seed order " + std::to_string(L) +
                                            " too low for n_max = " + std::to_string(n_max));
  SineTable<T> t;
  t.c = c;
  t.n_max = 2;
  t.a.push_back(seed);
  for (int n = 2; n + 2 <= n_max; n += 2) {
    const int rows = t.max_l(n);  // one order consumed
    std::vector<T> next(rows);
    for (int l = 0; l < rows; ++l) next[l] = sine_step(t, n, l);
    t.a.push_back(std::move(next));
    t.n_max = n + 2;
  }
  return t;
}

/// Plain coefficients from sine-action coefficients: L_n = sum (-1)^nu / (2 nu + 1)! alpha0^(nu n') Ltilde_{n'}.
/// Index k holds n = 2k + 2.
template <Scalar T>
std::vector<T> sine_to_monomial(const std::vector<T>& ltilde, const T& alpha0) {
  std::vector<T> out(ltilde.size(), T(0));
  for (std::size_t k = 0; k < ltilde.size(); ++k) {
    const int n = 2 * static_cast<int>(k) + 2;
    for (const auto& [nu, np] : odd_divisor_pairs(n)) {
      const T sgn = (nu % 2 == 0) ? T(1) : T(-1);
      out[k] += sgn / factorial<T>(2 * nu + 1) * pow_int(alpha0, nu * np) * ltilde[level_index(np)];
    }
  }
  return out;
}

/// Ltilde_n = alpha0^(n/2 - 2) a(n) / n, and back.
template <Scalar T>
T a_to_ltilde(const T& a, int n, const T& alpha0) {
  return pow_int(alpha0, n / 2 - 2) * a / T(n);
}

template <Scalar T>
T ltilde_to_a(const T& lt, int n, const T& alpha0) {
  return T(n) * lt / pow_int(alpha0, n / 2 - 2);
}

/// Plain a-system at mu = 0 (f_n = c^((n-2)/2) a_n) from the jet of a(2); row n holds derivatives l.
template <Scalar T>
std::vector<std::vector<T>> plain_a_table(const std::vector<T>& seed, int n_max, const T& c) {
  const auto f = hierarchy_at_point(Jet<T>(seed), n_max);
  std::vector<std::vector<T>> a;
  for (int n = 2; n <= n_max; n += 2) {
    const Jet<T>& j = f[level_index(n)];
    const T scale = pow_int(c, (n - 2) / 2);
    std::vector<T> row(j.order() + 1);
    for (int l = 0; l <= j.order(); ++l) row[l] = j[l] / scale;
    a.push_back(std::move(row));
  }
  return a;
}

/// |a(n, l)| against B_eps(n, l) for n <= n_max, l <= l_max.
template <Scalar T>
BoundReport lemma_bound_check(const std::vector<T>& seed, double eps_prime, double eps, int n_max, int l_max,
                              const T& c) {
  BoundReport rep;
  rep.lemma = "boundedaction";
  rep.params = {{"eps_prime", to_string(eps_prime)}, {"eps", to_string(eps)},   {"n_max", std::to_string(n_max)},
                {"l_max", std::to_string(l_max)},    {"c", to_string(to_double(c))}};
  const SineTable<T> t = build_sine_table(seed, n_max, c);
  for (int n = 2; n <= n_max; n += 2) {
    for (int l = 0; l <= l_max && l <= t.max_l(n); ++l) {
      rep.add_upper(n, l, 0.0, t.at(n, l), log_bound_B(n, l, n == 2 ? eps_prime : eps));
    }
  }
  return rep;
}

/// Partial sums of the coefficient series that enter the inductive estimate, summed over odd m = 2 nu + 1 <= m_max.
struct SineEnvelope {
  double first = 0.0;    // sum_{m >= 3} B(m)^-1 / m!
  double second = 0.0;   // sum_{m >= 3} B(m)^-1 / (m (m - 2)!)
  double fourth = 1.0;   // 1 + sum_{m >= 3} B(m)^-1 / m!
  double sixth = 0.0;    // sum_{m >= 3} nu B(m)^-1 / m!
  double quadratic = 0.0;  // sum_{nu1, nu2 >= 0} (1 + 2 nu1)(1 + 2 nu2)^(5/4) / ((2 nu1)! (2 nu2)!)
};

inline SineEnvelope sine_envelope(int m_max) {
  SineEnvelope e;
  for (int m = 3; m <= m_max; m += 2) {
    const int nu = (m - 1) / 2;
    const double inv_b = std::exp(-PrimeBound(m).log_value());
    const double inv_fact = std::exp(-log_factorial(m));
    e.first += inv_b * inv_fact;
    e.second += inv_b * std::exp(-std::log(m) - log_factorial(m - 2));
    e.fourth += inv_b * inv_fact;
    e.sixth += nu * inv_b * inv_fact;
  }
  for (int n1 = 0; 2 * n1 + 1 <= m_max; ++n1) {
    for (int n2 = 0; 2 * n2 + 1 <= m_max; ++n2) {
      e.quadratic += (1 + 2 * n1) * std::pow(1 + 2 * n2, 1.25) *
                     std::exp(-log_factorial(2 * n1) - log_factorial(2 * n2));
    }
  }
  return e;
}

/// K = 8 / ((1 - 2^-1/4)(1 - 3^-1/4)(1 - 5^-1/2)).
inline double sine_constant_K() {
  return 8.0 / ((1 - std::pow(2.0, -0.25)) * (1 - std::pow(3.0, -0.25)) * (1 - std::pow(5.0, -0.5)));
}

}  // namespace mfrg
