#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mfrg/errors.hpp"
#include "mfrg/families.hpp"
#include "mfrg/hierarchy.hpp"
#include "mfrg/report.hpp"
#include "mfrg/scalar.hpp"

namespace mfrg {

/// Taylor coefficients at mu = 0 of f_2 = sum f_{2,k} mu^k and g_n = sum g_{n,k} mu^k, f_n = mu^(n/2-2) g_n.
template <Scalar T>
struct TrivialCoeffs {
  T f20;
  T g40;
  double epsilon = 1e-2;
  std::vector<T> f2k;
  std::map<std::pair<int, int>, T> g;

  bool has_g(int n, int k) const { return g.count({n, k}) != 0; }

  const T& g_at(int n, int k) const {
    auto it = g.find({n, k});
    detail::require(it != g.end(), "TrivialCoeffs: g(" + std::to_string(n) + ", " + std::to_string(k) + ") missing");
    return it->second;
  }
  const T& f2_at(int k) const {
    detail::require(k >= 0 && k < static_cast<int>(f2k.size()),
                    "TrivialCoeffs: f2(" + std::to_string(k) + ") missing");
    return f2k[k];
  }
};

namespace detail {

// sum over n1 + n2 = n + 2, n_i >= 4, of g_{n1,k1} g_{n2,k2} summed over k1 + k2 = k
template <Scalar T>
T g_convolution(const TrivialCoeffs<T>& c, int n, int k) {
  T s(0);
  for (int n1 = 4; n1 <= n - 2; n1 += 2) {
    const int n2 = n + 2 - n1;
    for (int nu = 0; nu <= k; ++nu) s += c.g_at(n1, nu) * c.g_at(n2, k - nu);
  }
  return s;
}

template <Scalar T>
T g0_from_regularity(const TrivialCoeffs<T>& c, int n) {
  return -T(n) / T(n - 4) * g_convolution(c, n, 0);
}

template <Scalar T>
T g1_from_regularity(const TrivialCoeffs<T>& c, int n) {
  const T rest = g_convolution(c, n, 1) + c.g_at(n, 0) * (T(2) * c.f20 + T(1) - T(4) / T(n));
  return -T(n) / T(n - 2) * rest;
}

}  // namespace detail

/// g_{n,0}, g_{n,1} for 4 <= n <= n_max from the two regularity relations at mu = 0.
template <Scalar T>
TrivialCoeffs<T> seed_g(int n_max, const T& f20, const T& g40, double epsilon = 1e-2) {
  detail::require(n_max >= 4 && n_max % 2 == 0, "seed_g: n_max must be even and >= 4");
  TrivialCoeffs<T> c;
  c.f20 = f20;
  c.g40 = g40;
  c.epsilon = epsilon;
  c.f2k = {f20};
  c.g[{4, 0}] = g40;
  for (int n = 6; n <= n_max; n += 2) c.g[{n, 0}] = detail::g0_from_regularity(c, n);
  for (int n = 4; n <= n_max; n += 2) c.g[{n, 1}] = detail::g1_from_regularity(c, n);
  return c;
}

/// n = 2: f_{2,k+1}; n >= 4: g_{n,k+2}.
template <Scalar T>
T taylor_step(const TrivialCoeffs<T>& c, int n, int k) {
  detail::require(k >= 0 && n >= 2 && n % 2 == 0, "taylor_step: need even n >= 2 and k >= 0");
  if (n == 2) {
    T s(0);
    for (int nu = 0; nu <= k; ++nu) s += c.f2_at(nu) * c.f2_at(k - nu);
    return (T(3) * c.g_at(4, k) + c.f2_at(k) - s) / T(k + 1);
  }
  const T d = T(n + 2 * k);
  T fsum(0);
  for (int nu = 0; nu <= k + 1; ++nu) fsum += c.g_at(n, nu) * c.f2_at(k + 1 - nu);
  return -T(n - 4) / d * c.g_at(n, k + 1) - T(2 * n) / d * fsum - T(n) / d * detail::g_convolution(c, n, k + 2) +
         T(n * (n + 1)) / d * c.g_at(n + 2, k);
}

/// Full triangle n/2 + k <= weight_max, plus f_{2,k} for k < weight_max.
template <Scalar T>
TrivialCoeffs<T> build_trivial_coeffs(const T& f20, const T& g40, int weight_max, double epsilon = 1e-2) {
  detail::require(weight_max >= 2, "build_trivial_coeffs: weight_max must be >= 2");
  TrivialCoeffs<T> c;
  c.f20 = f20;
  c.g40 = g40;
  c.epsilon = epsilon;
  c.f2k = {f20};
  for (int w = 2; w <= weight_max; ++w) {
    for (int n = 4; n <= 2 * w; n += 2) {
      const int k = w - n / 2;
      T v;
      if (k == 0)
        v = (n == 4) ? g40 : detail::g0_from_regularity(c, n);
      else if (k == 1)
        v = detail::g1_from_regularity(c, n);
      else
        v = taylor_step(c, n, k - 2);
      c.g[{n, k}] = std::move(v);
    }
    c.f2k.push_back(taylor_step(c, 2, w - 2));
  }
  return c;
}

/// Vanishing of d^l f_n(0) for n >= 6, l <= n/2 - 3, at the table point mu = 0.
template <Scalar T>
BoundReport check_nullin(const FlowTable<T>& table, double tol = 0.0) {
  BoundReport rep;
  rep.lemma = "nullin";
  rep.params = {{"n_max", std::to_string(table.n_max)}, {"tol", to_string(tol)}};
  std::size_t i0 = table.mu_grid.size();
  for (std::size_t i = 0; i < table.mu_grid.size(); ++i)
    if (is_zero(table.mu_grid[i])) i0 = i;
  detail::require(i0 < table.mu_grid.size(), "check_nullin: grid must contain mu = 0");
  for (int n = 6; n <= table.n_max; n += 2) {
    const Jet<T>& j = table.at(n, i0);
    double scale = 0.0;
    for (int l = 0; l <= j.order(); ++l) scale = std::max(scale, std::fabs(to_double(j[l])));
    for (int l = 0; l <= n / 2 - 3 && l <= j.order(); ++l)
      rep.add_upper(n, l, 0.0, j[l], std::log(tol * std::max(scale, 1.0)));
  }
  return rep;
}

/// Triangular inversion of f_{2,k} = sum_{n rho = k+1} a_n (-1)^(rho-1) n^k; a[i] holds a_{i+1}.
template <Scalar T>
std::vector<T> solve_ansatz_coeffs(const std::vector<T>& f2k) {
  std::vector<T> a(f2k.size(), T(0));
  for (int k = 0; k < static_cast<int>(f2k.size()); ++k) {
    const int m = k + 1;
    T v = f2k[k] / pow_int(T(m), k);
    for (int rho = 2; rho <= m; ++rho) {
      if (m % rho != 0) continue;
      const T sgn = (rho % 2 == 0) ? T(-1) : T(1);  // (-1)^(rho - 1)
      v -= a[m / rho - 1] * sgn / pow_int(T(rho), k);
    }
    a[k] = v;
  }
  return a;
}

/// Taylor coefficients f_{2,k}, k < count, of the ansatz with coefficients a.
template <Scalar T>
std::vector<T> ansatz_taylor(const std::vector<T>& a, int count) {
  std::vector<T> f(count, T(0));
  for (int n = 1; n <= static_cast<int>(a.size()); ++n)
    for (int rho = 1; n * rho - 1 < count; ++rho) {
      const int k = n * rho - 1;
      const T sgn = (rho % 2 == 1) ? T(1) : T(-1);
      f[k] += sgn * a[n - 1] * pow_int(T(n), k);
    }
  return f;
}

/// Seeds to ansatz family with n_coeffs terms.
template <Scalar T>
TrivialAnsatz<T> trivial_family(const TrivialCoeffs<T>& c, int n_coeffs, double tail_tol = 1e-14) {
  detail::require(n_coeffs >= 1 && n_coeffs <= static_cast<int>(c.f2k.size()),
                  "trivial_family: need f_{2,k} for k < " + std::to_string(n_coeffs));
  const std::vector<T> f(c.f2k.begin(), c.f2k.begin() + n_coeffs);
  return TrivialAnsatz<T>{solve_ansatz_coeffs(f), c.epsilon, tail_tol};
}

/// g0g1 bound: |g_{n,0}| <= eps^(n/2-1) / (2 n^2), |g_{n,1}| <= eps^(n/2-1) / n^2 for 6 <= n <= n_max.
template <Scalar T>
BoundReport g0g1_report(const TrivialCoeffs<T>& c, int n_max) {
  BoundReport rep;
  rep.lemma = "g0g1";
  const double le = std::log(c.epsilon);
  rep.params = {{"epsilon", to_string(c.epsilon)}, {"n_max", std::to_string(n_max)}};
  for (int n = 6; n <= n_max; n += 2) {
    const double ln2 = 2 * std::log(double(n));
    if (c.has_g(n, 0)) rep.add_upper(n, 0, 0.0, c.g_at(n, 0), (n / 2 - 1) * le - std::log(2.0) - ln2);
    if (c.has_g(n, 1)) rep.add_upper(n, 1, 0.0, c.g_at(n, 1), (n / 2 - 1) * le - ln2);
  }
  return rep;
}

/// gnk bound for n + k <= nk_max: |g_{n,k}| <= 2^(k-2) eps^(n/2-1) (k+(n-4)/2)!; n = 2 records are
/// |f_{2,k}| <= 2^k eps |k-1|!.
template <Scalar T>
BoundReport gnk_report(const TrivialCoeffs<T>& c, int nk_max) {
  BoundReport rep;
  rep.lemma = "gnk";
  const double le = std::log(c.epsilon);
  rep.params = {{"epsilon", to_string(c.epsilon)}, {"nk_max", std::to_string(nk_max)}};
  for (int k = 0; k + 2 <= nk_max && k < static_cast<int>(c.f2k.size()); ++k)
    rep.add_upper(2, k, 0.0, c.f2k[k], k * std::log(2.0) + le + log_factorial(std::abs(k - 1)));
  for (int n = 4; n <= nk_max; n += 2)
    for (int k = 0; n + k <= nk_max; ++k)
      if (c.has_g(n, k))
        rep.add_upper(n, k, 0.0, c.g_at(n, k), (k - 2) * std::log(2.0) + (n / 2 - 1) * le + log_factorial(k + (n - 4) / 2));
  return rep;
}

/// Sign pattern g_{n,0} = (-1)^(n/2) |g_{n,0}| for 6 <= n <= n_max.
template <Scalar T>
BoundReport sign_alternation_report(const TrivialCoeffs<T>& c, int n_max) {
  BoundReport rep;
  rep.lemma = "g0sign";
  rep.params = {{"n_max", std::to_string(n_max)}};
  for (int n = 4; n <= n_max; n += 2) {
    const T v = c.g_at(n, 0);
    rep.add_positive(n, 0, 0.0, (n / 2) % 2 == 0 ? v : T(-v), "sign");
  }
  return rep;
}

/// |a_n| <= 4 (3/4)^n eps.
template <Scalar T>
BoundReport trivex_report(const std::vector<T>& a, double epsilon) {
  BoundReport rep;
  rep.lemma = "trivex";
  rep.params = {{"epsilon", to_string(epsilon)}, {"n_max", std::to_string(a.size())}};
  for (int n = 1; n <= static_cast<int>(a.size()); ++n)
    rep.add_upper(n, 0, 0.0, a[n - 1], std::log(4.0) + n * std::log(0.75) + std::log(epsilon));
  return rep;
}

/// Pole of g(lambda) = g0 / (1 - beta g0 lambda); empty when g0 beta <= 0.
inline std::optional<double> landau_pole(double g0, double beta) {
  if (!(g0 * beta > 0)) return std::nullopt;
  return 1.0 / (beta * g0);
}

inline double landau_coupling(double g0, double beta, double lambda) {
  const double d = 1.0 - beta * g0 * lambda;
  if (d == 0.0) throw NumericError("landau_coupling: lambda sits on the pole");
  return g0 / d;
}

}  // namespace mfrg
