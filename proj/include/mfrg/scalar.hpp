#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <type_traits>

#include "mfrg/errors.hpp"

namespace mfrg {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;

/// Value types the flow machinery is instantiated with: exact rationals for
/// identities and exact-zero assertions, doubles for grid sweeps.
template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

template <class T>
inline constexpr bool is_exact_v = std::same_as<T, Rational>;

/// Loop constant 1/(16 pi^2) of the propagator-derivative integral at alpha = 1, m = 0.
inline constexpr double kLoopConstant = 1.0 / (16.0 * std::numbers::pi * std::numbers::pi);

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

template <Scalar T>
T from_int(std::int64_t v) {
  return T(v);
}

template <Scalar T>
T ratio(std::int64_t num, std::int64_t den) {
  if constexpr (is_exact_v<T>) {
    return Rational(num, den);
  } else {
    return static_cast<double>(num) / static_cast<double>(den);
  }
}

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Rational&) { return true; }

inline double abs_value(double x) { return std::fabs(x); }
inline Rational abs_value(const Rational& x) { return boost::multiprecision::abs(x); }

inline int sign_of(double x) { return (x > 0) - (x < 0); }
inline int sign_of(const Rational& x) { return x.sign(); }

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Rational& x) { return x.is_zero(); }

/// Natural log of |x|; -inf for zero. Rationals far outside double range are
/// handled through mantissa/exponent splits of numerator and denominator.
inline double log_abs(double x) { return std::log(std::fabs(x)); }

inline double log_abs(const Rational& x) {
  if (x.is_zero()) return -std::numeric_limits<double>::infinity();
  const mpq_t& q = x.backend().data();
  long en = 0;
  long ed = 0;
  const double mn = mpz_get_d_2exp(&en, mpq_numref(q));
  const double md = mpz_get_d_2exp(&ed, mpq_denref(q));
  return std::log(std::fabs(mn)) - std::log(md) +
         static_cast<double>(en - ed) * std::numbers::ln2;
}

template <Scalar T>
T pow_int(const T& x, int k) {
  if (k < 0) return T(1) / pow_int(x, -k);
  T result(1);
  T base = x;
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

namespace detail {

inline constexpr int kBinomialRows = 67;  // C(66, 33) < 2^63

struct BinomialTable {
  std::array<std::array<std::uint64_t, kBinomialRows>, kBinomialRows> c{};
  constexpr BinomialTable() {
    for (int n = 0; n < kBinomialRows; ++n) {
      c[n][0] = 1;
      for (int k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + (k < n ? c[n - 1][k] : 0);
    }
  }
};

inline const BinomialTable& binomial_table() {
  static constexpr BinomialTable table;
  return table;
}

}  // namespace detail

/// Binomial coefficient C(n, k) as an exact integer.
inline Integer binomial_int(int n, int k) {
  if (k < 0 || n < 0 || k > n) return Integer(0);
  if (n < detail::kBinomialRows) return Integer(detail::binomial_table().c[n][k]);
  Integer r(1);
  k = std::min(k, n - k);
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

template <Scalar T>
T binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return T(0);
  if (n < detail::kBinomialRows) {
    const auto v = detail::binomial_table().c[n][k];
    if constexpr (is_exact_v<T>) {
      return Rational(Integer(v));
    } else {
      return static_cast<double>(v);
    }
  }
  if constexpr (is_exact_v<T>) {
    return Rational(binomial_int(n, k));
  } else {
    return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
  }
}

inline Integer factorial_int(int n) {
  Integer r(1);
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

template <Scalar T>
T factorial(int n) {
  if constexpr (is_exact_v<T>) {
    return Rational(factorial_int(n));
  } else {
    return std::tgamma(n + 1.0);
  }
}

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

/// (n + l)! / n! = n+1 ... n+l
template <Scalar T>
T rising_ratio(int n, int l) {
  T r(1);
  for (int i = 1; i <= l; ++i) r *= T(n + i);
  return r;
}

inline std::string to_string(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

/// Exact "num/den" form (plain integer when the denominator is one).
inline std::string to_string(const Rational& x) { return x.str(); }

}  // namespace mfrg
