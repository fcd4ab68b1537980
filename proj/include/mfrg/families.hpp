#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "mfrg/errors.hpp"
#include "mfrg/jet.hpp"
#include "mfrg/quadrature.hpp"
#include "mfrg/scalar.hpp"

namespace mfrg {

/// f2 = offset + sign * delta(mu) with d delta / d mu = beta delta^2 and delta(mu_max) = delta_end.
template <Scalar T>
struct BetaFlow {
  T delta_end;
  T beta;
  int sign = -1;
  int offset = 0;
  T mu_max;
};

/// f2 = -delta(mu), delta(mu) = delta0 / (1 - mu beta delta0), beta < 0.
template <Scalar T>
struct ReversedFlow {
  T delta0;
  T beta;
  T mu_max;
};

template <Scalar T>
struct ScaleInvariant {
  T f2;
};

/// f2 solving the two-point Riccati equation for a prescribed f4 with f2(0) = 0.
/// `f4_jet` supplies derivatives of f4 when jets of order >= 1 are requested.
struct RiccatiFromF4 {
  std::function<double(double)> f4;
  std::function<Jet<double>(double, int)> f4_jet;
  double tol = 1e-10;
  double mu_max = 1.0;
};

/// f2(mu) = sum_n a_n x^(n-1) / (1 + x^n), x = n mu.
template <Scalar T>
struct TrivialAnsatz {
  std::vector<T> a;  // a[0] is a_1
  double epsilon = 1e-2;
  double tail_tol = 1e-14;  // <= 0 keeps every coefficient
};

template <Scalar T>
using TwoPointFamily =
    std::variant<BetaFlow<T>, ReversedFlow<T>, ScaleInvariant<T>, RiccatiFromF4, TrivialAnsatz<T>>;

template <Scalar T>
T beta_flow_delta(const BetaFlow<T>& f, const T& mu) {
  return f.delta_end / (T(1) + (f.mu_max - mu) * f.beta * f.delta_end);
}

template <Scalar T>
T reversed_flow_delta(const ReversedFlow<T>& f, const T& mu) {
  return f.delta0 / (T(1) - mu * f.beta * f.delta0);
}

/// Number of ansatz terms kept: stop once the geometric tail 16 (3/4)^(N+1) eps is below tail_tol.
template <Scalar T>
int ansatz_terms(const TrivialAnsatz<T>& f) {
  const int n = static_cast<int>(f.a.size());
  if (f.tail_tol <= 0) return n;
  for (int k = 1; k <= n; ++k) {
    if (16.0 * std::pow(0.75, k + 1) * f.epsilon < f.tail_tol) return k;
  }
  return n;
}

/// Jet of x^(n-1) / (1 + x^n) at x = n mu, as a function of mu.
template <Scalar T>
Jet<T> ansatz_term_jet(int n, const T& mu, int order) {
  const double anchor = to_double(mu);
  const Jet<T> x = T(n) * Jet<T>::variable(mu, order, anchor);
  if constexpr (!is_exact_v<T>) {
    if (x.value() > 1.0) {
      // (1/x) / (1 + x^-n) keeps powers bounded
      const Jet<T> y = reciprocal(x);
      Jet<T> den = power(y, n);
      den.add_constant(T(1));
      return y * reciprocal(den);
    }
  }
  Jet<T> den = power(x, n);
  den.add_constant(T(1));
  return power(x, n - 1) * reciprocal(den);
}

/// Riccati representative with f2(0) = 0, evaluated by nested adaptive quadrature.
inline double riccati_f2(const std::function<double(double)>& f4, double mu, double tol = 1e-10) {
  detail::require(tol > 0, "riccati_f2: tolerance must be positive");
  detail::require(mu >= 0, "riccati_f2: mu must be nonnegative");
  if (mu == 0.0) return 0.0;
  auto exponent = [&](double s) {
    if (s == 0.0) return 0.0;
    return quad::integrate([&](double t) { return 6.0 * f4(t) + 1.0; }, 0.0, s, tol * 0.1,
                           "riccati exponent");
  };
  const double e_mu = std::exp(exponent(mu));
  const double inner =
      quad::integrate([&](double s) { return std::exp(exponent(s)); }, 0.0, mu, tol, "riccati denominator");
  const double f40 = f4(0.0);
  return 3.0 * f40 * e_mu / (1.0 + 3.0 * f40 * inner) - 3.0 * f4(mu);
}

namespace detail {

inline void check_range(double mu, double mu_max, const char* who) {
  if (!(mu >= 0.0) || mu > mu_max * (1 + 1e-15)) {
    throw UsageError(std::string(who) + ": mu = " + mfrg::to_string(mu) + " outside [0, " +
                     mfrg::to_string(mu_max) + "]");
  }
}

}  // namespace detail

/// Jet of f2 at mu for any family.
template <Scalar T>
Jet<T> family_jet(const TwoPointFamily<T>& fam, const T& mu, int order) {
  detail::require(order >= 0, "family_jet: negative order");
  const double anchor = to_double(mu);
  return std::visit(
      [&](const auto& f) -> Jet<T> {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, BetaFlow<T>>) {
          detail::check_range(anchor, to_double(f.mu_max), "BetaFlow");
          detail::require(f.sign == 1 || f.sign == -1, "BetaFlow: sign must be +1 or -1");
          detail::require(f.offset == 0 || f.offset == 1, "BetaFlow: offset must be 0 or 1");
          Jet<T> d = delta_family_jet(beta_flow_delta(f, mu), f.beta, order, anchor);
          d *= T(f.sign);
          d.add_constant(T(f.offset));
          return d;
        } else if constexpr (std::is_same_v<F, ReversedFlow<T>>) {
          detail::check_range(anchor, to_double(f.mu_max), "ReversedFlow");
          detail::require(f.beta < 0, "ReversedFlow: beta must be negative");
          return -delta_family_jet(reversed_flow_delta(f, mu), f.beta, order, anchor);
        } else if constexpr (std::is_same_v<F, ScaleInvariant<T>>) {
          detail::require(anchor >= 0, "ScaleInvariant: mu must be nonnegative");
          return Jet<T>::constant(f.f2, order, anchor);
        } else if constexpr (std::is_same_v<F, RiccatiFromF4>) {
          if constexpr (is_exact_v<T>) {
            throw UsageError("RiccatiFromF4 is available in the float backend only");
          } else {
            detail::check_range(anchor, f.mu_max, "RiccatiFromF4");
            std::vector<double> d(order + 1, 0.0);
            d[0] = riccati_f2(f.f4, mu, f.tol);
            if (order == 0) return Jet<double>(d, anchor);
            detail::require(static_cast<bool>(f.f4_jet), "RiccatiFromF4: derivatives need f4_jet");
            const Jet<double> f4 = f.f4_jet(mu, order);
            // d f2 = 3 f4 - f2^2 + f2, solved order by order
            for (int l = 0; l < order; ++l) {
              double sq = 0.0;
              for (int k = 0; k <= l; ++k) sq += binomial<double>(l, k) * d[k] * d[l - k];
              d[l + 1] = 3.0 * f4[l] - sq + d[l];
            }
            return Jet<double>(d, anchor);
          }
        } else {
          detail::require(anchor >= 0, "TrivialAnsatz: mu must be nonnegative");
          Jet<T> sum = Jet<T>::zero(order, anchor);
          const int terms = ansatz_terms(f);
          for (int n = 1; n <= terms; ++n) {
            if (is_zero(f.a[n - 1])) continue;
            sum += f.a[n - 1] * ansatz_term_jet(n, mu, order);
          }
          return sum;
        }
      },
      fam);
}

/// Upper end of the mu range a family is defined on (infinite if unbounded).
template <Scalar T>
double family_mu_max(const TwoPointFamily<T>& fam) {
  return std::visit(
      [](const auto& f) -> double {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, BetaFlow<T>> || std::is_same_v<F, ReversedFlow<T>>) {
          return to_double(f.mu_max);
        } else if constexpr (std::is_same_v<F, RiccatiFromF4>) {
          return f.mu_max;
        } else {
          return std::numeric_limits<double>::infinity();
        }
      },
      fam);
}

template <Scalar T>
std::string family_name(const TwoPointFamily<T>& fam) {
  static const char* names[] = {"beta", "reversed", "constant", "riccati", "ansatz"};
  return names[fam.index()];
}

}  // namespace mfrg
