#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mfrg/errors.hpp"
#include "mfrg/scalar.hpp"

namespace mfrg {

/// Truncated list of raw derivatives d^l f / d mu^l, l = 0..order, at a single
/// anchor point mu. Entries are raw derivatives (not Taylor coefficients).
template <Scalar T>
class Jet {
 public:
  Jet() : derivs_(1, T(0)) {}

  explicit Jet(std::vector<T> derivs, double anchor_mu = 0.0)
      : derivs_(std::move(derivs)), anchor_(anchor_mu) {
    detail::require(!derivs_.empty(), "Jet: needs at least the value entry");
  }

  static Jet constant(const T& value, int order, double anchor_mu = 0.0) {
    check_order(order);
    std::vector<T> d(order + 1, T(0));
    d[0] = value;
    return Jet(std::move(d), anchor_mu);
  }

  static Jet zero(int order, double anchor_mu = 0.0) { return constant(T(0), order, anchor_mu); }

  /// The jet of f(mu) = mu evaluated at `mu`.
  static Jet variable(const T& mu, int order, double anchor_mu) {
    Jet j = constant(mu, order, anchor_mu);
    if (order >= 1) j.derivs_[1] = T(1);
    return j;
  }

  static Jet from_taylor(const std::vector<T>& coeffs, double anchor_mu = 0.0) {
    std::vector<T> d(coeffs.size());
    T fact(1);
    for (std::size_t l = 0; l < coeffs.size(); ++l) {
      if (l > 0) fact *= T(static_cast<long>(l));
      d[l] = coeffs[l] * fact;
    }
    return Jet(std::move(d), anchor_mu);
  }

  int order() const { return static_cast<int>(derivs_.size()) - 1; }
  double anchor() const { return anchor_; }
  const T& value() const { return derivs_[0]; }
  const T& operator[](int l) const { return derivs_.at(static_cast<std::size_t>(l)); }
  std::span<const T> derivs() const { return derivs_; }

  std::vector<T> taylor() const {
    std::vector<T> c(derivs_.size());
    T fact(1);
    for (std::size_t l = 0; l < derivs_.size(); ++l) {
      if (l > 0) fact *= T(static_cast<long>(l));
      c[l] = derivs_[l] / fact;
    }
    return c;
  }

  Jet truncated(int new_order) const {
    detail::require(new_order >= 0 && new_order <= order(),
                    "Jet::truncated: order " + std::to_string(new_order) + " outside [0, " +
                        std::to_string(order()) + "]");
    return Jet(std::vector<T>(derivs_.begin(), derivs_.begin() + new_order + 1), anchor_);
  }

  /// d/dmu: drops the value and lowers the order by one.
  Jet shifted() const {
    detail::require(order() >= 1, "jet_shift: order-0 jet has no derivative information");
    return Jet(std::vector<T>(derivs_.begin() + 1, derivs_.end()), anchor_);
  }

  bool all_finite() const {
    return std::all_of(derivs_.begin(), derivs_.end(), [](const T& x) { return is_finite(x); });
  }

  void check_compatible(const Jet& other, const char* op) const {
    if (order() != other.order() || anchor_ != other.anchor_) {
      throw UsageError(std::string(op) + ": jets differ (order " + std::to_string(order()) + " vs " +
                       std::to_string(other.order()) + ", anchor " + mfrg::to_string(anchor_) +
                       " vs " + mfrg::to_string(other.anchor_) + ")");
    }
  }

  Jet& operator+=(const Jet& b) {
    check_compatible(b, "jet_add");
    for (std::size_t l = 0; l < derivs_.size(); ++l) derivs_[l] += b.derivs_[l];
    return *this;
  }

  Jet& operator-=(const Jet& b) {
    check_compatible(b, "jet_sub");
    for (std::size_t l = 0; l < derivs_.size(); ++l) derivs_[l] -= b.derivs_[l];
    return *this;
  }

  Jet& operator*=(const T& s) {
    for (auto& d : derivs_) d *= s;
    return *this;
  }

  Jet& add_constant(const T& s) {
    derivs_[0] += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (auto& d : a.derivs_) d = -d;
    return a;
  }
  friend Jet operator*(Jet a, const T& s) { return a *= s; }
  friend Jet operator*(const T& s, Jet a) { return a *= s; }

  /// Leibniz product.
  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check_compatible(b, "jet_mul");
    const int order = a.order();
    std::vector<T> d(order + 1, T(0));
    for (int l = 0; l <= order; ++l) {
      T acc(0);
      for (int k = 0; k <= l; ++k) {
        if (is_zero(a.derivs_[k]) || is_zero(b.derivs_[l - k])) continue;
        acc += binomial<T>(l, k) * a.derivs_[k] * b.derivs_[l - k];
      }
      d[l] = std::move(acc);
    }
    return Jet(std::move(d), a.anchor_);
  }

  friend bool operator==(const Jet& a, const Jet& b) {
    return a.anchor_ == b.anchor_ && a.derivs_ == b.derivs_;
  }

 private:
  static void check_order(int order) { detail::require(order >= 0, "Jet: negative order"); }

  std::vector<T> derivs_;
  double anchor_ = 0.0;
};

template <Scalar T>
Jet<T> jet_add(const Jet<T>& a, const Jet<T>& b) {
  return a + b;
}

template <Scalar T>
Jet<T> jet_mul(const Jet<T>& a, const Jet<T>& b) {
  return a * b;
}

template <Scalar T>
Jet<T> jet_shift(const Jet<T>& a) {
  return a.shifted();
}

/// Truncates both jets to their common order.
template <Scalar T>
std::pair<Jet<T>, Jet<T>> common_order(const Jet<T>& a, const Jet<T>& b) {
  const int o = std::min(a.order(), b.order());
  return {a.truncated(o), b.truncated(o)};
}

/// 1/a via the reciprocal recursion; a.value() must be nonzero.
template <Scalar T>
Jet<T> reciprocal(const Jet<T>& a) {
  if (is_zero(a.value())) throw NumericError("reciprocal: jet has zero constant term");
  const int order = a.order();
  std::vector<T> y(order + 1, T(0));
  const T inv0 = T(1) / a.value();
  y[0] = inv0;
  for (int l = 1; l <= order; ++l) {
    T acc(0);
    for (int k = 1; k <= l; ++k) acc += binomial<T>(l, k) * a[k] * y[l - k];
    y[l] = -acc * inv0;
  }
  return Jet<T>(std::move(y), a.anchor());
}

template <Scalar T>
Jet<T> power(const Jet<T>& a, int k) {
  detail::require(k >= 0, "power: negative exponent");
  Jet<T> result = Jet<T>::constant(T(1), a.order(), a.anchor());
  Jet<T> base = a;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

/// exp(a) from y' = a' y.
inline Jet<double> exp(const Jet<double>& a) {
  const int order = a.order();
  std::vector<double> y(order + 1, 0.0);
  y[0] = std::exp(a.value());
  for (int l = 0; l < order; ++l) {
    double acc = 0.0;
    for (int k = 0; k <= l; ++k) acc += binomial<double>(l, k) * a[k + 1] * y[l - k];
    y[l + 1] = acc;
  }
  return Jet<double>(std::move(y), a.anchor());
}

/// Jet of delta(mu) for the flow d delta / d mu = beta delta^2:
/// d^l delta = beta^l delta^(l+1) l!.
template <Scalar T>
Jet<T> delta_family_jet(const T& delta_at_mu, const T& beta, int order, double anchor_mu = 0.0) {
  detail::require(delta_at_mu > 0, "delta_family_jet: delta must be positive");
  detail::require(order >= 0, "delta_family_jet: negative order");
  std::vector<T> d(order + 1);
  T term = delta_at_mu;  // beta^l delta^(l+1) l!
  d[0] = term;
  for (int l = 1; l <= order; ++l) {
    term = term * beta * delta_at_mu * T(l);
    d[l] = term;
  }
  return Jet<T>(std::move(d), anchor_mu);
}

/// Jet of delta(mu)^N for the same flow: d^l delta^N = beta^l delta^(N+l) (N+l-1)!/(N-1)!.
template <Scalar T>
Jet<T> delta_power_jet(const T& delta_at_mu, const T& beta, int power_n, int order,
                       double anchor_mu = 0.0) {
  detail::require(power_n >= 0 && order >= 0, "delta_power_jet: negative argument");
  std::vector<T> d(order + 1);
  T term = pow_int(delta_at_mu, power_n);
  d[0] = term;
  for (int l = 1; l <= order; ++l) {
    term = term * beta * delta_at_mu * T(power_n + l - 1);
    d[l] = term;
  }
  return Jet<T>(std::move(d), anchor_mu);
}

/// Jet of gamma(mu) = exp(-mu): d^l = (-1)^l exp(-mu).
inline Jet<double> exp_neg_mu_jet(double mu, int order) {
  detail::require(mu >= 0, "exp_neg_mu_jet: mu must be nonnegative");
  detail::require(order >= 0, "exp_neg_mu_jet: negative order");
  std::vector<double> d(order + 1);
  const double v = std::exp(-mu);
  for (int l = 0; l <= order; ++l) d[l] = (l % 2 == 0) ? v : -v;
  return Jet<double>(std::move(d), mu);
}

}  // namespace mfrg
