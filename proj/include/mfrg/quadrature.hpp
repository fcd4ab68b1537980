#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "mfrg/errors.hpp"

namespace mfrg::quad {

struct Tolerance {
  double rel = 1e-10;
  double abs = 1e-300;
  int max_intervals = 4000;
  double rel_l1 = 0.0;  // also accept err_k <= rel_l1 * integral of |f_k|
};

namespace detail {

struct Panel {
  double a;
  double b;
  std::vector<double> value;
  std::vector<double> error;
  std::vector<double> l1;
  double worst;
  bool operator<(const Panel& o) const { return worst < o.worst; }
};

template <class F>
Panel gk21(F& f, double a, double b, std::size_t dim) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const auto& xk = gauss_kronrod<double, 21>::abscissa();
  const auto& wk = gauss_kronrod<double, 21>::weights();
  const auto& wg = gauss<double, 10>::weights();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  std::vector<double> kr(dim, 0.0), ga(dim, 0.0), ka(dim, 0.0);
  const std::vector<double> f0 = f(mid);
  for (std::size_t k = 0; k < dim; ++k) {
    kr[k] = wk[0] * f0[k];
    ka[k] = wk[0] * std::fabs(f0[k]);
  }
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const std::vector<double> fp = f(mid + half * xk[i]);
    const std::vector<double> fm = f(mid - half * xk[i]);
    for (std::size_t k = 0; k < dim; ++k) {
      const double s = fp[k] + fm[k];
      kr[k] += wk[i] * s;
      ka[k] += wk[i] * (std::fabs(fp[k]) + std::fabs(fm[k]));
      if (i % 2 == 1) ga[k] += wg[i / 2] * s;
    }
  }
  Panel p{a, b, std::vector<double>(dim), std::vector<double>(dim), std::vector<double>(dim), 0.0};
  for (std::size_t k = 0; k < dim; ++k) {
    p.value[k] = half * kr[k];
    p.l1[k] = std::fabs(half) * ka[k];
    p.error[k] = std::max(std::fabs(half * (kr[k] - ga[k])),
                          4.0 * std::numeric_limits<double>::epsilon() * std::fabs(p.value[k]));
  }
  return p;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (21-point rule) for a vector-valued integrand on [a, b].
/// Converged when every component satisfies err_k <= max(abs, rel |I_k|, rel_l1 |f_k|_1).
template <class F>
std::vector<double> integrate_vector(F&& f, double a, double b, std::size_t dim, const Tolerance& tol,
                                     const std::string& what = "vector integral") {
  std::priority_queue<detail::Panel> heap;
  std::vector<double> total(dim, 0.0), total_err(dim, 0.0), total_l1(dim, 0.0);
  auto target = [&](std::size_t k) {
    return std::max({tol.abs, tol.rel * std::fabs(total[k]), tol.rel_l1 * total_l1[k]});
  };
  auto score = [&](detail::Panel& p) {
    double w = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      w = std::max(w, p.error[k] / target(k));
    }
    p.worst = w;
  };
  auto add = [&](detail::Panel p, int sign) {
    for (std::size_t k = 0; k < dim; ++k) {
      total[k] += sign * p.value[k];
      total_err[k] += sign * p.error[k];
      total_l1[k] += sign * p.l1[k];
    }
    if (sign > 0) heap.push(std::move(p));
  };
  add(detail::gk21(f, a, b, dim), +1);
  int intervals = 1;
  while (true) {
    bool done = true;
    for (std::size_t k = 0; k < dim; ++k) {
      if (!std::isfinite(total[k])) throw NumericError(what + ": non-finite integrand");
      if (total_err[k] > target(k)) done = false;
    }
    if (done) return total;
    if (intervals >= tol.max_intervals) {
      throw NumericError(what + ": adaptive quadrature exceeded " + std::to_string(tol.max_intervals) +
                         " panels");
    }
    // Scores depend on the running total, so refresh them before picking a panel.
    std::vector<detail::Panel> panels;
    while (!heap.empty()) {
      panels.push_back(heap.top());
      heap.pop();
    }
    for (auto& p : panels) score(p);
    for (auto& p : panels) heap.push(std::move(p));
    detail::Panel worst = heap.top();
    heap.pop();
    for (std::size_t k = 0; k < dim; ++k) {
      total[k] -= worst.value[k];
      total_err[k] -= worst.error[k];
      total_l1[k] -= worst.l1[k];
    }
    const double m = 0.5 * (worst.a + worst.b);
    add(detail::gk21(f, worst.a, m, dim), +1);
    add(detail::gk21(f, m, worst.b, dim), +1);
    ++intervals;
  }
}

/// Same on [0, inf) through t = s / (1 - s).
template <class F>
std::vector<double> integrate_vector_half_line(F&& f, std::size_t dim, const Tolerance& tol,
                                               const std::string& what = "vector integral") {
  auto mapped = [&](double s) {
    if (s >= 1.0) return std::vector<double>(dim, 0.0);
    const double t = s / (1.0 - s);
    const double jac = 1.0 / ((1.0 - s) * (1.0 - s));
    std::vector<double> v = f(t);
    for (auto& x : v) x *= jac;
    return v;
  };
  return integrate_vector(mapped, 0.0, 1.0, dim, tol, what);
}

/// Scalar adaptive integral on [a, b] (b may be +inf) to relative tolerance tol.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-10, const std::string& what = "integral") {
  const Tolerance t{std::max(tol, 1e-15), 1e-300, 4000, 0.0};
  auto vf = [&](double x) { return std::vector<double>{f(x)}; };
  if (std::isinf(b)) {
    return integrate_vector_half_line([&](double x) { return vf(a + x); }, 1, t, what)[0];
  }
  return integrate_vector(vf, a, b, 1, t, what)[0];
}

}  // namespace mfrg::quad
