#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "mfrg/errors.hpp"
#include "mfrg/families.hpp"
#include "mfrg/jet.hpp"
#include "mfrg/scalar.hpp"

namespace mfrg {

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware concurrency).
/// The first exception thrown by any worker is rethrown on the caller's thread.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline int level_index(int n) { return n / 2 - 1; }

/// f4 = f2 (f2 - 1) / 3 + (d f2) / 3, one order below f2.
template <Scalar T>
Jet<T> f4_from_f2(const Jet<T>& f2) {
  detail::require(f2.order() >= 1, "f4_from_f2: f2 jet needs order >= 1");
  const int o = f2.order() - 1;
  Jet<T> f2m1 = f2;
  f2m1.add_constant(T(-1));
  Jet<T> f4 = (f2 * f2m1).truncated(o) + f2.shifted();
  f4 *= T(1) / T(3);
  return f4;
}

/// f_{n+2} from f_2, ..., f_n at one point; f[k] holds f_{2k+2}.
template <Scalar T>
Jet<T> fn_step(int n, const std::vector<Jet<T>>& f) {
  detail::require(n >= 4 && n % 2 == 0, "fn_step: n must be even and >= 4");
  detail::require(static_cast<int>(f.size()) > level_index(n), "fn_step: f_n not available");
  const Jet<T>& fn = f[level_index(n)];
  detail::require(fn.order() >= 1, "fn_step: f_" + std::to_string(n) + " jet has order 0, no derivative left");
  const int o = fn.order() - 1;
  detail::require(f[0].order() >= o, "fn_step: f_2 jet order too low");

  Jet<T> sum = Jet<T>::zero(o, fn.anchor());
  for (int n1 = 4; n1 <= n - 2; n1 += 2) {
    const int n2 = n + 2 - n1;
    sum += f[level_index(n1)].truncated(o) * f[level_index(n2)].truncated(o);
  }
  Jet<T> bracket = T(2) * f[0].truncated(o);
  bracket.add_constant(T(1) - T(4) / T(n));
  sum += fn.truncated(o) * bracket;
  sum *= T(1) / T(n + 1);
  sum += (T(2) / T(n * (n + 1))) * fn.shifted();
  return sum;
}

/// All f_n, n = 2..n_max, at one point from an f2 jet of order >= (n_max - 2) / 2.
template <Scalar T>
std::vector<Jet<T>> hierarchy_at_point(const Jet<T>& f2, int n_max) {
  detail::require(n_max >= 2 && n_max % 2 == 0, "hierarchy: n_max must be even and >= 2");
  detail::require(f2.order() >= (n_max - 2) / 2,
                  "hierarchy: f2 jet of order " + std::to_string(f2.order()) + " cannot reach n = " +
                      std::to_string(n_max));
  std::vector<Jet<T>> f;
  f.reserve(level_index(n_max) + 1);
  f.push_back(f2);
  if (n_max >= 4) f.push_back(f4_from_f2(f2));
  for (int n = 4; n + 2 <= n_max; n += 2) f.push_back(fn_step(n, f));
  return f;
}

/// f[n][grid point] as jets; effective order of f_n is l_max + (n_max - n) / 2.
template <Scalar T>
struct FlowTable {
  int n_max = 2;
  int l_max = 0;
  std::vector<T> mu_grid;
  std::vector<std::vector<Jet<T>>> f;  // f[level_index(n)][i]
  std::string family;

  const Jet<T>& at(int n, std::size_t i) const {
    detail::require(n >= 2 && n <= n_max && n % 2 == 0, "FlowTable: n out of range");
    return f[level_index(n)].at(i);
  }
  int effective_order(int n) const { return l_max + (n_max - n) / 2; }
};

inline int required_family_order(int n_max, int l_max) {
  return l_max + (n_max - 2) / 2;
}

template <Scalar T>
FlowTable<T> build_table(const TwoPointFamily<T>& family, int n_max, int l_max, const std::vector<T>& mu_grid,
                         unsigned threads = 1) {
  detail::require(n_max >= 2 && n_max % 2 == 0, "build_table: n_max must be even and >= 2");
  detail::require(l_max >= 0, "build_table: l_max must be nonnegative");
  detail::require(!mu_grid.empty(), "build_table: empty mu grid");
  FlowTable<T> table;
  table.n_max = n_max;
  table.l_max = l_max;
  table.mu_grid = mu_grid;
  table.family = family_name(family);
  const int levels = level_index(n_max) + 1;
  table.f.assign(levels, std::vector<Jet<T>>(mu_grid.size()));
  const int order = required_family_order(n_max, l_max);

  std::vector<std::vector<Jet<T>>> per_point(mu_grid.size());
  parallel_for(mu_grid.size(), threads, [&](std::size_t i) {
    per_point[i] = hierarchy_at_point(family_jet(family, mu_grid[i], order), n_max);
  });
  for (std::size_t i = 0; i < mu_grid.size(); ++i) {
    for (int k = 0; k < levels; ++k) {
      const Jet<T>& j = per_point[i][k];
      for (int l = 0; l <= j.order(); ++l) {
        if (!is_finite(j[l])) {
          throw NumericError("numeric overflow at n = " + std::to_string(2 * k + 2) + ", l = " +
                             std::to_string(l) + ", mu = " + to_string(mu_grid[i]));
        }
      }
      table.f[k][i] = j;
    }
  }
  return table;
}

template <Scalar T>
std::vector<T> uniform_grid(const T& lo, const T& hi, int points) {
  detail::require(points >= 1, "uniform_grid: need at least one point");
  std::vector<T> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * T(i) / T(points - 1);
  g.back() = hi;
  return g;
}

/// Scale-invariant solutions: f4 = f2 (f2 - 1) / 3 and the mu-free recursion. Index k holds f_{2k+2}.
template <Scalar T>
std::vector<T> fixed_point_sequence(const T& f2, int n_max) {
  detail::require(n_max >= 2 && n_max % 2 == 0, "fixed_point_sequence: n_max must be even and >= 2");
  std::vector<T> f{f2};
  if (n_max >= 4) f.push_back(f2 * (f2 - T(1)) / T(3));
  for (int n = 4; n + 2 <= n_max; n += 2) {
    T sum(0);
    for (int n1 = 4; n1 <= n - 2; n1 += 2) sum += f[level_index(n1)] * f[level_index(n + 2 - n1)];
    sum += f[level_index(n)] * (T(2) * f2 + T(1) - T(4) / T(n));
    f.push_back(sum / T(n + 1));
  }
  return f;
}

/// A_n = alpha^(n/2 - 2) c^((2 - n)/2) f_n / n.
inline double rescale_to_A(double f_n, int n, double alpha, double c = kLoopConstant) {
  detail::require(alpha > 0, "rescale_to_A: alpha must be positive");
  detail::require(n >= 2 && n % 2 == 0, "rescale_to_A: n must be even and >= 2");
  return std::pow(alpha, n / 2 - 2) * std::pow(c, (2 - n) / 2) * f_n / n;
}

/// G_n = alpha^(n/2 - 2) (n - 2)! h_n.
inline double rescale_to_G(double h_n, int n, double alpha) {
  detail::require(alpha > 0, "rescale_to_G: alpha must be positive");
  detail::require(n >= 2 && n % 2 == 0, "rescale_to_G: n must be even and >= 2");
  return std::pow(alpha, n / 2 - 2) * factorial<double>(n - 2) * h_n;
}

struct UvScanRow {
  int n = 0;
  std::vector<double> value_at_mu_max;
  std::vector<double> value_at_zero;
  std::vector<double> differences;  // |f_n(mu_max_{k+1}) - f_n(mu_max_k)|
  bool differences_shrinking = false;
  bool zero_values_decreasing = false;
};

struct UvScanReport {
  std::vector<double> mu_max_list;
  std::vector<UvScanRow> rows;
};

/// f_n(mu_max) and f_n(0) along a list of mu_max values for a family parametrised by mu_max.
template <Scalar T>
UvScanReport uv_limit_scan(const std::function<TwoPointFamily<T>(const T&)>& family_for, const std::vector<T>& mu_max_list,
                           int n_max) {
  detail::require(mu_max_list.size() >= 2, "uv_limit_scan: need at least two mu_max values");
  UvScanReport report;
  const int order = required_family_order(n_max, 0);
  std::vector<std::vector<Jet<T>>> at_end, at_zero;
  for (const T& m : mu_max_list) {
    report.mu_max_list.push_back(to_double(m));
    const TwoPointFamily<T> fam = family_for(m);
    at_end.push_back(hierarchy_at_point(family_jet(fam, m, order), n_max));
    at_zero.push_back(hierarchy_at_point(family_jet(fam, T(0), order), n_max));
  }
  for (int n = 2; n <= n_max; n += 2) {
    UvScanRow row;
    row.n = n;
    for (std::size_t k = 0; k < mu_max_list.size(); ++k) {
      row.value_at_mu_max.push_back(to_double(at_end[k][level_index(n)].value()));
      row.value_at_zero.push_back(to_double(at_zero[k][level_index(n)].value()));
    }
    for (std::size_t k = 0; k + 1 < mu_max_list.size(); ++k) {
      row.differences.push_back(std::fabs(row.value_at_mu_max[k + 1] - row.value_at_mu_max[k]));
    }
    row.differences_shrinking = true;
    for (std::size_t k = 0; k + 1 < row.differences.size(); ++k) {
      if (!(row.differences[k + 1] < row.differences[k])) row.differences_shrinking = false;
    }
    row.zero_values_decreasing = true;
    for (std::size_t k = 0; k + 1 < row.value_at_zero.size(); ++k) {
      if (!(std::fabs(row.value_at_zero[k + 1]) < std::fabs(row.value_at_zero[k]))) row.zero_values_decreasing = false;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace mfrg
