#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mfrg/errors.hpp"
#include "mfrg/families.hpp"
#include "mfrg/hierarchy.hpp"
#include "mfrg/onepi.hpp"
#include "mfrg/report.hpp"
#include "mfrg/sine_action.hpp"
#include "mfrg/trivial.hpp"

namespace mfrg {

/// A named inequality plus the parameters needed to build its data and evaluate it.
struct BoundSpec {
  std::string id;
  std::map<std::string, double> params;
  bool log_space = true;

  double get(const std::string& key) const {
    auto it = params.find(key);
    detail::require(it != params.end(), "bound " + id + ": missing parameter '" + key + "'");
    return it->second;
  }
  double get(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
  int get_int(const std::string& key) const { return static_cast<int>(std::lround(get(key))); }
  int get_int(const std::string& key, int fallback) const { return static_cast<int>(std::lround(get(key, fallback))); }
};

inline const std::vector<std::string>& bound_ids() {
  static const std::vector<std::string> ids{"geom2", "geom", "dAbound", "Abound", "boundedaction", "g0g1", "gnk",
                                            "trivex", "jv",  "jlv",  "INga",    "prodh",  "pi4"};
  return ids;
}

namespace detail {

// log of K^(n+l-2) (n+l-2)! / ((l+1)^2 (n-2)!)
inline double log_geom_core(int n, int l, double K) {
  return (n + l - 2) * std::log(K) + log_factorial(n + l - 2) - log_factorial(n - 2) - 2 * std::log(l + 1.0);
}

// delta(mu) of the positive family f_2 = 1 + delta(mu)
inline double positive_delta_at(const FlowTable<double>& t, std::size_t i) { return t.at(2, i).value() - 1.0; }

inline void require_ids(const BoundSpec& spec, std::initializer_list<const char*> ids, const char* source) {
  for (const char* id : ids)
    if (spec.id == id) return;
  throw UsageError("bound " + spec.id + " cannot be evaluated on " + source);
}

// log rhs for |A_n| <= delta (alpha K^2 / c)^((n-2)/2) / (alpha n), with A_n rescaled from f_n
inline double log_a_bound(int n, double delta, double alpha, double K) {
  return std::log(delta) + 0.5 * (n - 2) * (std::log(alpha) + 2 * std::log(K) - std::log(kLoopConstant)) -
         std::log(alpha * n);
}

inline double log_rescaled_a(double f_n, int n, double alpha) {
  return (n / 2 - 2) * std::log(alpha) + 0.5 * (2 - n) * std::log(kLoopConstant) + std::log(std::fabs(f_n) / n);
}

}  // namespace detail

/// Bounded solutions: |d^l f_n| <= K^(n+l-2) delta^(l+1) (n+l-2)! / ((l+1)^2 (n-2)!) for n >= 4, delta the sup
/// of |f_2|. The n = 2 rows are the hypothesis on the family and are not re-checked.
inline BoundReport geom2_report(const FlowTable<double>& t, double delta, double K, double slack = 1e-12) {
  BoundReport rep;
  rep.lemma = "geom2";
  rep.params = {{"K", to_string(K)}, {"delta", to_string(delta)}, {"n_max", std::to_string(t.n_max)},
                {"l_max", std::to_string(t.l_max)}};
  for (std::size_t i = 0; i < t.mu_grid.size(); ++i)
    for (int n = 4; n <= t.n_max; n += 2) {
      const Jet<double>& j = t.at(n, i);
      for (int l = 0; l <= t.l_max && l <= j.order(); ++l)
        rep.add_upper(n, l, t.mu_grid[i], j[l], detail::log_geom_core(n, l, K) + (l + 1) * std::log(delta), slack);
    }
  return rep;
}

/// Positive solutions f_2 = 1 + delta(mu): 0 < d^l f_n <= delta(mu) K^(n+l-2) (n+l-2)! / ((l+1)^2 (n-2)!).
/// The upper bound is checked for n >= 4 and for n = 2, l >= 1, where f_2 itself is not of order delta.
inline BoundReport geom_report(const FlowTable<double>& t, double K, double slack = 1e-12) {
  BoundReport rep;
  rep.lemma = "geom";
  rep.params = {{"K", to_string(K)}, {"n_max", std::to_string(t.n_max)}, {"l_max", std::to_string(t.l_max)}};
  for (std::size_t i = 0; i < t.mu_grid.size(); ++i) {
    const double ld = std::log(detail::positive_delta_at(t, i));
    for (int n = 2; n <= t.n_max; n += 2) {
      const Jet<double>& j = t.at(n, i);
      for (int l = 0; l <= t.l_max && l <= j.order(); ++l) {
        rep.add_positive(n, l, t.mu_grid[i], j[l]);
        if (n > 2 || l > 0) rep.add_upper(n, l, t.mu_grid[i], j[l], ld + detail::log_geom_core(n, l, K), slack);
      }
    }
  }
  return rep;
}

/// Rescaled moments A_n at alpha = e^(mu - mu_max). `positive` selects the bound for f_2 = 1 + delta(mu)
/// (prefactor delta_{n,2} + delta(mu), strict positivity) instead of the constant delta prefactor.
inline BoundReport a_bound_report(const FlowTable<double>& t, double mu_max, double delta, double K, bool positive,
                                  double slack = 1e-12) {
  BoundReport rep;
  rep.lemma = positive ? "Abound" : "dAbound";
  rep.params = {{"K", to_string(K)}, {"mu_max", to_string(mu_max)}, {"n_max", std::to_string(t.n_max)}};
  if (!positive) rep.params["delta"] = to_string(delta);
  for (std::size_t i = 0; i < t.mu_grid.size(); ++i) {
    const double mu = t.mu_grid[i], alpha = std::exp(mu - mu_max);
    for (int n = 2; n <= t.n_max; n += 2) {
      const double f = t.at(n, i).value();
      const double pre = positive ? (n == 2 ? 1.0 : 0.0) + detail::positive_delta_at(t, i) : delta;
      if (positive) rep.add_positive(n, 0, mu, f, "A_n > 0");
      BoundRecord r;
      r.n = n;
      r.mu = mu;
      r.lhs = f == 0.0 ? 0.0 : std::exp(detail::log_rescaled_a(f, n, alpha)) * (f < 0 ? -1 : 1);
      const double log_rhs = detail::log_a_bound(n, pre, alpha, K);
      if (f == 0.0) {
        rep.add_upper(n, 0, mu, 0.0, log_rhs);
        continue;
      }
      r.log_lhs = detail::log_rescaled_a(f, n, alpha);
      r.log_rhs = log_rhs;
      r.log_margin = log_rhs + std::log1p(slack) - r.log_lhs;
      r.pass = positive ? r.log_margin > 0 : r.log_margin >= 0;
      rep.push(std::move(r));
    }
  }
  return rep;
}

/// Beta-driven families used by the bound suites: f_2 = -delta(mu) or 1 + delta(mu).
inline TwoPointFamily<double> spec_beta_family(const BoundSpec& s, bool positive) {
  return BetaFlow<double>{s.get("delta"), s.get("beta"), positive ? 1 : -1, positive ? 1 : 0, s.get("mu_max")};
}

inline std::vector<double> spec_grid(const BoundSpec& s) {
  return uniform_grid(s.get("mu_min", 0.0), s.get("mu_max"), s.get_int("grid", 32));
}

/// Evaluation on a connected-hierarchy table.
inline BoundReport evaluate(const BoundSpec& spec, const FlowTable<double>& t) {
  detail::require_ids(spec, {"geom2", "geom", "dAbound", "Abound"}, "a flow table");
  const double K = spec.get("K", 4.0), slack = spec.get("slack", 1e-12);
  if (spec.id == "geom2") return geom2_report(t, spec.get("delta"), K, slack);
  if (spec.id == "geom") return geom_report(t, K, slack);
  return a_bound_report(t, spec.get("mu_max"), spec.get("delta", 0.0), K, spec.id == "Abound", slack);
}

/// Evaluation on a 1PI table.
inline BoundReport evaluate(const BoundSpec& spec, const OnePiTable& t) {
  detail::require_ids(spec, {"jv", "jlv", "pi4", "INga"}, "a 1PI table");
  if (spec.id == "jv") return jv_report(t, spec.get("slack", 1e-9));
  if (spec.id == "jlv") return jlv_report(t, spec.get_int("l_max", t.l_max));
  if (spec.id == "INga") return inga_report(t.mu_grid, spec.get_int("N_max", 6), spec.get_int("l_max", 4));
  return pi4_report(t, spec.get("K", 4.0 / kLoopConstant), spec.get_int("l_max", t.l_max));
}

/// Evaluation on trivial-solution Taylor coefficients.
inline BoundReport evaluate(const BoundSpec& spec, const TrivialCoeffs<Rational>& c) {
  detail::require_ids(spec, {"g0g1", "gnk", "trivex"}, "trivial-solution coefficients");
  const int nk = spec.get_int("nk_max", 30);
  if (spec.id == "g0g1") return g0g1_report(c, nk);
  if (spec.id == "gnk") return gnk_report(c, nk);
  const int count = std::min<int>(spec.get_int("coeffs", 30), static_cast<int>(c.f2k.size()));
  return trivex_report(trivial_family(c, count, 0.0).a, c.epsilon);
}

/// Builds the data a spec needs from its parameters and evaluates it.
inline BoundReport run_bound_spec(const BoundSpec& s, unsigned threads = 1) {
  const std::string& id = s.id;
  if (id == "geom2" || id == "geom" || id == "dAbound" || id == "Abound") {
    const bool positive = id == "geom" || id == "Abound";
    const FlowTable<double> t =
        build_table(spec_beta_family(s, positive), s.get_int("n_max"), s.get_int("l_max", 0), spec_grid(s), threads);
    return evaluate(s, t);
  }
  if (id == "jv" || id == "jlv" || id == "pi4" || id == "INga") {
    const OnePiTable t = build_onepi_table(spec_beta_family(s, false), s.get_int("n_max", 4), s.get_int("l_max", 0),
                                           spec_grid(s), static_cast<int>(threads), s.get("series_tol", 1e-16));
    return evaluate(s, t);
  }
  if (id == "g0g1" || id == "gnk" || id == "trivex") {
    const auto to_q = [](double x) { return Rational(static_cast<long long>(std::llround(x * 1e9)), 1000000000LL); };
    const int nk = s.get_int("nk_max", 30), coeffs = s.get_int("coeffs", 30);
    const int weight = std::max(nk / 2 + 1, coeffs + 1);
    const auto c = build_trivial_coeffs(to_q(s.get("f20")), to_q(s.get("g40")), weight, s.get("epsilon", 1e-2));
    return evaluate(s, c);
  }
  if (id == "boundedaction") {
    // a(2, l) = sign (fraction) B_eps'(2, l), alternating in l when sign < 0
    const double ep = s.get("eps_prime"), frac = s.get("fraction", 1.0);
    const int n_max = s.get_int("n_max"), l_max = s.get_int("l_max", 0);
    std::vector<double> seed(l_max + n_max / 2 + 1);
    for (int l = 0; l < static_cast<int>(seed.size()); ++l)
      seed[l] = frac * bound_B(2, l, ep) * (s.get("sign", 1.0) < 0 && l % 2 == 1 ? -1 : 1);
    return lemma_bound_check(seed, ep, s.get("epsilon"), n_max, l_max, s.get("c", kLoopConstant));
  }
  if (id == "prodh") return prodh_report(s.get_int("v_max", 5), s.get_int("l_max", 20), s.get_int("n_max", 40),
                                             s.get_int("l_min", 1));
  throw UsageError("unknown bound id '" + id + "'");
}

struct MarginPoint {
  double value = 0.0;
  double min_margin = 0.0;
  std::size_t failures = 0;
};

/// min_margin of a spec as one parameter runs over `values`.
inline std::vector<MarginPoint> margin_scan(const BoundSpec& spec, const std::string& axis,
                                            const std::vector<double>& values,
                                            const std::function<BoundReport(const BoundSpec&)>& run) {
  std::vector<MarginPoint> curve;
  for (double v : values) {
    BoundSpec s = spec;
    s.params[axis] = v;
    const BoundReport r = run(s);
    curve.push_back({v, r.summary.min_margin, r.summary.failures});
  }
  return curve;
}

inline std::vector<MarginPoint> margin_scan(const BoundSpec& spec, const std::string& axis,
                                            const std::vector<double>& values, unsigned threads = 1) {
  return margin_scan(spec, axis, values, [threads](const BoundSpec& s) { return run_bound_spec(s, threads); });
}

}  // namespace mfrg
