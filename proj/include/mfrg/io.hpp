#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfrg/errors.hpp"
#include "mfrg/hierarchy.hpp"
#include "mfrg/onepi.hpp"
#include "mfrg/report.hpp"
#include "mfrg/scalar.hpp"
#include "mfrg/trivial.hpp"

namespace mfrg::io {

using json = nlohmann::ordered_json;

/// 17 significant digits for doubles, p/q for rationals.
inline std::string format(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}
inline std::string format(const Rational& x) { return x.str(); }

inline json number(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}
inline json number(const Rational& x) { return x.str(); }

/// Rows (system, n, l, mu, value) for every stored derivative.
template <Scalar T>
void write_flow_csv(std::ostream& os, const FlowTable<T>& t, const std::string& system = "connected") {
  os << "system,n,l,mu,value\n";
  for (int n = 2; n <= t.n_max; n += 2)
    for (std::size_t i = 0; i < t.mu_grid.size(); ++i) {
      const Jet<T>& j = t.at(n, i);
      for (int l = 0; l <= j.order(); ++l)
        os << system << ',' << n << ',' << l << ',' << format(t.mu_grid[i]) << ',' << format(j[l]) << '\n';
    }
}

inline void write_onepi_csv(std::ostream& os, const OnePiTable& t) {
  os << "system,n,l,mu,value\n";
  for (int n = 2; n <= t.n_max; n += 2)
    for (std::size_t i = 0; i < t.mu_grid.size(); ++i) {
      const Jet<double>& j = t.at(n, i);
      for (int l = 0; l <= j.order(); ++l)
        os << "1pi," << n << ',' << l << ',' << format(t.mu_grid[i]) << ',' << format(j[l]) << '\n';
    }
  for (std::size_t i = 0; i < t.mu_grid.size(); ++i)
    for (std::size_t v = 0; v < t.J[i].J.size(); ++v) {
      const Jet<double>& j = t.J[i].J[v];
      for (int l = 0; l <= j.order(); ++l)
        os << "1pi-J," << v << ',' << l << ',' << format(t.mu_grid[i]) << ',' << format(j[l]) << '\n';
    }
}

template <Scalar T>
json flow_json(const FlowTable<T>& t, const std::map<std::string, std::string>& params,
               const std::string& system = "connected") {
  json doc;
  doc["system"] = system;
  doc["family"] = t.family;
  doc["params"] = params;
  doc["n_max"] = t.n_max;
  doc["l_max"] = t.l_max;
  json grid = json::array();
  for (const auto& m : t.mu_grid) grid.push_back(number(m));
  doc["mu_grid"] = grid;
  json entries = json::array();
  for (int n = 2; n <= t.n_max; n += 2)
    for (std::size_t i = 0; i < t.mu_grid.size(); ++i) {
      json d = json::array();
      const Jet<T>& j = t.at(n, i);
      for (int l = 0; l <= j.order(); ++l) d.push_back(number(j[l]));
      entries.push_back({{"n", n}, {"mu", number(t.mu_grid[i])}, {"derivs", d}});
    }
  doc["entries"] = entries;
  return doc;
}

inline json onepi_json(const OnePiTable& t, const std::map<std::string, std::string>& params) {
  json doc;
  doc["system"] = "1pi";
  doc["params"] = params;
  doc["n_max"] = t.n_max;
  doc["l_max"] = t.l_max;
  doc["certified"] = t.certified();
  json entries = json::array(), kernels = json::array();
  for (std::size_t i = 0; i < t.mu_grid.size(); ++i) {
    for (int n = 2; n <= t.n_max; n += 2) {
      json d = json::array();
      for (int l = 0; l <= t.at(n, i).order(); ++l) d.push_back(number(t.at(n, i)[l]));
      entries.push_back({{"n", n}, {"mu", number(t.mu_grid[i])}, {"derivs", d}});
    }
    for (std::size_t v = 0; v < t.J[i].J.size(); ++v) {
      json d = json::array();
      for (int l = 0; l <= t.J[i].J[v].order(); ++l) d.push_back(number(t.J[i].J[v][l]));
      kernels.push_back({{"v", v}, {"mu", number(t.mu_grid[i])}, {"series_terms", t.J[i].series_terms}, {"derivs", d}});
    }
  }
  doc["entries"] = entries;
  doc["J"] = kernels;
  return doc;
}

inline json record_json(const BoundRecord& r) {
  return {{"n", r.n},
          {"l", r.l},
          {"mu", number(r.mu)},
          {"value", number(r.lhs)},
          {"bound", number(std::exp(r.log_rhs))},
          {"log_bound", number(r.log_rhs)},
          {"pass", r.pass},
          {"log_margin", number(r.log_margin)},
          {"note", r.note}};
}

/// {lemma, params, grid, summary, first_violation}
inline json report_json(const BoundReport& rep) {
  json doc;
  doc["lemma"] = rep.lemma;
  doc["params"] = rep.params;
  json grid = json::array();
  for (const auto& r : rep.records) grid.push_back(record_json(r));
  doc["grid"] = grid;
  doc["summary"] = {{"total", rep.summary.total},
                    {"failures", rep.summary.failures},
                    {"min_margin", number(rep.summary.min_margin)}};
  doc["first_violation"] = rep.summary.first_violation ? record_json(*rep.summary.first_violation) : json(nullptr);
  return doc;
}

/// Rows (system, n, l, mu, value, bound, pass).
inline void write_report_csv(std::ostream& os, const BoundReport& rep, const std::string& system) {
  os << "system,n,l,mu,value,bound,pass\n";
  for (const auto& r : rep.records)
    os << system << ',' << r.n << ',' << r.l << ',' << format(r.mu) << ',' << format(r.lhs) << ','
       << format(std::exp(r.log_rhs)) << ',' << (r.pass ? 1 : 0) << '\n';
}

/// Rows (n, k, numerator, denominator); n = 2 rows are f_{2,k}.
inline void write_trivial_csv(std::ostream& os, const TrivialCoeffs<Rational>& c) {
  os << "n,k,numerator,denominator\n";
  for (std::size_t k = 0; k < c.f2k.size(); ++k)
    os << 2 << ',' << k << ',' << numerator(c.f2k[k]) << ',' << denominator(c.f2k[k]) << '\n';
  for (const auto& [key, v] : c.g) os << key.first << ',' << key.second << ',' << numerator(v) << ',' << denominator(v) << '\n';
}

/// Writes text to dir/name, creating dir if needed; returns the path.
inline std::string write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path p = std::filesystem::path(dir) / name;
  std::ofstream out(p);
  if (!out) throw UsageError("cannot write " + p.string());
  out << text;
  return p.string();
}

}  // namespace mfrg::io
