#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfrg/scalar.hpp"

namespace mfrg {

/// One inequality |lhs| <= rhs evaluated at a grid location.
struct BoundRecord {
  int n = 0;
  int l = 0;
  double mu = 0.0;
  double lhs = 0.0;        // signed value of the bounded quantity
  double log_lhs = 0.0;    // log |value|, usable when the value overflows a double
  double log_rhs = 0.0;    // log of the bound
  bool pass = true;
  double log_margin = 0.0;  // log rhs (1 + slack) - log |lhs|; +inf for a zero lhs
  std::string note;
};

struct BoundSummary {
  std::size_t total = 0;
  std::size_t failures = 0;
  double min_margin = std::numeric_limits<double>::infinity();  // multiplicative, rhs / |lhs|
  std::optional<BoundRecord> first_violation;
};

struct BoundReport {
  std::string lemma;
  std::map<std::string, std::string> params;
  std::vector<BoundRecord> records;
  BoundSummary summary;

  /// Upper bound in log space with relative slack: passes if |value| <= rhs (1 + slack).
  template <Scalar T>
  void add_upper(int n, int l, double mu, const T& value, double log_rhs, double slack = 0.0) {
    BoundRecord r;
    r.n = n;
    r.l = l;
    r.mu = mu;
    r.lhs = to_double(value);
    r.log_rhs = log_rhs;
    if (is_zero(value)) {
      r.log_lhs = -std::numeric_limits<double>::infinity();
      r.log_margin = std::numeric_limits<double>::infinity();
      r.pass = true;
    } else {
      r.log_lhs = log_abs(value);
      r.log_margin = log_rhs + std::log1p(slack) - r.log_lhs;
      r.pass = r.log_margin >= 0.0;
    }
    push(std::move(r));
  }

  /// Exact |lhs| <= rhs for exact scalars; the margin is reported in log form.
  template <Scalar T>
  void add_exact_le(int n, int l, double mu, const T& lhs, const T& rhs, const std::string& note = "") {
    add_upper(n, l, mu, lhs, log_abs(rhs));
    BoundRecord& r = records.back();
    const bool ok = abs_value(lhs) <= rhs;
    if (ok != r.pass) {
      if (ok) {
        --summary.failures;
        if (summary.first_violation && summary.failures == 0) summary.first_violation.reset();
      } else {
        ++summary.failures;
        if (!summary.first_violation) summary.first_violation = r;
      }
      r.pass = ok;
    }
    r.note = note;
    if (!ok) summary.min_margin = std::min(summary.min_margin, std::nextafter(1.0, 0.0));
  }

  /// Strict positivity requirement; failures carry margin 0.
  template <Scalar T>
  void add_positive(int n, int l, double mu, const T& value, const std::string& note = "positivity") {
    BoundRecord r;
    r.n = n;
    r.l = l;
    r.mu = mu;
    r.lhs = to_double(value);
    r.log_lhs = is_zero(value) ? -std::numeric_limits<double>::infinity() : log_abs(value);
    r.log_rhs = std::numeric_limits<double>::infinity();
    r.pass = sign_of(value) > 0;
    r.log_margin = r.pass ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.note = note;
    push(std::move(r));
  }

  void push(BoundRecord r) {
    ++summary.total;
    const double m = std::exp(std::min(r.log_margin, 700.0));
    if (!r.pass) {
      ++summary.failures;
      if (!summary.first_violation) summary.first_violation = r;
    }
    summary.min_margin = std::min(summary.min_margin, r.pass ? m : std::min(m, std::nextafter(1.0, 0.0)));
    records.push_back(std::move(r));
  }

  void merge(const BoundReport& other) {
    for (const auto& r : other.records) push(r);
  }

  bool ok() const { return summary.failures == 0; }
};

}  // namespace mfrg
