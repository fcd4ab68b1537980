#pragma once

#include <cstdlib>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "mfrg/io.hpp"
#include "mfrg/scalar.hpp"

namespace mfrg::cli {

/// Everything a run needs; unset K (0) means the system's natural constant (4, or 4/c for 1PI).
struct ScenarioConfig {
  std::string command;
  std::string family = "beta";  // beta | positive | reversed | constant | ansatz
  double delta = 0.25;
  double beta = 0.25;
  std::string f2 = "1";
  int n_max = 16;
  int l_max = 4;
  double mu_max = 10.0;
  std::vector<double> mu_max_list;
  int grid = 32;
  std::string backend = "auto";  // auto | rational | float
  double tol = 1e-10;
  double series_tol = 1e-16;
  double K = 0.0;
  double epsilon = 1e-2;
  double eps_prime = 1e-3;
  std::string f20 = "-1/500";
  std::string g40 = "1/3200";
  int weight = 30;
  int coeffs = 30;
  double g0 = 0.1;
  std::vector<double> lambda;
  std::vector<std::string> check;
  bool strict = false;
  std::string output_dir = ".";
  int threads = 1;
  int seed = 1;
  std::string id;
  std::vector<std::string> param;
  std::string scan;
  std::vector<double> values;

  bool operator==(const ScenarioConfig&) const = default;
};

using FieldRef = std::variant<std::string*, double*, int*, bool*, std::vector<double>*, std::vector<std::string>*>;

struct Field {
  const char* name;
  FieldRef ref;
  const char* help;
};

inline std::vector<Field> fields(ScenarioConfig& c) {
  return {
      {"family", &c.family, "two-point family: beta, positive, reversed, constant, ansatz"},
      {"delta", &c.delta, "delta at mu_max (reversed: delta at mu = 0)"},
      {"beta", &c.beta, "beta of d delta / d mu = beta delta^2"},
      {"f2", &c.f2, "constant f2 (integer, decimal or p/q)"},
      {"n-max", &c.n_max, "largest even n"},
      {"l-max", &c.l_max, "largest derivative order"},
      {"mu-max", &c.mu_max, "upper end of the mu interval"},
      {"mu-max-list", &c.mu_max_list, "mu_max values for uv-scan"},
      {"grid", &c.grid, "number of mu grid points"},
      {"backend", &c.backend, "float or rational"},
      {"tol", &c.tol, "quadrature tolerance"},
      {"series-tol", &c.series_tol, "J-series tail tolerance"},
      {"K", &c.K, "bound constant (0: 4, or 4/c for 1PI)"},
      {"epsilon", &c.epsilon, "smallness parameter"},
      {"eps-prime", &c.eps_prime, "seed scale for the sine system"},
      {"f20", &c.f20, "f_{2,0} seed (p/q or decimal)"},
      {"g40", &c.g40, "g_{4,0} seed (p/q or decimal)"},
      {"weight", &c.weight, "largest weight n/2 + k of the Taylor triangle"},
      {"coeffs", &c.coeffs, "number of ansatz coefficients"},
      {"g0", &c.g0, "Landau coupling at lambda = 0"},
      {"lambda", &c.lambda, "points where the running coupling is printed"},
      {"check", &c.check, "bound ids to evaluate"},
      {"strict", &c.strict, "exit 1 when a bound check fails"},
      {"output-dir", &c.output_dir, "directory for CSV/JSON artifacts"},
      {"threads", &c.threads, "worker threads (0: all cores)"},
      {"seed", &c.seed, "random seed"},
      {"id", &c.id, "bound id for the bounds command"},
      {"param", &c.param, "extra bound parameters key=value"},
      {"scan", &c.scan, "parameter axis for a margin scan"},
      {"values", &c.values, "values of the scan axis"},
  };
}

/// Flat key = value text, one line per field, full precision; empty lists are left out.
inline std::string emit(const ScenarioConfig& cfg) {
  ScenarioConfig c = cfg;
  std::ostringstream os;
  if (!c.command.empty()) os << "# mfrg " << c.command << " --config <this file>\n";
  for (const Field& f : fields(c)) {
    const bool empty_list = std::visit(
        [](auto* p) {
          using P = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<P, std::vector<double>> || std::is_same_v<P, std::vector<std::string>>)
            return p->empty();
          else
            return false;
        },
        f.ref);
    if (empty_list) continue;
    os << f.name << '=';
    std::visit(
        [&](auto* p) {
          using P = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<P, std::string>) {
            os << '"' << *p << '"';
          } else if constexpr (std::is_same_v<P, double>) {
            os << io::format(*p);
          } else if constexpr (std::is_same_v<P, bool>) {
            os << (*p ? "true" : "false");
          } else if constexpr (std::is_same_v<P, int>) {
            os << *p;
          } else {
            os << '[';
            for (std::size_t i = 0; i < p->size(); ++i) {
              if (i) os << ',';
              if constexpr (std::is_same_v<P, std::vector<double>>)
                os << io::format((*p)[i]);
              else
                os << '"' << (*p)[i] << '"';
            }
            os << ']';
          }
        },
        f.ref);
    os << '\n';
  }
  return os.str();
}

/// Registers every field as a --long option on `app` (and, with fallthrough, on its subcommands).
inline void bind(CLI::App& app, ScenarioConfig& c) {
  for (const Field& f : fields(c)) {
    const std::string flag = std::string("--") + f.name;
    std::visit(
        [&](auto* p) {
          using P = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<P, bool>)
            app.add_flag(flag, *p, f.help);
          else if constexpr (std::is_same_v<P, std::vector<double>> || std::is_same_v<P, std::vector<std::string>>)
            app.add_option(flag, *p, f.help)->delimiter(',');
          else
            app.add_option(flag, *p, f.help);
        },
        f.ref);
  }
}

/// Parses config text produced by emit (or written by hand) into a config.
inline ScenarioConfig parse(const std::string& text, ScenarioConfig base = {}) {
  CLI::App app;
  bind(app, base);
  std::istringstream in(text);
  app.parse_from_stream(in);
  return base;
}

namespace detail {

inline Rational parse_rational_unchecked(const std::string& s) {
  if (s.find('/') != std::string::npos) return Rational(s);
  std::string mant = s;
  int exp10 = 0;
  const auto e = s.find_first_of("eE");
  if (e != std::string::npos) {
    mant = s.substr(0, e);
    exp10 = std::stoi(s.substr(e + 1));
  }
  const auto dot = mant.find('.');
  if (dot != std::string::npos) {
    exp10 -= static_cast<int>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  if (mant.empty() || mant == "-" || mant == "+") throw UsageError("not a number: '" + s + "'");
  if (mant[0] == '+') mant.erase(0, 1);
  Rational r{Integer(mant)};
  return exp10 >= 0 ? r * pow_int(Rational(10), exp10) : r / pow_int(Rational(10), -exp10);
}

}  // namespace detail

/// Integer, p/q or decimal (with optional exponent) as an exact rational.
inline Rational parse_rational(const std::string& s) {
  try {
    return detail::parse_rational_unchecked(s);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
}

}  // namespace mfrg::cli
