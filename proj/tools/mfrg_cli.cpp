#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mfrg/bounds.hpp"
#include "mfrg/io.hpp"
#include "scenario.hpp"

using namespace mfrg;
using mfrg::cli::ScenarioConfig;
using io::json;

namespace {

struct Outcome {
  std::string summary;
  bool bounds_ok = true;
};

bool exact(const ScenarioConfig& c, bool default_exact) {
  if (c.backend == "auto") return default_exact;
  if (c.backend == "rational") return true;
  if (c.backend == "float") return false;
  throw UsageError("backend must be auto, rational or float");
}

std::map<std::string, std::string> describe(const ScenarioConfig& c) {
  return {{"family", c.family},          {"delta", io::format(c.delta)}, {"beta", io::format(c.beta)},
          {"mu_max", io::format(c.mu_max)}, {"n_max", std::to_string(c.n_max)}, {"l_max", std::to_string(c.l_max)},
          {"grid", std::to_string(c.grid)}};
}

std::string write(const ScenarioConfig& c, const std::string& name, const std::string& text) {
  return io::write_file(c.output_dir, name, text);
}

template <class F>
std::string to_text(F&& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

TrivialCoeffs<Rational> trivial_coeffs(const ScenarioConfig& c, int weight) {
  return build_trivial_coeffs(cli::parse_rational(c.f20), cli::parse_rational(c.g40), weight, c.epsilon);
}

TrivialAnsatz<double> ansatz_family(const ScenarioConfig& c) {
  const auto coeffs = trivial_coeffs(c, c.coeffs + 1);
  const auto a = trivial_family(coeffs, c.coeffs, 0.0).a;
  TrivialAnsatz<double> fam{{}, c.epsilon};
  for (const auto& x : a) fam.a.push_back(to_double(x));
  return fam;
}

TwoPointFamily<double> family_for(const ScenarioConfig& c, double mu_max) {
  if (c.family == "beta") return BetaFlow<double>{c.delta, c.beta, -1, 0, mu_max};
  if (c.family == "positive") return BetaFlow<double>{c.delta, c.beta, 1, 1, mu_max};
  if (c.family == "reversed") return ReversedFlow<double>{c.delta, c.beta, mu_max};
  if (c.family == "constant") return ScaleInvariant<double>{to_double(cli::parse_rational(c.f2))};
  if (c.family == "ansatz") return ansatz_family(c);
  throw UsageError("unknown family '" + c.family + "'");
}

TwoPointFamily<Rational> exact_family(const ScenarioConfig& c) {
  if (c.family == "beta" || c.family == "positive") {
    const bool pos = c.family == "positive";
    return BetaFlow<Rational>{Rational(c.delta), Rational(c.beta), pos ? 1 : -1, pos ? 1 : 0, Rational(c.mu_max)};
  }
  if (c.family == "constant") return ScaleInvariant<Rational>{cli::parse_rational(c.f2)};
  throw UsageError("the rational backend supports the beta, positive and constant families");
}

BoundSpec spec_from(const ScenarioConfig& c, const std::string& id, double default_K) {
  BoundSpec s{id,
              {{"delta", c.delta},
               {"beta", c.beta},
               {"mu_max", c.mu_max},
               {"n_max", double(c.n_max)},
               {"l_max", double(c.l_max)},
               {"grid", double(c.grid)},
               {"K", c.K > 0 ? c.K : default_K},
               {"epsilon", c.epsilon},
               {"eps_prime", c.eps_prime},
               {"series_tol", c.series_tol}}};
  if (id == "g0g1" || id == "gnk" || id == "trivex") {
    s.params["f20"] = to_double(cli::parse_rational(c.f20));
    s.params["g40"] = to_double(cli::parse_rational(c.g40));
  }
  for (const auto& kv : c.param) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--param expects key=value, got '" + kv + "'");
    s.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  return s;
}

std::string report_line(const BoundReport& r) {
  std::ostringstream os;
  os << r.lemma << (r.ok() ? " pass" : " FAIL") << " (" << r.summary.failures << "/" << r.summary.total << ")";
  return os.str();
}

void emit_report(const ScenarioConfig& c, const BoundReport& r, Outcome& out, const std::string& system) {
  write(c, "bounds_" + r.lemma + ".json", io::report_json(r).dump(2) + "\n");
  write(c, "bounds_" + r.lemma + ".csv", to_text([&](std::ostream& os) { io::write_report_csv(os, r, system); }));
  out.summary += " " + report_line(r);
  out.bounds_ok = out.bounds_ok && r.ok();
}

Outcome run_fixedpoint(const ScenarioConfig& c) {
  std::ostringstream csv;
  csv << "system,n,l,mu,value\n";
  int nonzero = 0;
  if (exact(c, true)) {
    const auto f = fixed_point_sequence(cli::parse_rational(c.f2), c.n_max);
    for (std::size_t k = 0; k < f.size(); ++k) {
      csv << "fixedpoint," << 2 * k + 2 << ",0,0," << io::format(f[k]) << '\n';
      nonzero += k > 0 && !is_zero(f[k]);
    }
  } else {
    const auto f = fixed_point_sequence(to_double(cli::parse_rational(c.f2)), c.n_max);
    for (std::size_t k = 0; k < f.size(); ++k) {
      csv << "fixedpoint," << 2 * k + 2 << ",0,0," << io::format(f[k]) << '\n';
      nonzero += k > 0 && f[k] != 0.0;
    }
  }
  write(c, "fixedpoint.csv", csv.str());
  return {"fixedpoint f2=" + c.f2 + " n_max=" + std::to_string(c.n_max) + " nonzero(n>=4)=" + std::to_string(nonzero)};
}

Outcome run_flow(const ScenarioConfig& c) {
  Outcome out;
  out.summary = "flow family=" + c.family + " n_max=" + std::to_string(c.n_max) + " grid=" + std::to_string(c.grid);
  if (exact(c, false)) {
    const auto t = build_table(exact_family(c), c.n_max, c.l_max,
                               uniform_grid(Rational(0), Rational(c.mu_max), c.grid), c.threads);
    write(c, "flow.csv", to_text([&](std::ostream& os) { io::write_flow_csv(os, t); }));
    write(c, "flow.json", io::flow_json(t, describe(c)).dump(2) + "\n");
    if (!c.check.empty()) throw UsageError("bound checks run on the float backend");
    return out;
  }
  const auto t = build_table(family_for(c, c.mu_max), c.n_max, c.l_max, uniform_grid(0.0, c.mu_max, c.grid),
                             static_cast<unsigned>(c.threads));
  write(c, "flow.csv", to_text([&](std::ostream& os) { io::write_flow_csv(os, t); }));
  write(c, "flow.json", io::flow_json(t, describe(c)).dump(2) + "\n");
  for (const auto& id : c.check) emit_report(c, evaluate(spec_from(c, id, 4.0), t), out, "connected");
  return out;
}

Outcome run_onepi(const ScenarioConfig& c) {
  Outcome out;
  if (c.family != "beta") throw UsageError("onepi uses the beta family h_2 = -delta(mu)");
  const auto t = build_onepi_table(family_for(c, c.mu_max), c.n_max, c.l_max, uniform_grid(0.0, c.mu_max, c.grid),
                                   c.threads, c.series_tol);
  write(c, "onepi.csv", to_text([&](std::ostream& os) { io::write_onepi_csv(os, t); }));
  write(c, "onepi.json", io::onepi_json(t, describe(c)).dump(2) + "\n");
  out.summary = "onepi n_max=" + std::to_string(c.n_max) + " grid=" + std::to_string(c.grid) +
                " certified=" + (t.certified() ? "yes" : "no");
  for (const auto& id : c.check) emit_report(c, evaluate(spec_from(c, id, 4.0 / kLoopConstant), t), out, "1pi");
  return out;
}

Outcome run_sine(const ScenarioConfig& c) {
  // |a(2, l)| up to (4/5) B_eps'(2, l), drawn uniformly
  std::mt19937_64 rng(static_cast<std::uint64_t>(c.seed));
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  std::vector<double> seed(c.l_max + c.n_max / 2 + 1);
  for (int l = 0; l < static_cast<int>(seed.size()); ++l) seed[l] = u(rng) * bound_B(2, l, c.eps_prime);
  const auto table = build_sine_table(seed, c.n_max, kLoopConstant);
  std::ostringstream csv;
  csv << "system,n,l,mu,value\n";
  for (int n = 2; n <= c.n_max; n += 2)
    for (int l = 0; l <= table.max_l(n); ++l) csv << "sine," << n << ',' << l << ",0," << io::format(table.at(n, l)) << '\n';
  write(c, "sine.csv", csv.str());
  Outcome out{"sine n_max=" + std::to_string(c.n_max) + " eps'=" + io::format(c.eps_prime)};
  emit_report(c, lemma_bound_check(seed, c.eps_prime, c.epsilon, c.n_max, c.l_max, kLoopConstant), out, "sine");
  return out;
}

Outcome run_trivial(const ScenarioConfig& c) {
  const int weight = std::max(c.weight, c.coeffs + 1);
  const auto coeffs = trivial_coeffs(c, weight);
  write(c, "trivial_coeffs.csv", to_text([&](std::ostream& os) { io::write_trivial_csv(os, coeffs); }));
  const auto a = trivial_family(coeffs, c.coeffs, 0.0).a;
  std::ostringstream csv;
  csv << "n,numerator,denominator,value\n";
  for (std::size_t i = 0; i < a.size(); ++i)
    csv << i + 1 << ',' << numerator(a[i]) << ',' << denominator(a[i]) << ',' << io::format(to_double(a[i])) << '\n';
  write(c, "ansatz.csv", csv.str());
  Outcome out{"trivial f20=" + c.f20 + " g40=" + c.g40 + " weight=" + std::to_string(weight)};
  const std::vector<std::string> ids = c.check.empty() ? std::vector<std::string>{"g0sign", "g0g1", "gnk", "trivex"} : c.check;
  for (const auto& id : ids) {
    if (id == "g0sign") {
      emit_report(c, sign_alternation_report(coeffs, weight), out, "trivial");
    } else if (id == "g0g1") {
      emit_report(c, g0g1_report(coeffs, weight), out, "trivial");
    } else if (id == "gnk") {
      emit_report(c, gnk_report(coeffs, weight), out, "trivial");
    } else if (id == "trivex") {
      emit_report(c, trivex_report(a, c.epsilon), out, "trivial");
    } else if (id == "nullin") {
      const auto t = build_table(TwoPointFamily<Rational>(trivial_family(coeffs, c.coeffs, 0.0)), c.n_max, c.l_max,
                                 std::vector<Rational>{Rational(0)});
      emit_report(c, check_nullin(t), out, "trivial");
    } else {
      throw UsageError("unknown trivial check '" + id + "'");
    }
  }
  return out;
}

Outcome run_uv_scan(const ScenarioConfig& c) {
  const std::vector<double> list = c.mu_max_list.empty() ? std::vector<double>{10, 20, 40, 80} : c.mu_max_list;
  const auto fixed = c.family == "ansatz" ? family_for(c, 0.0) : TwoPointFamily<double>(ScaleInvariant<double>{0.0});
  const auto rep = uv_limit_scan<double>(
      [&](const double& m) { return c.family == "ansatz" ? fixed : family_for(c, m); }, list, c.n_max);
  std::ostringstream csv;
  csv << "system,n,mu_max,value_at_mu_max,value_at_zero\n";
  int shrinking = 0, decreasing = 0;
  for (const auto& row : rep.rows) {
    for (std::size_t k = 0; k < list.size(); ++k)
      csv << "uv," << row.n << ',' << io::format(list[k]) << ',' << io::format(row.value_at_mu_max[k]) << ','
          << io::format(row.value_at_zero[k]) << '\n';
    shrinking += row.differences_shrinking;
    decreasing += row.zero_values_decreasing;
  }
  write(c, "uv_scan.csv", csv.str());
  return {"uv-scan family=" + c.family + " rows=" + std::to_string(rep.rows.size()) +
          " shrinking_differences=" + std::to_string(shrinking) + " decreasing_f_n(0)=" + std::to_string(decreasing)};
}

Outcome run_bounds(const ScenarioConfig& c) {
  if (c.id.empty()) throw UsageError("bounds needs --id");
  const double default_K = (c.id == "jv" || c.id == "jlv" || c.id == "pi4" || c.id == "INga") ? 4.0 / kLoopConstant : 4.0;
  const BoundSpec spec = spec_from(c, c.id, default_K);
  Outcome out{"bounds id=" + c.id};
  if (!c.scan.empty()) {
    if (c.values.empty()) throw UsageError("--scan needs --values");
    const auto curve = margin_scan(spec, c.scan, c.values, static_cast<unsigned>(c.threads));
    std::ostringstream csv;
    csv << "id,axis,value,min_margin,failures\n";
    for (const auto& p : curve)
      csv << c.id << ',' << c.scan << ',' << io::format(p.value) << ',' << io::format(p.min_margin) << ',' << p.failures
          << '\n';
    write(c, "margin_scan.csv", csv.str());
    out.summary += " scan=" + c.scan + " points=" + std::to_string(curve.size());
    for (const auto& p : curve) out.bounds_ok = out.bounds_ok && p.failures == 0;
    return out;
  }
  emit_report(c, run_bound_spec(spec, static_cast<unsigned>(c.threads)), out, "bounds");
  return out;
}

Outcome run_landau(const ScenarioConfig& c) {
  const auto pole = landau_pole(c.g0, c.beta);
  json doc{{"g0", c.g0}, {"beta", c.beta}, {"lambda_L", pole ? json(*pole) : json(nullptr)}};
  std::ostringstream os;
  os << "landau g0=" << io::format(c.g0) << " beta=" << io::format(c.beta) << " lambda_L="
     << (pole ? io::format(*pole) : std::string("none"));
  json values = json::array();
  for (double lam : c.lambda) {
    const double g = landau_coupling(c.g0, c.beta, lam);
    values.push_back({{"lambda", lam}, {"g", g}});
    os << " g(" << io::format(lam) << ")=" << io::format(g);
  }
  doc["coupling"] = values;
  write(c, "landau.json", doc.dump(2) + "\n");
  return {os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field renormalisation-group flow hierarchies: tables, bound suites and scans"};
  ScenarioConfig cfg;
  if (const char* dir = std::getenv("MFRG_OUTPUT_DIR")) cfg.output_dir = dir;
  cli::bind(app, cfg);
  app.set_config("--config", "", "flat key=value scenario file; flags override it");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "print the resolved configuration and exit");
  app.require_subcommand(1);
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"flow", "connected hierarchy table on a mu grid"},
           {"fixedpoint", "scale-invariant solution for constant f2"},
           {"sine", "bounded-action system at mu = 0"},
           {"trivial", "pure phi^4 boundary: Taylor triangle and ansatz coefficients"},
           {"onepi", "1PI hierarchy with J-kernels"},
           {"bounds", "evaluate one bound by id, optionally scanning a parameter"},
           {"landau", "Landau pole of the truncated running coupling"},
           {"uv-scan", "f_n(mu_max) and f_n(0) along a list of mu_max values"}})
    app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (print_config) {
    std::cout << cli::emit(cfg);
    return 0;
  }
  try {
    Outcome out;
    if (cfg.command == "flow") out = run_flow(cfg);
    else if (cfg.command == "fixedpoint") out = run_fixedpoint(cfg);
    else if (cfg.command == "sine") out = run_sine(cfg);
    else if (cfg.command == "trivial") out = run_trivial(cfg);
    else if (cfg.command == "onepi") out = run_onepi(cfg);
    else if (cfg.command == "bounds") out = run_bounds(cfg);
    else if (cfg.command == "landau") out = run_landau(cfg);
    else out = run_uv_scan(cfg);
    std::cout << out.summary << '\n';
    return (cfg.strict && !out.bounds_ok) ? 1 : 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  }
}
