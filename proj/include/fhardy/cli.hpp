#pragma once

// Command-line front end. `run` is the whole program minus main(), so tests
// can drive it with in-memory streams.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fhardy/constants.hpp"
#include "fhardy/error.hpp"
#include "fhardy/fracmeasures.hpp"
#include "fhardy/sets1d.hpp"
#include "fhardy/variational.hpp"
#include "fhardy/verify.hpp"

namespace fhardy::cli {

enum class Exit : int { ok = 0, check_failed = 1, invalid_input = 2 };

struct Row {
  std::string param;
  double value = 0.0;
  double err_estimate = 0.0;
  std::string method;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

struct RunConfig {
  std::string command;
  std::string domain, set, what, suite = "all", output = "table", out_path;
  double s = 0, p = 1, q = 0, tol = 0;
  int N = 1, k = 0, grid_n = 64, rungs = 5;
  std::uint64_t seed = 0;
  std::map<std::string, bool> given;  // flag name -> present on the command line

  bool has(const std::string& flag) const { return given.count(flag) && given.at(flag); }
  void need(const std::string& flag, const std::string& context) const {
    if (!has(flag)) throw parse_error("missing parameter for " + context, flag);
  }
};

namespace detail {

inline std::string fmt(double v) { return fhardy::detail::fmt17(v); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline void emit(std::ostream& os, const std::vector<Row>& rows, const std::string& output) {
  if (output == "csv") {
    os << "param,value,err_estimate,method\n";
    for (const auto& r : rows)
      os << csv_field(r.param) << ',' << fmt(r.value) << ',' << fmt(r.err_estimate) << ',' << r.method << '\n';
  } else if (output == "jsonl") {
    for (const auto& r : rows) {
      nlohmann::ordered_json j{{"param", r.param}, {"value", r.value}, {"err_estimate", r.err_estimate}, {"method", r.method}};
      for (const auto& [k, v] : r.extra.items()) j[k] = v;
      os << j.dump() << '\n';
    }
  } else {
    for (const auto& r : rows) {
      os << r.param << " = " << fmt(r.value);
      if (r.err_estimate != 0.0) os << "  (err " << fmt(r.err_estimate) << ")";
      os << "  [" << r.method << "]";
      for (const auto& [k, v] : r.extra.items()) os << "  " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump());
      os << '\n';
    }
  }
}

inline QuadratureSpec quad_spec(const RunConfig& c) {
  QuadratureSpec spec;
  if (c.has("--tol")) spec.tolerance(c.tol, c.tol);
  return spec;
}

inline Domain1D domain_of(const RunConfig& c) {
  c.need("--domain", c.command);
  return parse_domain(c.domain);
}

// --set if given, otherwise the components of a bounded --domain
inline IntervalUnion subset_of(const RunConfig& c, const Domain1D* omega) {
  if (c.has("--set")) return parse_union(c.set);
  if (omega && omega->is_bounded()) return omega->components();
  throw parse_error("missing parameter for " + c.command + " on an unbounded domain", "--set");
}

inline std::vector<Row> cmd_constants(const RunConfig& c) {
  c.need("--what", "constants");
  const std::string& w = c.what;
  auto needs = [&](std::initializer_list<const char*> flags) {
    for (const char* f : flags) c.need(f, "--what " + w);
  };
  if (w == "c") {
    needs({"-N", "-q"});
    return {{w, c_constant(c.N, c.q), 0.0, "closed_form"}};
  }
  if (w == "c_quadrature") {
    needs({"-N", "-q"});
    const auto r = c_constant_quadrature_detailed(c.N, c.q, quad_spec(c));
    return {{w, r.value, r.err_estimate, "quadrature"}};
  }
  if (w == "omega") {
    needs({"-N"});
    return {{w, unit_ball_volume(c.N), 0.0, "closed_form"}};
  }
  if (w == "lambda" || w == "lambda_quadrature") {
    needs({"-s"});
    if (w == "lambda" && c.p == 1.0) return {{w, lambda_constant(c.s, 1.0), 0.0, "closed_form"}};
    const auto r = lambda_constant_integral(c.s, c.p, quad_spec(c));
    return {{w, r.value, r.err_estimate, "quadrature"}};
  }
  if (w == "sharp_halfspace") {
    needs({"-N", "-s"});
    return {{w, sharp_halfspace(c.N, c.s, c.p), 0.0, c.p == 1.0 ? "closed_form" : "quadrature"}};
  }
  if (w == "sharp_punctured") {
    needs({"-N", "-s"});
    return {{w, sharp_punctured(c.N, c.s), 0.0, "closed_form"}};
  }
  if (w == "perimeter_ball") {
    needs({"-N", "-s"});
    return {{w, perimeter_ball_closed(c.N, c.s), 0.0, "closed_form"}};
  }
  if (w == "ball_ratio") {
    needs({"-N", "-s"});
    return {{w, ball_ratio_bound(c.N, c.s), 0.0, "closed_form"}};
  }
  if (w == "classical") {
    needs({"-p"});
    return {{w, classical_constant(c.p), 0.0, "closed_form"}};
  }
  throw parse_error("unknown --what for constants", w);
}

inline std::vector<Row> cmd_perimeter(const RunConfig& c) {
  c.need("-s", "perimeter");
  std::optional<Domain1D> omega;
  if (c.has("--domain")) omega = parse_domain(c.domain);
  const auto E = subset_of(c, omega ? &*omega : nullptr);
  const std::string how = c.has("--what") ? c.what : "closed_form";
  MeasureResult r;
  if (how == "closed_form")
    r = perimeter_interval_union(E, c.s);
  else if (how == "quadrature")
    r = perimeter_oracle(E, c.s);
  else
    throw parse_error("unknown --what for perimeter (closed_form or quadrature)", how);
  return {{format_union(E), r.value, r.err_estimate, to_string(r.method)}};
}

inline std::vector<Row> cmd_volume(const RunConfig& c) {
  c.need("-q", "volume");
  const auto omega = domain_of(c);
  const auto E = subset_of(c, &omega);
  const auto r = weighted_volume(omega, E, c.q);
  return {{format_union(E), r.value, r.err_estimate, to_string(r.method), {{"domain", format_domain(omega)}}}};
}

inline std::vector<Row> cmd_quotient(const RunConfig& c) {
  c.need("-s", "quotient");
  const auto omega = domain_of(c);
  const auto E = subset_of(c, &omega);
  // [1_E]^p_{s,p} = P_{sp}(E), so the indicator quotient only sees sp
  const double q = c.s * c.p;
  return {{format_union(E), cheeger_quotient(omega, E, q), 0.0, "closed_form", {{"domain", format_domain(omega)}}}};
}

inline std::vector<Row> cmd_cheeger(const RunConfig& c) {
  c.need("-s", "cheeger");
  const auto omega = domain_of(c);
  MinimizeConfig mc;
  mc.seed = c.seed;
  if (c.has("--tol")) mc.tol = c.tol;
  const int k = c.has("--k") ? c.k : static_cast<int>(omega.components().size());
  const auto r = cheeger_search(omega, c.s, k, mc);
  return {{format_union(r.best_set), r.quotient, 0.0, "search",
           {{"domain", format_domain(omega)}, {"k", k}, {"evaluations", r.evaluations}, {"converged", r.converged}}}};
}

inline std::vector<Row> cmd_minimize(const RunConfig& c) {
  c.need("-s", "minimize");
  const auto omega = domain_of(c);
  MinimizeConfig mc;
  mc.seed = c.seed;
  if (c.has("--tol")) mc.tol = c.tol;
  const auto r = minimize_rayleigh(omega, c.s, c.p, c.grid_n, mc);
  return {{"rayleigh", r.quotient, 0.0, "projected_gradient",
           {{"domain", format_domain(omega)},
            {"grid_n", c.grid_n},
            {"best_start", r.best_start},
            {"evaluations", r.evaluations},
            {"converged", r.converged}}}};
}

inline std::vector<Row> cmd_sweep(const RunConfig& c) {
  c.need("--what", "sweep");
  fhardy::detail::require(c.rungs >= 2 && c.rungs <= 30, "rungs must lie in [2, 30]");
  const auto h = fhardy::detail::halving(0.2, c.rungs);
  std::vector<double> xs, fs, errs(h.size(), 0.0);
  std::string method = "closed_form";
  const std::string& w = c.what;
  if (w == "davila" || w == "mazya") {
    const auto omega = domain_of(c);
    const auto E = subset_of(c, &omega);
    for (double hk : h) {
      const double s = w == "davila" ? 1.0 - hk : hk;
      xs.push_back(s);
      fs.push_back(hk * perimeter_interval_union(E, s).value);
    }
  } else if (w == "lambda") {
    c.need("-s", "sweep --what lambda");
    method = "quadrature";
    for (std::size_t i = 0; i < h.size(); ++i) {
      const auto r = lambda_constant_integral(c.s, 1.0 + h[i], quad_spec(c));
      xs.push_back(1.0 + h[i]);
      fs.push_back(r.value);
      errs[i] = r.err_estimate;
    }
  } else if (w == "ball_ratio") {
    c.need("-N", "sweep --what ball_ratio");
    for (double hk : h) {
      xs.push_back(1.0 - hk);
      fs.push_back(ball_ratio_bound(c.N, 1.0 - hk));
    }
  } else {
    throw parse_error("unknown --what for sweep (davila, mazya, lambda, ball_ratio)", w);
  }
  std::vector<Row> rows;
  for (std::size_t i = 0; i < xs.size(); ++i)
    rows.push_back({fmt(xs[i]), fs[i], errs[i], method});
  rows.push_back({"limit", fhardy::detail::neville_at_zero(h, fs), 0.0, "richardson"});
  return rows;
}

}  // namespace detail

/// Full command-line entry point; returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sharp fractional Hardy constants: closed forms, set searches and verification"};
  app.require_subcommand(1);
  RunConfig c;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"constants", "closed-form and quadrature constants (--what)"},
      {"perimeter", "fractional perimeter P_s of a union of intervals"},
      {"volume", "distance-weighted volume of a subset of a domain"},
      {"quotient", "P_s(E) / V_s(E) for a given set"},
      {"cheeger", "search for the optimal set of a bounded domain"},
      {"minimize", "Rayleigh-quotient descent on a grid"},
      {"verify", "run the regression suite"},
      {"sweep", "emit a parameter ladder as CSV for plotting"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--domain", c.domain, "domain: interval(a,b), union[(a,b),...], halfline, punctured, punctured_box(R)");
    sub->add_option("--set", c.set, "subset E in the same grammar");
    sub->add_option("-s", c.s, "fractional order s in (0,1)");
    sub->add_option("-p", c.p, "integrability exponent p >= 1 (default 1)");
    sub->add_option("-N", c.N, "dimension");
    sub->add_option("-q", c.q, "weight exponent");
    sub->add_option("--what", c.what, "quantity to compute");
    sub->add_option("--suite", c.suite, "verification suite: all or a comma-separated list of groups");
    sub->add_option("--grid-n", c.grid_n, "grid cells for minimize (default 64)");
    sub->add_option("-k,--k", c.k, "maximal number of intervals in the searched set");
    sub->add_option("--seed", c.seed, "seed for every stochastic component");
    sub->add_option("--tol", c.tol, "tolerance override");
    sub->add_option("--rungs", c.rungs, "ladder length for limits and sweeps (default 5)");
    sub->add_option("--output", c.output, "table, csv or jsonl")->check(CLI::IsMember({"table", "csv", "jsonl"}));
    sub->add_option("--out", c.out_path, "write results to this file");
  }

  // CLI11 would only say "a subcommand is required"; name the bad token instead
  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const auto& cmd : commands) known = known || cmd.first == argv[1];
    if (!known) {
      err << "fhardy: error: " << parse_error("unknown command", argv[1]).what() << '\n';
      return static_cast<int>(Exit::invalid_input);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "fhardy: error: " << e.what() << '\n';
    return e.get_exit_code() == 0 ? 0 : static_cast<int>(Exit::invalid_input);
  }

  CLI::App* sub = app.get_subcommands().front();
  c.command = sub->get_name();
  for (const char* flag : {"--domain", "--set", "-s", "-p", "-N", "-q", "--what", "--suite", "--grid-n", "--k", "--seed",
                           "--tol", "--rungs", "--output", "--out"})
    c.given[flag] = sub->count(flag) > 0;

  std::ofstream file;
  std::ostream* sink = &out;
  try {
    if (c.has("--out")) {
      file.open(c.out_path);
      if (!file) throw parse_error("cannot open output file", c.out_path);
      sink = &file;
    }
    if (c.command == "verify") {
      VerifyConfig vc;
      vc.suite = c.suite;
      if (c.has("--seed")) vc.seed = c.seed;
      vc.rungs = c.rungs;
      const auto checks = run_all(vc);
      if (c.output == "jsonl") {
        write_jsonl(*sink, checks);
      } else if (c.output == "csv") {
        std::vector<Row> rows;
        for (const auto& ch : checks) rows.push_back({ch.id, ch.lhs, std::abs(ch.lhs - ch.rhs), to_string(ch.status)});
        detail::emit(*sink, rows, "csv");
      } else {
        write_table(*sink, checks);
      }
      return all_passed(checks) ? 0 : static_cast<int>(Exit::check_failed);
    }
    std::vector<Row> rows;
    if (c.command == "constants") rows = detail::cmd_constants(c);
    else if (c.command == "perimeter") rows = detail::cmd_perimeter(c);
    else if (c.command == "volume") rows = detail::cmd_volume(c);
    else if (c.command == "quotient") rows = detail::cmd_quotient(c);
    else if (c.command == "cheeger") rows = detail::cmd_cheeger(c);
    else if (c.command == "minimize") rows = detail::cmd_minimize(c);
    else rows = detail::cmd_sweep(c);
    detail::emit(*sink, rows, c.output);
    return 0;
  } catch (const parse_error& e) {
    err << "fhardy: error: " << e.what() << '\n';
    return static_cast<int>(Exit::invalid_input);
  } catch (const domain_error& e) {
    err << "fhardy: error: " << e.what() << '\n';
    return static_cast<int>(Exit::invalid_input);
  } catch (const convergence_error& e) {
    err << "fhardy: did not converge: " << e.what() << '\n';
    return static_cast<int>(Exit::check_failed);
  } catch (const std::exception& e) {
    err << "fhardy: error: " << e.what() << '\n';
    return static_cast<int>(Exit::check_failed);
  }
}

}  // namespace fhardy::cli
