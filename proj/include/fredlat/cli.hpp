#pragma once

// Command implementations behind the `fredlat` driver.  Each command
// takes an options struct and the two output streams and returns the
// process exit code:
//
//   0  success
//   1  hypothesis or property failure
//   2  input error (bad file, bad expression, inconsistent constants)
//   3  iteration cap hit before convergence
//
// All numeric output is printed with 17 significant digits so that
// results round-trip losslessly; identical inputs produce byte-identical
// output regardless of thread count.

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fredlat/bracket.hpp"
#include "fredlat/nystrom.hpp"
#include "fredlat/order.hpp"
#include "fredlat/problem_file.hpp"

namespace fredlat::cli {

inline std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string jstr(const std::string& s) {
  return "\"" + fredlat::detail::json_escape(s) + "\"";
}
inline const char* jbool(bool b) { return b ? "true" : "false"; }

struct CheckOptions {
  std::string path;
  bool json = false;
};

struct SolveOptions {
  std::string path;
  std::optional<double> tol;
  std::optional<int> grid_n;
  std::optional<std::string> trace_path;
  std::string output = "solution.csv";
  bool force = false;
  bool json = false;
};

struct OracleOptions {
  std::string path;
  std::optional<int> grid_n;
  std::string output = "oracle.csv";
  bool json = false;
};

struct TransformOptions {
  std::string path;
};

struct SelftestOptions {
  std::uint64_t seed = 1;
  int cases = 500;
  bool json = false;
};

namespace detail {

inline void render_report_text(const HypothesisReport& report, std::ostream& out) {
  for (const auto& c : report.checks) {
    out << "  " << c.name;
    for (std::size_t pad = c.name.size(); pad < 18; ++pad) out << ' ';
    out << (c.pass ? "PASS" : "FAIL");
    if (!c.pass) {
      out << "  " << c.detail;
      if (c.witness_t) {
        out << " (witness t = " << num17(*c.witness_t);
        if (c.witness_s) out << ", s = " << num17(*c.witness_s);
        out << ")";
      }
    }
    out << '\n';
  }
  out << "margin = " << num17(report.margin) << '\n';
  out << "note: " << report.sampling_note << '\n';
}

inline void render_report_json(const HypothesisReport& report, std::ostream& out) {
  out << "\"checks\": [";
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    const auto& c = report.checks[i];
    if (i) out << ", ";
    out << "{\"name\": " << jstr(c.name) << ", \"pass\": " << jbool(c.pass)
        << ", \"detail\": " << jstr(c.detail) << ", \"witness_t\": "
        << (c.witness_t ? num17(*c.witness_t) : "null") << ", \"witness_s\": "
        << (c.witness_s ? num17(*c.witness_s) : "null") << "}";
  }
  out << "], \"margin\": " << num17(report.margin) << ", \"note\": "
      << jstr(report.sampling_note);
}

inline void write_solution_csv(const SolveResult& result, std::ostream& out) {
  out << "t,phi_min,phi_max\n";
  const Grid& grid = result.phi_min.grid();
  for (int i = 0; i < grid.n; ++i)
    out << num17(grid.node(i)) << ',' << num17(result.phi_min[i]) << ','
        << num17(result.phi_max[i]) << '\n';
}

inline void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& out) {
  out << "k,residual_low,residual_high,gap\n";
  for (const auto& row : trace)
    out << row.k << ',' << num17(row.residual_low) << ',' << num17(row.residual_high)
        << ',' << num17(row.gap) << '\n';
}

}  // namespace detail

/// `check <file>`: run the hypothesis checker and report per-condition
/// results.  Exit 0 iff every check passes.
inline int cmd_check(const CheckOptions& opt, std::ostream& out, std::ostream& err) {
  ProblemFile file;
  try {
    file = load_problem_file(opt.path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  HypothesisReport report;
  try {
    report = check_hypotheses(file.spec, Grid(file.spec.a, file.spec.b, file.grid_n));
  } catch (const EvalError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  if (opt.json) {
    out << "{\"command\": \"check\", \"file\": " << jstr(opt.path) << ", \"grid_n\": "
        << file.grid_n << ", \"pass\": " << jbool(report.all_pass()) << ", ";
    detail::render_report_json(report, out);
    out << "}\n";
  } else {
    out << "hypothesis check: " << opt.path << " (grid_n = " << file.grid_n << ")\n";
    detail::render_report_text(report, out);
    out << "result: " << (report.all_pass() ? "PASS" : "FAIL") << '\n';
  }
  return report.all_pass() ? 0 : 1;
}

/// `solve <file>`: bracketing iteration; writes the solution CSV
/// (t,phi_min,phi_max) and prints the run summary.
inline int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err) {
  ProblemFile file;
  try {
    file = load_problem_file(opt.path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  if (opt.grid_n) file.grid_n = *opt.grid_n;
  if (opt.tol) file.tol = *opt.tol;
  if (file.grid_n < 2 || !(file.tol > 0.0)) {
    err << "error: grid_n must be >= 2 and tol positive\n";
    return 2;
  }

  SolverConfig cfg;
  cfg.tol = file.tol;
  cfg.max_iter = file.max_iter;
  cfg.force = opt.force;
  cfg.record_trace = opt.trace_path.has_value();

  std::optional<SolveResult> result;
  try {
    const Quadrature quad = trapezoid_weights(Grid(file.spec.a, file.spec.b, file.grid_n));
    result = solve(file.spec, quad, cfg);
  } catch (const HypothesesError& e) {
    err << "error: " << e.what() << '\n';
    detail::render_report_text(e.report(), err);
    return 1;
  } catch (const IterationBreakdown& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const EvalError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  {
    std::ofstream csv(opt.output);
    if (!csv) {
      err << "error: cannot write '" << opt.output << "'\n";
      return 2;
    }
    detail::write_solution_csv(*result, csv);
  }
  if (opt.trace_path) {
    std::ofstream trace(*opt.trace_path);
    if (!trace) {
      err << "error: cannot write '" << *opt.trace_path << "'\n";
      return 2;
    }
    detail::write_trace_csv(result->trace, trace);
  }

  if (opt.json) {
    out << "{\"command\": \"solve\", \"file\": " << jstr(opt.path)
        << ", \"grid_n\": " << file.grid_n << ", \"tol\": " << num17(file.tol)
        << ", \"max_iter\": " << file.max_iter << ", \"force\": " << jbool(opt.force)
        << ", \"iterations_low\": " << result->iterations_low
        << ", \"iterations_high\": " << result->iterations_high
        << ", \"residual_low\": " << num17(result->residual_low)
        << ", \"residual_high\": " << num17(result->residual_high)
        << ", \"bracket_gap\": " << num17(result->bracket_gap)
        << ", \"contraction_ratio\": " << num17(result->contraction_ratio)
        << ", \"unique\": " << jbool(result->unique)
        << ", \"converged\": " << jbool(result->converged)
        << ", \"reflected\": " << jbool(result->reflected)
        << ", \"output\": " << jstr(opt.output) << ", \"trace\": "
        << (opt.trace_path ? jstr(*opt.trace_path) : "null") << "}\n";
  } else {
    out << "solve: " << opt.path << '\n';
    out << "grid_n = " << file.grid_n << '\n';
    out << "tol = " << num17(file.tol) << '\n';
    out << "iterations_low = " << result->iterations_low << '\n';
    out << "iterations_high = " << result->iterations_high << '\n';
    out << "residual_low = " << num17(result->residual_low) << '\n';
    out << "residual_high = " << num17(result->residual_high) << '\n';
    out << "bracket_gap = " << num17(result->bracket_gap) << '\n';
    out << "contraction_ratio = " << num17(result->contraction_ratio) << '\n';
    out << "unique = " << jbool(result->unique) << '\n';
    out << "converged = " << jbool(result->converged) << '\n';
    out << "reflected = " << jbool(result->reflected) << '\n';
    out << "solution written to " << opt.output << '\n';
    if (opt.trace_path) out << "trace written to " << *opt.trace_path << '\n';
  }
  if (!result->converged) {
    err << "error: iteration cap (" << file.max_iter << ") hit before convergence\n";
    return 3;
  }
  return 0;
}

/// `oracle <file>`: collocation solve; writes a t,value CSV.
inline int cmd_oracle(const OracleOptions& opt, std::ostream& out, std::ostream& err) {
  ProblemFile file;
  try {
    file = load_problem_file(opt.path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  if (opt.grid_n) file.grid_n = *opt.grid_n;
  std::optional<GridFunction> solution;
  double residual = 0.0;
  try {
    const Quadrature quad = trapezoid_weights(Grid(file.spec.a, file.spec.b, file.grid_n));
    solution = nystrom_solve(file.spec, quad);
    residual = sup_diff(apply_T(file.spec, *solution, quad), *solution);
  } catch (const SingularSystemError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const EvalError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  {
    std::ofstream csv(opt.output);
    if (!csv) {
      err << "error: cannot write '" << opt.output << "'\n";
      return 2;
    }
    write_csv(*solution, csv);
  }
  if (opt.json) {
    out << "{\"command\": \"oracle\", \"file\": " << jstr(opt.path) << ", \"grid_n\": "
        << file.grid_n << ", \"residual_under_T\": " << num17(residual)
        << ", \"output\": " << jstr(opt.output) << "}\n";
  } else {
    out << "oracle: " << opt.path << '\n';
    out << "grid_n = " << file.grid_n << '\n';
    out << "residual_under_T = " << num17(residual) << '\n';
    out << "solution written to " << opt.output << '\n';
  }
  return 0;
}

/// `transform <file>`: print the reflected problem file.
inline int cmd_transform(const TransformOptions& opt, std::ostream& out, std::ostream& err) {
  ProblemFile file;
  try {
    file = load_problem_file(opt.path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  file.spec = reflect_problem(file.spec);
  out << render_problem_file(file);
  return 0;
}

/// `lattice-selftest`: exhaustive fixed-point battery on random finite
/// lattices; exits non-zero on any violation.
inline int cmd_lattice_selftest(const SelftestOptions& opt, std::ostream& out,
                                std::ostream& err) {
  if (opt.cases < 1) {
    err << "error: cases must be at least 1\n";
    return 2;
  }
  const LatticeSelftestResult result = run_lattice_selftest(opt.seed, opt.cases);
  if (opt.json) {
    out << "{\"command\": \"lattice-selftest\", \"seed\": " << opt.seed
        << ", \"cases\": " << result.cases << ", \"failures\": " << result.failures
        << ", \"messages\": [";
    for (std::size_t i = 0; i < result.messages.size(); ++i) {
      if (i) out << ", ";
      out << jstr(result.messages[i]);
    }
    out << "]}\n";
  } else {
    out << "lattice selftest: seed = " << opt.seed << ", cases = " << result.cases
        << ", failures = " << result.failures << '\n';
    for (const auto& msg : result.messages) out << "  " << msg << '\n';
  }
  return result.ok() ? 0 : 1;
}

}  // namespace fredlat::cli
