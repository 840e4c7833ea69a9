#pragma once

// Problem files: one JSON object per problem, carrying the data of the
// equation (a, b, lambda, kappa, mu, rho, f, K, class) plus solver
// knobs (grid_n, tol, max_iter).  Rendering is canonical -- fixed key
// order, 17-significant-digit numbers, expressions printed from their
// ASTs -- so identical problems produce identical bytes.

#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fredlat/conjugate.hpp"
#include "fredlat/fredholm.hpp"

namespace fredlat {

inline constexpr const char* problem_format_id = "fredlat-problem/1";

/// Input-level failure: missing or ill-typed keys, unparseable
/// expressions, inconsistent constants.  The CLI maps this to exit 2.
class ProblemFileError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ProblemFile {
  ProblemSpec spec;
  int grid_n = 1001;
  double tol = 1e-9;
  int max_iter = 10000;
};

namespace detail {

inline double require_number(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key))
    throw ProblemFileError(std::string("problem file is missing key '") + key + "'");
  if (!doc[key].is_number())
    throw ProblemFileError(std::string("key '") + key + "' must be a number");
  return doc[key].get<double>();
}

inline std::string require_string(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key))
    throw ProblemFileError(std::string("problem file is missing key '") + key + "'");
  if (!doc[key].is_string())
    throw ProblemFileError(std::string("key '") + key + "' must be a string");
  return doc[key].get<std::string>();
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline ProblemFile load_problem_file(std::istream& in, const std::string& origin = "<stream>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProblemFileError(origin + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ProblemFileError(origin + " must hold a JSON object");

  const std::string format = detail::require_string(doc, "format");
  if (format != problem_format_id)
    throw ProblemFileError("unsupported format '" + format + "' (expected '" +
                           problem_format_id + "')");

  ProblemFile file;
  ProblemSpec& spec = file.spec;
  spec.a = detail::require_number(doc, "a");
  spec.b = detail::require_number(doc, "b");
  spec.lambda = detail::require_number(doc, "lambda");
  spec.kappa = detail::require_number(doc, "kappa");
  spec.mu = detail::require_number(doc, "mu");
  spec.rho = detail::require_number(doc, "rho");

  const std::string f_text = detail::require_string(doc, "f");
  const std::string K_text = detail::require_string(doc, "K");
  try {
    spec.f_expr = parse(f_text, {"t"});
  } catch (const ParseError& e) {
    throw ProblemFileError(std::string("key 'f' does not parse: ") + e.what());
  }
  try {
    spec.K_expr = parse(K_text, {"t", "s"});
  } catch (const ParseError& e) {
    throw ProblemFileError(std::string("key 'K' does not parse: ") + e.what());
  }

  if (!doc.contains("class") || !doc["class"].is_object())
    throw ProblemFileError("problem file is missing key 'class' (an object)");
  const auto& cls = doc["class"];
  const std::string monotone = detail::require_string(cls, "monotone");
  const std::string semicontinuity = detail::require_string(cls, "semicontinuity");
  if (monotone == "op") {
    spec.monotone = Monotone::Preserving;
  } else if (monotone == "or") {
    spec.monotone = Monotone::Reversing;
  } else {
    throw ProblemFileError("class.monotone must be \"op\" or \"or\"");
  }
  if (semicontinuity == "usc") {
    spec.semicontinuity = Semicontinuity::Upper;
  } else if (semicontinuity == "lsc") {
    spec.semicontinuity = Semicontinuity::Lower;
  } else {
    throw ProblemFileError("class.semicontinuity must be \"usc\" or \"lsc\"");
  }

  // The sign of the class tracks the sign of the constants; kappa
  // decides, with lambda/rho/mu breaking the tie when kappa is zero.
  const double signal = spec.kappa != 0.0   ? spec.kappa
                        : spec.lambda != 0.0 ? spec.lambda
                        : spec.rho != 0.0    ? spec.rho
                                             : spec.mu;
  spec.sign = signal < 0.0 ? Sign::NonPositive : Sign::NonNegative;

  if (doc.contains("grid_n")) {
    if (!doc["grid_n"].is_number_integer())
      throw ProblemFileError("key 'grid_n' must be an integer");
    file.grid_n = doc["grid_n"].get<int>();
    if (file.grid_n < 2) throw ProblemFileError("grid_n must be at least 2");
  }
  if (doc.contains("tol")) {
    file.tol = detail::require_number(doc, "tol");
    if (!(file.tol > 0.0)) throw ProblemFileError("tol must be positive");
  }
  if (doc.contains("max_iter")) {
    if (!doc["max_iter"].is_number_integer())
      throw ProblemFileError("key 'max_iter' must be an integer");
    file.max_iter = doc["max_iter"].get<int>();
    if (file.max_iter < 1) throw ProblemFileError("max_iter must be at least 1");
  }

  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw ProblemFileError(std::string("inconsistent problem: ") + e.what());
  }
  return file;
}

inline ProblemFile load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemFileError("cannot open problem file '" + path + "'");
  return load_problem_file(in, path);
}

/// Canonical rendering: fixed key order, numbers at 17 significant
/// digits, expressions unparsed from their ASTs.
inline std::string render_problem_file(const ProblemFile& file) {
  const auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  const ProblemSpec& spec = file.spec;
  std::ostringstream out;
  out << "{\n";
  out << "  \"format\": \"" << problem_format_id << "\",\n";
  out << "  \"a\": " << num(spec.a) << ",\n";
  out << "  \"b\": " << num(spec.b) << ",\n";
  out << "  \"lambda\": " << num(spec.lambda) << ",\n";
  out << "  \"kappa\": " << num(spec.kappa) << ",\n";
  out << "  \"mu\": " << num(spec.mu) << ",\n";
  out << "  \"rho\": " << num(spec.rho) << ",\n";
  out << "  \"f\": \"" << detail::json_escape(unparse(spec.f_expr)) << "\",\n";
  out << "  \"K\": \"" << detail::json_escape(unparse(spec.K_expr)) << "\",\n";
  out << "  \"class\": {\"monotone\": \""
      << (spec.monotone == Monotone::Preserving ? "op" : "or")
      << "\", \"semicontinuity\": \""
      << (spec.semicontinuity == Semicontinuity::Upper ? "usc" : "lsc") << "\"},\n";
  out << "  \"grid_n\": " << file.grid_n << ",\n";
  out << "  \"tol\": " << num(file.tol) << ",\n";
  out << "  \"max_iter\": " << file.max_iter << "\n";
  out << "}\n";
  return out.str();
}

}  // namespace fredlat
