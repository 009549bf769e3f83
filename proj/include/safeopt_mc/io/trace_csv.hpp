#pragma once

#include <Eigen/Core>

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "safeopt_mc/errors.hpp"
#include "safeopt_mc/trace.hpp"

// Trace CSV schema (one header line, one row per iteration):
//
//   n, point, a_0..a_{d-1}, z_0..z_{c-1}, output, width, y_0..y_q,
//   safe_size, maximizer_size, expander_size, best_point,
//   best_0..best_{d-1}, best_lower, misspecifications, violation, failed,
//   oracle_gap
//
// Doubles use the shortest representation that parses back to the same
// value ("nan", "inf" and "-inf" included). Two trailer lines record how the
// run ended:
//
//   # stop=<max_iterations|width_below_threshold|no_candidates|evaluator_failure|none>
//   # failure=<message, empty on success>

namespace safeopt_mc::io {

inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ContractViolation("trace CSV: cannot parse number '" + s + "'");
  }
  return v;
}

inline long long parse_integer(const std::string& s) {
  long long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ContractViolation("trace CSV: cannot parse integer '" + s + "'");
  }
  return v;
}

struct TraceShape {
  Eigen::Index parameter_dim = 0;
  Eigen::Index context_dim = 0;
  int outputs = 0;
};

inline std::string trace_header(const TraceShape& s) {
  std::ostringstream h;
  h << "n,point";
  for (Eigen::Index k = 0; k < s.parameter_dim; ++k) h << ",a_" << k;
  for (Eigen::Index k = 0; k < s.context_dim; ++k) h << ",z_" << k;
  h << ",output,width";
  for (int i = 0; i < s.outputs; ++i) h << ",y_" << i;
  h << ",safe_size,maximizer_size,expander_size,best_point";
  for (Eigen::Index k = 0; k < s.parameter_dim; ++k) h << ",best_" << k;
  h << ",best_lower,misspecifications,violation,failed,oracle_gap";
  return h.str();
}

inline StopReason stop_reason_from_string(const std::string& s) {
  for (auto r : {StopReason::None, StopReason::MaxIterations, StopReason::WidthBelowThreshold,
                 StopReason::NoCandidates, StopReason::EvaluatorFailure}) {
    if (to_string(r) == s) return r;
  }
  throw ContractViolation("trace CSV: unknown stop reason '" + s + "'");
}

inline void write_trace(std::ostream& out, const RunTrace& trace, const TraceShape& shape) {
  out << trace_header(shape) << '\n';
  for (const auto& e : trace.entries) {
    if (e.parameter.size() != shape.parameter_dim || e.context.size() != shape.context_dim ||
        static_cast<int>(e.observations.size()) != shape.outputs || e.best.size() != shape.parameter_dim) {
      throw ContractViolation("trace entry does not match the CSV shape");
    }
    out << e.iteration << ',' << e.point;
    for (Eigen::Index k = 0; k < e.parameter.size(); ++k) out << ',' << format_double(e.parameter[k]);
    for (Eigen::Index k = 0; k < e.context.size(); ++k) out << ',' << format_double(e.context[k]);
    out << ',' << e.output << ',' << format_double(e.width);
    for (double y : e.observations) out << ',' << format_double(y);
    out << ',' << e.safe_size << ',' << e.maximizer_size << ',' << e.expander_size << ',' << e.best_point;
    for (Eigen::Index k = 0; k < e.best.size(); ++k) out << ',' << format_double(e.best[k]);
    out << ',' << format_double(e.best_lower) << ',' << e.misspecifications << ',' << (e.violation ? 1 : 0) << ','
        << (e.failed ? 1 : 0) << ',' << format_double(e.oracle_gap) << '\n';
  }
  std::string failure = trace.failure;
  for (char& ch : failure) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  out << "# stop=" << to_string(trace.stop) << '\n';
  out << "# failure=" << failure << '\n';
}

namespace detail {

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

/// Parses a trace written by write_trace; the shape is recovered from the header.
inline RunTrace read_trace(std::istream& in, TraceShape* shape_out = nullptr) {
  std::string line;
  if (!std::getline(in, line)) throw ContractViolation("trace CSV: missing header");
  const auto header = detail::split(line);
  TraceShape shape;
  for (const auto& h : header) {
    if (h.rfind("a_", 0) == 0) ++shape.parameter_dim;
    if (h.rfind("z_", 0) == 0) ++shape.context_dim;
    if (h.rfind("y_", 0) == 0) ++shape.outputs;
  }
  if (trace_header(shape) != line) throw ContractViolation("trace CSV: unexpected header");

  RunTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# stop=", 0) == 0) {
      trace.stop = stop_reason_from_string(line.substr(7));
      continue;
    }
    if (line.rfind("# failure=", 0) == 0) {
      trace.failure = line.substr(10);
      continue;
    }
    const auto cells = detail::split(line);
    if (cells.size() != header.size()) throw ContractViolation("trace CSV: wrong number of cells");
    std::size_t c = 0;
    TraceEntry e;
    e.iteration = static_cast<int>(parse_integer(cells[c++]));
    e.point = static_cast<std::size_t>(parse_integer(cells[c++]));
    e.parameter.resize(shape.parameter_dim);
    for (Eigen::Index k = 0; k < shape.parameter_dim; ++k) e.parameter[k] = parse_double(cells[c++]);
    e.context.resize(shape.context_dim);
    for (Eigen::Index k = 0; k < shape.context_dim; ++k) e.context[k] = parse_double(cells[c++]);
    e.output = static_cast<int>(parse_integer(cells[c++]));
    e.width = parse_double(cells[c++]);
    for (int i = 0; i < shape.outputs; ++i) e.observations.push_back(parse_double(cells[c++]));
    e.safe_size = static_cast<std::size_t>(parse_integer(cells[c++]));
    e.maximizer_size = static_cast<std::size_t>(parse_integer(cells[c++]));
    e.expander_size = static_cast<std::size_t>(parse_integer(cells[c++]));
    e.best_point = static_cast<std::size_t>(parse_integer(cells[c++]));
    e.best.resize(shape.parameter_dim);
    for (Eigen::Index k = 0; k < shape.parameter_dim; ++k) e.best[k] = parse_double(cells[c++]);
    e.best_lower = parse_double(cells[c++]);
    e.misspecifications = static_cast<std::size_t>(parse_integer(cells[c++]));
    e.violation = parse_integer(cells[c++]) != 0;
    e.failed = parse_integer(cells[c++]) != 0;
    e.oracle_gap = parse_double(cells[c++]);
    trace.entries.push_back(std::move(e));
  }
  if (shape_out) *shape_out = shape;
  return trace;
}

}  // namespace safeopt_mc::io
