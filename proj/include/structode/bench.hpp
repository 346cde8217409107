#pragma once
// Benchmark harness: runs a named problem over a list of grids with one
// scheme, reports the per-derivative-order terminal errors E_N, the observed
// orders O between consecutive grids, and the mean sweep count per step.
//
// Problems with a closed form are measured against it (derivatives obtained
// by lifting the exact terminal value through the right-hand side).  The
// remaining problems are measured against a cached self-reference trace
// produced once per precision by a maximal-order run (K=4, R=8) on a finer
// grid; the cache lives on disk and is written atomically.

#include "structode/jets.hpp"
#include "structode/problems.hpp"
#include "structode/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace structode::bench {

using jets::Jet;
using jets::OdeProblem;
using solver::Precision;
using structural::SchemeId;

/// Spec validation failed (unknown problem, grid not a block multiple...).
struct InvalidSpec : Error {
  using Error::Error;
};

/// A self-reference problem was queried before its reference trace existed.
struct NoReference : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Spec and rows
// ---------------------------------------------------------------------------

struct BenchmarkSpec {
  std::string name;                 // one of problems::names()
  SchemeId scheme{1, 1};
  std::vector<long long> grids;     // each a positive multiple of scheme.R
  double eps = 1e-12;               // fixed-point stop tolerance
  Precision precision = Precision::f64;
  std::vector<int> orders;          // derivative orders to report; empty = 0..K
  int component = 0;                // reported component (complex pairs ignore it)

  [[nodiscard]] std::vector<int> reported_orders() const {
    if (!orders.empty()) return orders;
    std::vector<int> all(static_cast<std::size_t>(scheme.K) + 1);
    for (int k = 0; k <= scheme.K; ++k) all[static_cast<std::size_t>(k)] = k;
    return all;
  }

  void validate() const {
    if (!problems::is_known(name)) throw InvalidSpec("unknown problem: " + name);
    if (grids.empty()) throw InvalidSpec("at least one grid is required");
    for (long long n : grids)
      if (n <= 0 || n % scheme.R != 0)
        throw InvalidSpec("grid " + std::to_string(n) +
                          " is not a positive multiple of R=" +
                          std::to_string(scheme.R));
    if (!(eps > 0)) throw InvalidSpec("eps must be positive");
    for (int k : orders)
      if (k < 0 || k > scheme.K)
        throw InvalidSpec("reported order " + std::to_string(k) +
                          " outside 0..K");
  }
};

struct ConvergenceRow {
  long long n = 0;
  double kappa_bar = 0.0;
  bool converged = true;
  std::vector<double> errors;  // one per reported order; NaN when !converged
};

// ---------------------------------------------------------------------------
// Reference traces (self-reference problems)
// ---------------------------------------------------------------------------

/// Generation recipe for a problem's reference trace: a maximal-order scheme
/// on a grid finer than any published row for that problem.
struct ReferenceRecipe {
  SchemeId scheme{4, 8};
  long long n = 0;
  double eps = 1e-13;
};

[[nodiscard]] inline ReferenceRecipe reference_recipe(const std::string& name,
                                                      Precision precision) {
  if (!problems::is_self_reference(name))
    throw InvalidSpec("no reference recipe: " + name + " has a closed form");
  ReferenceRecipe r;
  r.eps = (precision == Precision::ext256) ? 1e-60 : 1e-13;
  r.n = 800000;  // the documented "exact solution" grid for these problems
  return r;
}

/// A reference trace loaded from disk.  Values are stored as binary64
/// columns regardless of the generating precision; the header records the
/// mantissa width of the arithmetic that produced them.
struct ReferenceTrace {
  std::string problem;
  int K = 0, R = 0;
  long long n = 0;       // generating grid (number of steps)
  int precision_bits = 0;
  int dim = 0;
  long long stride = 1;  // only every stride-th node is stored
  std::vector<double> times;        // n / stride + 1 retained node times
  std::vector<Jet<double>> states;  // full jets at every retained node
};

[[nodiscard]] inline std::filesystem::path reference_path(
    const std::string& name, Precision precision, const std::string& ref_dir) {
  return std::filesystem::path(ref_dir) /
         (name + "-" + solver::to_string(precision) + ".ref");
}

namespace detail {

inline constexpr char kRefMagic[] = "SREF1";

template <class T>
[[nodiscard]] int mantissa_bits() {
  return std::numeric_limits<T>::digits;
}

template <class T>
void write_reference_file(const std::filesystem::path& path,
                          const std::string& name,
                          const solver::Trace<T>& trace, const SchemeId& id,
                          long long n, int dim, long long stride = 1) {
  if (stride < 1 || n % stride != 0)
    throw Error("reference stride must divide the grid size");
  if (!path.parent_path().empty())
    std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << kRefMagic << ' ' << name << ' ' << id.K << ' ' << id.R << ' ' << n
        << ' ' << mantissa_bits<T>() << ' ' << dim << ' ' << stride << '\n';
    auto put = [&out](double v) {
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    };
    for (std::size_t i = 0; i < trace.times.size();
         i += static_cast<std::size_t>(stride)) {
      put(static_cast<double>(trace.times[i]));
      const Jet<T>& jet = trace.states[i];
      for (int k = 0; k <= id.K; ++k)
        for (int c = 0; c < dim; ++c) put(static_cast<double>(jet.comp[c][k]));
    }
    if (!out) throw Error("write failed on " + tmp.string());
  }
  std::filesystem::rename(tmp, path);  // atomic publish
}

}  // namespace detail

[[nodiscard]] inline ReferenceTrace load_reference(const std::string& name,
                                                   Precision precision,
                                                   const std::string& ref_dir) {
  const std::filesystem::path path = reference_path(name, precision, ref_dir);
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw NoReference("no reference trace for " + name + " at precision " +
                      solver::to_string(precision) + " (expected " +
                      path.string() + ")");
  std::string header;
  if (!std::getline(in, header)) throw Error("truncated header: " + path.string());
  std::istringstream hs(header);
  std::string magic;
  ReferenceTrace ref;
  hs >> magic >> ref.problem >> ref.K >> ref.R >> ref.n >> ref.precision_bits >>
      ref.dim >> ref.stride;
  if (!hs || magic != detail::kRefMagic || ref.problem != name || ref.dim < 1 ||
      ref.K < 0 || ref.n < 1 || ref.stride < 1 || ref.n % ref.stride != 0)
    throw Error("malformed reference header in " + path.string());
  const long long nodes = ref.n / ref.stride + 1;
  ref.times.resize(static_cast<std::size_t>(nodes));
  ref.states.assign(static_cast<std::size_t>(nodes), Jet<double>(ref.dim, ref.K));
  auto get = [&in, &path]() {
    double v;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw Error("truncated reference data in " + path.string());
    return v;
  };
  for (long long i = 0; i < nodes; ++i) {
    ref.times[static_cast<std::size_t>(i)] = get();
    Jet<double>& jet = ref.states[static_cast<std::size_t>(i)];
    for (int k = 0; k <= ref.K; ++k)
      for (int c = 0; c < ref.dim; ++c) jet.comp[c][k] = get();
  }
  return ref;
}

/// Run the recipe and publish the trace to the cache, returning its path.
/// An existing cache entry is reused unless force is set.  The stride thins
/// the stored trace (every stride-th node, endpoints always kept) so the
/// cache stays small; it must divide the recipe grid.
inline std::filesystem::path generate_reference(const std::string& name,
                                                Precision precision,
                                                const std::string& ref_dir,
                                                bool force = false,
                                                long long stride = 100) {
  const std::filesystem::path path = reference_path(name, precision, ref_dir);
  if (!force && std::filesystem::exists(path)) return path;
  const ReferenceRecipe recipe = reference_recipe(name, precision);
  solver::SolverConfig config;
  config.scheme = recipe.scheme;
  config.N = static_cast<int>(recipe.n);
  config.eps = recipe.eps;
  config.max_iters = 500;  // the fine-grid sweeps contract slowly at first
  config.precision = precision;
  if (precision == Precision::ext256) {
    const auto p = problems::make_problem<Ext>(name);
    const auto trace = solver::integrate<Ext>(p, config);
    detail::write_reference_file<Ext>(path, name, trace, recipe.scheme,
                                      recipe.n, p.dim, stride);
  } else {
    const auto p = problems::make_problem<double>(name);
    const auto trace = solver::integrate<double>(p, config);
    detail::write_reference_file<double>(path, name, trace, recipe.scheme,
                                         recipe.n, p.dim, stride);
  }
  return path;
}

// ---------------------------------------------------------------------------
// Benchmark runner
// ---------------------------------------------------------------------------

namespace detail {

/// Exact terminal jet of a closed-form problem: evaluate the solution at the
/// final time and lift it through the right-hand side.
template <class T>
[[nodiscard]] Jet<T> closed_form_terminal_jet(const OdeProblem<T>& p,
                                              int order) {
  return jets::lift_derivatives(p, p.t_end, p.known_solution(p.t_end), order);
}

/// Terminal jet of a self-reference problem, read from the cached trace and
/// widened to the working scalar.
template <class T>
[[nodiscard]] Jet<T> reference_terminal_jet(const std::string& name,
                                            const ReferenceTrace& ref,
                                            const OdeProblem<T>& p, int order) {
  if (ref.K < order)
    throw InvalidSpec("reference trace for " + name + " stores orders 0.." +
                      std::to_string(ref.K) + " but order " +
                      std::to_string(order) + " was requested");
  const double t_end = static_cast<double>(p.t_end);
  const double span = t_end - static_cast<double>(p.t0);
  if (std::abs(ref.times.back() - t_end) >
      1e-9 * std::max(1.0, std::abs(span)))
    throw Error("reference trace for " + name +
                " ends at a different time than the problem definition; "
                "regenerate the cache");
  const Jet<double>& last = ref.states.back();
  Jet<T> jet(p.dim, order);
  for (int c = 0; c < p.dim; ++c)
    for (int k = 0; k <= order; ++k) jet.comp[c][k] = T(last.comp[c][k]);
  return jet;
}

/// Error of one grid run at every reported order: the absolute terminal
/// error of the designated component, or the modulus over the (Re, Im) pair
/// for the complex-pair problems.
template <class T>
[[nodiscard]] std::vector<double> terminal_errors(
    const BenchmarkSpec& spec, const solver::Trace<T>& trace,
    const Jet<T>& exact) {
  using std::sqrt;
  using structode::abs_value;
  const Jet<T>& last = trace.states.back();
  const bool pair = problems::is_complex_pair(spec.name);
  std::vector<double> out;
  for (int k : spec.reported_orders()) {
    if (pair) {
      const T dr = last.comp[0][k] - exact.comp[0][k];
      const T di = last.comp[1][k] - exact.comp[1][k];
      out.push_back(static_cast<double>(sqrt(dr * dr + di * di)));
    } else {
      out.push_back(static_cast<double>(
          abs_value(last.comp[spec.component][k] - exact.comp[spec.component][k])));
    }
  }
  return out;
}

template <class T>
[[nodiscard]] std::vector<ConvergenceRow> run_impl(const BenchmarkSpec& spec,
                                                   const std::string& ref_dir,
                                                   bool auto_generate) {
  const OdeProblem<T> p = problems::make_problem<T>(spec.name);
  if (!problems::is_complex_pair(spec.name) &&
      (spec.component < 0 || spec.component >= p.dim))
    throw InvalidSpec("component " + std::to_string(spec.component) +
                      " outside problem dimension " + std::to_string(p.dim));
  int max_order = 0;
  for (int k : spec.reported_orders()) max_order = std::max(max_order, k);

  Jet<T> exact;
  if (p.known_solution) {
    exact = closed_form_terminal_jet(p, max_order);
  } else {
    if (auto_generate) generate_reference(spec.name, spec.precision, ref_dir);
    const ReferenceTrace ref =
        load_reference(spec.name, spec.precision, ref_dir);
    exact = reference_terminal_jet(spec.name, ref, p, max_order);
  }

  auto run_one = [&spec, &p, &exact](long long n) {
    ConvergenceRow row;
    row.n = n;
    solver::SolverConfig config;
    config.scheme = spec.scheme;
    config.N = static_cast<int>(n);
    config.eps = spec.eps;
    config.precision = spec.precision;
    try {
      const solver::Trace<T> trace = solver::integrate<T>(p, config);
      row.kappa_bar = trace.kappa_bar();
      row.errors = terminal_errors(spec, trace, exact);
      row.converged = true;
    } catch (const numerics::NoConvergence&) {
      row.converged = false;
      row.kappa_bar = 0.0;
      row.errors.assign(spec.reported_orders().size(),
                        std::numeric_limits<double>::quiet_NaN());
    }
    return row;
  };

  // Grid rows are independent; run them concurrently and join in order.
  std::vector<std::future<ConvergenceRow>> futures;
  futures.reserve(spec.grids.size());
  for (long long n : spec.grids)
    futures.push_back(std::async(std::launch::async, run_one, n));
  std::vector<ConvergenceRow> rows;
  rows.reserve(spec.grids.size());
  for (auto& f : futures) rows.push_back(f.get());
  return rows;
}

}  // namespace detail

[[nodiscard]] inline std::vector<ConvergenceRow> run_benchmark(
    const BenchmarkSpec& spec, const std::string& ref_dir = "refs",
    bool auto_generate = true) {
  spec.validate();
  if (spec.precision == Precision::ext256)
    return detail::run_impl<Ext>(spec, ref_dir, auto_generate);
  return detail::run_impl<double>(spec, ref_dir, auto_generate);
}

// ---------------------------------------------------------------------------
// Table emission
// ---------------------------------------------------------------------------

enum class Format { csv, markdown };

namespace detail {

[[nodiscard]] inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

/// The O cell between a row and its predecessor.  "---" opens a table,
/// "!!!" marks a row whose run failed, the up marker flags a non-decreasing
/// error (including any error following a failed row), and otherwise the
/// observed order |log(E1/E2)| / |log(N1/N2)| is printed with one decimal.
[[nodiscard]] inline std::string order_cell(const ConvergenceRow* prev,
                                            const ConvergenceRow& cur,
                                            std::size_t j, bool ascii) {
  const char* up = ascii ? "up" : "↑";
  if (!cur.converged) return "!!!";
  if (prev == nullptr) return "---";
  const double e_cur = cur.errors[j];
  if (!prev->converged) return up;
  const double e_prev = prev->errors[j];
  if (!(e_prev > 0) || !std::isfinite(e_cur)) return "---";
  if (e_cur >= e_prev) return up;
  if (!(e_cur > 0)) return "---";
  const double order = std::abs(std::log(e_prev / e_cur)) /
                       std::abs(std::log(static_cast<double>(prev->n) /
                                         static_cast<double>(cur.n)));
  return fmt("%.1f", order);
}

}  // namespace detail

/// Render rows as CSV (`N,E0,O0,...,kappa_bar`, byte-stable and
/// parse-exact) or as a markdown table mirroring the published layout.
/// `orders` labels the error columns; empty means 0,1,2,...
[[nodiscard]] inline std::string emit_table(
    const std::vector<ConvergenceRow>& rows, Format format,
    std::vector<int> orders = {}) {
  if (rows.empty()) throw Error("emit_table: no rows");
  const std::size_t m = rows.front().errors.size();
  for (const auto& r : rows)
    if (r.errors.size() != m) throw Error("emit_table: ragged rows");
  if (orders.empty())
    for (std::size_t j = 0; j < m; ++j) orders.push_back(static_cast<int>(j));
  if (orders.size() != m) throw Error("emit_table: orders/errors mismatch");

  std::ostringstream out;
  if (format == Format::csv) {
    out << "N";
    for (int k : orders) out << ",E" << k << ",O" << k;
    out << ",kappa_bar\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const ConvergenceRow& r = rows[i];
      const ConvergenceRow* prev = (i == 0) ? nullptr : &rows[i - 1];
      out << r.n;
      for (std::size_t j = 0; j < m; ++j) {
        out << ',' << (r.converged ? detail::fmt("%.17g", r.errors[j]) : "0");
        out << ',' << detail::order_cell(prev, r, j, /*ascii=*/true);
      }
      out << ',' << detail::fmt("%.17g", r.kappa_bar) << '\n';
    }
    return out.str();
  }

  out << "| N | kappa |";
  for (int k : orders) out << " E phi^(" << k << ") | O |";
  out << '\n';
  out << "|---:|---:|";
  for (std::size_t j = 0; j < m; ++j) out << "---:|---:|";
  out << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ConvergenceRow& r = rows[i];
    const ConvergenceRow* prev = (i == 0) ? nullptr : &rows[i - 1];
    out << "| " << r.n << " | " << detail::fmt("%.2f", r.kappa_bar) << " |";
    for (std::size_t j = 0; j < m; ++j) {
      out << ' ' << (r.converged ? detail::fmt("%.2E", r.errors[j]) : "0")
          << " | " << detail::order_cell(prev, r, j, /*ascii=*/false) << " |";
    }
    out << '\n';
  }
  return out.str();
}

struct ParsedTable {
  std::vector<int> orders;
  std::vector<ConvergenceRow> rows;
};

/// Inverse of the CSV emitter: recovers rows (and the order labels) from
/// emit_table(..., Format::csv) output.
[[nodiscard]] inline ParsedTable parse_table(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw Error("parse_table: empty input");
  ParsedTable table;
  {
    std::istringstream hs(line);
    std::string field;
    if (!std::getline(hs, field, ',') || field != "N")
      throw Error("parse_table: header must start with N");
    std::vector<std::string> fields;
    while (std::getline(hs, field, ',')) fields.push_back(field);
    if (fields.empty() || fields.back() != "kappa_bar")
      throw Error("parse_table: header must end with kappa_bar");
    fields.pop_back();
    if (fields.size() % 2 != 0) throw Error("parse_table: odd header arity");
    for (std::size_t j = 0; j < fields.size(); j += 2) {
      if (fields[j].size() < 2 || fields[j][0] != 'E')
        throw Error("parse_table: bad error column " + fields[j]);
      table.orders.push_back(std::stoi(fields[j].substr(1)));
    }
  }
  const std::size_t m = table.orders.size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    ConvergenceRow row;
    if (!std::getline(ls, field, ',')) throw Error("parse_table: bad row");
    row.n = std::stoll(field);
    row.converged = true;
    std::vector<std::string> o_cells;
    for (std::size_t j = 0; j < m; ++j) {
      if (!std::getline(ls, field, ',')) throw Error("parse_table: short row");
      row.errors.push_back(std::strtod(field.c_str(), nullptr));
      if (!std::getline(ls, field, ',')) throw Error("parse_table: short row");
      o_cells.push_back(field);
    }
    if (!std::getline(ls, field, ',')) throw Error("parse_table: short row");
    row.kappa_bar = std::strtod(field.c_str(), nullptr);
    for (std::size_t j = 0; j < m; ++j)
      if (o_cells[j] == "!!!") {
        row.converged = false;
        row.errors.assign(m, std::numeric_limits<double>::quiet_NaN());
        break;
      }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw Error("parse_table: no data rows");
  return table;
}

// ---------------------------------------------------------------------------
// Reference values at a point
// ---------------------------------------------------------------------------

/// The reference state vector of a named problem at time t: the closed-form
/// solution evaluated at the working precision, or an interpolation-free
/// node lookup in the cached self-reference trace.
[[nodiscard]] inline std::vector<double> reference_solution(
    const std::string& name, double t, Precision precision,
    const std::string& ref_dir = "refs") {
  if (!problems::is_known(name)) throw InvalidSpec("unknown problem: " + name);
  if (!problems::is_self_reference(name)) {
    if (precision == Precision::ext256) {
      const auto p = problems::make_problem<Ext>(name);
      const std::vector<Ext> v = p.known_solution(Ext(t));
      std::vector<double> out;
      out.reserve(v.size());
      for (const Ext& x : v) out.push_back(static_cast<double>(x));
      return out;
    }
    const auto p = problems::make_problem<double>(name);
    return p.known_solution(t);
  }
  const ReferenceTrace ref = load_reference(name, precision, ref_dir);
  const double dt = (ref.times.back() - ref.times.front()) /
                    static_cast<double>(ref.n);
  for (std::size_t i = 0; i < ref.times.size(); ++i) {
    if (std::abs(ref.times[i] - t) <= 1e-9 * std::max(1.0, std::abs(dt))) {
      std::vector<double> out(static_cast<std::size_t>(ref.dim));
      for (int c = 0; c < ref.dim; ++c)
        out[static_cast<std::size_t>(c)] = ref.states[i].comp[c][0];
      return out;
    }
  }
  throw Error("reference_solution: t=" + std::to_string(t) +
              " is not a node of the cached trace (no interpolation)");
}

}  // namespace structode::bench
