#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "structode/bench.hpp"

using namespace structode;
using namespace structode::bench;
using solver::Precision;

namespace {

/// A scratch directory unique to this test binary run, removed on teardown.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("structode-test-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  [[nodiscard]] std::string str() const { return path.string(); }
};

/// Tiny deterministic trace used to exercise the cache file format without
/// paying for a real reference run.
solver::Trace<double> toy_trace(int n, int dim, int order) {
  solver::Trace<double> t;
  for (int i = 0; i <= n; ++i) {
    t.times.push_back(0.25 * i);
    jets::Jet<double> jet(dim, order);
    for (int c = 0; c < dim; ++c)
      for (int k = 0; k <= order; ++k)
        jet.comp[c][k] = 1.0 + i + 0.125 * c + 0.5 * k;
    t.states.push_back(jet);
  }
  t.block_iters.assign(static_cast<std::size_t>(n), 1);
  return t;
}

}  // namespace

TEST_CASE("benchmark spec validation") {
  BenchmarkSpec s;
  s.name = "ode1";
  s.scheme = {1, 2};
  s.grids = {60, 120};
  CHECK_NOTHROW(s.validate());

  BenchmarkSpec bad = s;
  bad.name = "ode9";
  CHECK_THROWS_AS(bad.validate(), InvalidSpec);

  bad = s;
  bad.grids = {61};  // not a multiple of R=2
  CHECK_THROWS_AS(bad.validate(), InvalidSpec);

  bad = s;
  bad.grids = {0};
  CHECK_THROWS_AS(bad.validate(), InvalidSpec);

  bad = s;
  bad.grids.clear();
  CHECK_THROWS_AS(bad.validate(), InvalidSpec);

  bad = s;
  bad.eps = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidSpec);

  bad = s;
  bad.orders = {0, 2};  // K=1 stores orders 0..1
  CHECK_THROWS_AS(bad.validate(), InvalidSpec);

  bad = s;
  bad.component = 7;  // ode1 is one-dimensional
  CHECK_THROWS_AS((void)run_benchmark(bad), InvalidSpec);
}

TEST_CASE("reference cache file round-trips through disk") {
  TempDir dir("cache");
  const auto trace = toy_trace(6, 2, 3);
  const structural::SchemeId id(3, 3);

  SUBCASE("full resolution") {
    const auto path = reference_path("ode5a", Precision::f64, dir.str());
    detail::write_reference_file<double>(path, "ode5a", trace, id, 6, 2);
    const ReferenceTrace ref = load_reference("ode5a", Precision::f64, dir.str());
    CHECK(ref.problem == "ode5a");
    CHECK(ref.K == 3);
    CHECK(ref.R == 3);
    CHECK(ref.n == 6);
    CHECK(ref.dim == 2);
    CHECK(ref.stride == 1);
    REQUIRE(ref.times.size() == 7);
    CHECK(ref.times[3] == trace.times[3]);
    CHECK(ref.states[5].comp[1][2] == trace.states[5].comp[1][2]);
  }

  SUBCASE("stride thinning keeps endpoints") {
    const auto path = reference_path("ode5a", Precision::f64, dir.str());
    detail::write_reference_file<double>(path, "ode5a", trace, id, 6, 2,
                                         /*stride=*/3);
    const ReferenceTrace ref = load_reference("ode5a", Precision::f64, dir.str());
    CHECK(ref.stride == 3);
    REQUIRE(ref.times.size() == 3);  // nodes 0, 3, 6
    CHECK(ref.times.front() == trace.times.front());
    CHECK(ref.times.back() == trace.times.back());
    CHECK(ref.states[1].comp[0][0] == trace.states[3].comp[0][0]);
  }

  SUBCASE("stride must divide the grid") {
    const auto path = reference_path("ode5a", Precision::f64, dir.str());
    CHECK_THROWS_AS(detail::write_reference_file<double>(path, "ode5a", trace,
                                                         id, 6, 2, 4),
                    Error);
  }

  SUBCASE("missing file reports NoReference") {
    CHECK_THROWS_AS((void)load_reference("ode7", Precision::f64, dir.str()),
                    NoReference);
  }

  SUBCASE("header corruption is rejected") {
    const auto path = reference_path("ode5a", Precision::f64, dir.str());
    detail::write_reference_file<double>(path, "ode5a", trace, id, 6, 2);
    {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out << "SREF9 ode5a 3 3 6 53 2 1\n";
    }
    CHECK_THROWS_AS((void)load_reference("ode5a", Precision::f64, dir.str()), Error);
  }

  SUBCASE("truncated payload is rejected") {
    const auto path = reference_path("ode5a", Precision::f64, dir.str());
    detail::write_reference_file<double>(path, "ode5a", trace, id, 6, 2);
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
    CHECK_THROWS_AS((void)load_reference("ode5a", Precision::f64, dir.str()), Error);
  }
}

TEST_CASE("self-reference runs demand a cache when generation is off") {
  TempDir dir("noref");
  BenchmarkSpec s;
  s.name = "ode5a";
  s.scheme = {1, 1};
  s.grids = {480};
  CHECK_THROWS_AS((void)run_benchmark(s, dir.str(), /*auto_generate=*/false),
                  NoReference);
}

TEST_CASE("reference_solution evaluates the stated closed forms") {
  // e^{-1}
  const auto v1 = reference_solution("ode1", 1.0, Precision::f64);
  REQUIRE(v1.size() == 1);
  CHECK(v1[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

  // -1/(1+e)
  const auto v3a = reference_solution("ode3a", 1.0, Precision::ext256);
  REQUIRE(v3a.size() == 1);
  CHECK(v3a[0] == doctest::Approx(-1.0 / (1.0 + std::exp(1.0))).epsilon(1e-15));

  // 1/(1 - 0.95) = 20
  const auto v3c = reference_solution("ode3c", 0.95, Precision::f64);
  REQUIRE(v3c.size() == 1);
  CHECK(v3c[0] == doctest::Approx(20.0).epsilon(1e-12));

  CHECK_THROWS_AS((void)reference_solution("nope", 0.5, Precision::f64), InvalidSpec);
}

TEST_CASE("reference_solution looks up cached nodes without interpolating") {
  TempDir dir("lookup");
  const auto trace = toy_trace(6, 2, 4);
  const auto path = reference_path("ode7", Precision::f64, dir.str());
  detail::write_reference_file<double>(path, "ode7", trace, {4, 8}, 6, 2);

  const auto v = reference_solution("ode7", 0.75, Precision::f64, dir.str());
  REQUIRE(v.size() == 2);
  CHECK(v[0] == trace.states[3].comp[0][0]);
  CHECK(v[1] == trace.states[3].comp[1][0]);

  // Between nodes: refuse rather than interpolate.
  CHECK_THROWS_AS((void)reference_solution("ode7", 0.6, Precision::f64, dir.str()),
                  Error);
  // Empty cache dir: nothing to look up.
  CHECK_THROWS_AS((void)reference_solution("ode5b", 0.0, Precision::f64, dir.str()),
                  NoReference);
}

TEST_CASE("ode1 reproduces the catalogued K=1 R=4 errors in ext precision") {
  BenchmarkSpec s;
  s.name = "ode1";
  s.scheme = {1, 4};
  s.grids = {60, 120};
  s.eps = 1e-20;
  s.precision = Precision::ext256;
  s.orders = {0};
  const auto rows = run_benchmark(s);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].converged);
  CHECK(rows[0].errors[0] == doctest::Approx(1.00e-13).epsilon(0.01));
  CHECK(detail::order_cell(&rows[0], rows[1], 0, true) == "6.0");
}

TEST_CASE("ode3c and ode4 reproduce their catalogued cells in double") {
  {
    BenchmarkSpec s;
    s.name = "ode3c";
    s.scheme = {2, 2};
    s.grids = {120, 240};
    s.eps = 1e-14;
    s.orders = {0};
    const auto rows = run_benchmark(s);
    CHECK(rows[1].errors[0] == doctest::Approx(5.16e-07).epsilon(0.01));
    CHECK(detail::order_cell(&rows[0], rows[1], 0, true) == "5.9");
  }
  {
    BenchmarkSpec s;
    s.name = "ode4";
    s.scheme = {2, 1};
    s.grids = {60, 120};
    s.eps = 1e-14;
    s.orders = {0};
    const auto rows = run_benchmark(s);
    CHECK(rows[0].errors[0] == doctest::Approx(4.14e-07).epsilon(0.01));
    CHECK(detail::order_cell(&rows[0], rows[1], 0, true) == "4.0");
  }
}

TEST_CASE("complex-pair problems report the modulus error") {
  BenchmarkSpec s;
  s.name = "ode2a";
  s.scheme = {2, 2};
  s.grids = {60};
  s.eps = 1e-14;
  s.orders = {0};
  const auto rows = run_benchmark(s);
  CHECK(rows[0].errors[0] == doctest::Approx(8.75e-10).epsilon(0.01));
}

TEST_CASE("mean iteration count matches the catalogued ode1 cell") {
  BenchmarkSpec s;
  s.name = "ode1";
  s.scheme = {1, 2};
  s.grids = {60};
  s.eps = 1e-20;
  s.precision = Precision::ext256;
  s.orders = {0};
  const auto rows = run_benchmark(s);
  CHECK(rows[0].kappa_bar == doctest::Approx(5.00).epsilon(0.2));
}

TEST_CASE("order cells follow the published table conventions") {
  ConvergenceRow a;
  a.n = 60;
  a.converged = true;
  a.errors = {1e-4};
  ConvergenceRow b;
  b.n = 120;
  b.converged = true;
  b.errors = {1e-4 / 16.0};

  CHECK(detail::order_cell(nullptr, a, 0, true) == "---");
  CHECK(detail::order_cell(&a, b, 0, true) == "4.0");

  ConvergenceRow worse = b;
  worse.errors = {2e-4};  // not decreasing
  CHECK(detail::order_cell(&a, worse, 0, true) == "up");
  CHECK(detail::order_cell(&a, worse, 0, false) == "↑");

  ConvergenceRow failed;
  failed.n = 120;
  failed.converged = false;
  failed.errors = {std::numeric_limits<double>::quiet_NaN()};
  CHECK(detail::order_cell(&a, failed, 0, true) == "!!!");
  // A row after a failure cannot quote an order.
  CHECK(detail::order_cell(&failed, b, 0, true) == "up");
}

TEST_CASE("csv emission is byte-stable and parse-exact") {
  BenchmarkSpec s;
  s.name = "ode1";
  s.scheme = {1, 1};
  s.grids = {20, 40};
  s.eps = 1e-14;
  s.orders = {0, 1};
  const auto rows = run_benchmark(s);

  const std::string csv1 = emit_table(rows, Format::csv, s.orders);
  const std::string csv2 = emit_table(rows, Format::csv, s.orders);
  CHECK(csv1 == csv2);
  CHECK(csv1.substr(0, csv1.find('\n')) == "N,E0,O0,E1,O1,kappa_bar");

  const ParsedTable back = parse_table(csv1);
  REQUIRE(back.rows.size() == rows.size());
  CHECK(back.orders == s.orders);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back.rows[i].n == rows[i].n);
    CHECK(back.rows[i].converged == rows[i].converged);
    CHECK(back.rows[i].kappa_bar == rows[i].kappa_bar);  // %.17g round-trip
    for (std::size_t j = 0; j < rows[i].errors.size(); ++j)
      CHECK(back.rows[i].errors[j] == rows[i].errors[j]);
  }
}

TEST_CASE("markdown emission mirrors the published layout") {
  ConvergenceRow a;
  a.n = 60;
  a.converged = true;
  a.kappa_bar = 9.0;
  a.errors = {6.31e-10};
  ConvergenceRow b;
  b.n = 120;
  b.converged = false;
  b.kappa_bar = 0.0;
  b.errors = {std::numeric_limits<double>::quiet_NaN()};

  const std::string md = emit_table({a, b}, Format::markdown, {0});
  CHECK(md.find("| N | kappa | E phi^(0) | O |") == 0);
  CHECK(md.find("6.31E-10") != std::string::npos);
  CHECK(md.find("---") != std::string::npos);  // first O cell
  CHECK(md.find("!!!") != std::string::npos);  // failed second row
  // Failed rows print a literal 0 error like the published tables.
  CHECK(md.find("| 0 | !!! |") != std::string::npos);
}

TEST_CASE("emit_table rejects malformed inputs") {
  CHECK_THROWS_AS((void)emit_table({}, Format::csv), Error);

  ConvergenceRow a;
  a.n = 10;
  a.converged = true;
  a.errors = {1.0, 2.0};
  ConvergenceRow ragged;
  ragged.n = 20;
  ragged.converged = true;
  ragged.errors = {1.0};
  CHECK_THROWS_AS((void)emit_table({a, ragged}, Format::csv), Error);
  CHECK_THROWS_AS((void)emit_table({a}, Format::csv, {0}), Error);  // arity mismatch
}

TEST_CASE("parse_table rejects malformed text") {
  CHECK_THROWS_AS((void)parse_table(""), Error);
  CHECK_THROWS_AS((void)parse_table("X,E0,O0,kappa_bar\n"), Error);
  CHECK_THROWS_AS((void)parse_table("N,E0,O0\n10,1.0,---\n"), Error);
  CHECK_THROWS_AS((void)parse_table("N,E0,O0,kappa_bar\n"), Error);
  CHECK_THROWS_AS((void)parse_table("N,E0,O0,kappa_bar\n10,1.0\n"), Error);
}

TEST_CASE("failed rows round-trip through csv as divergence markers") {
  ConvergenceRow ok;
  ok.n = 300;
  ok.converged = true;
  ok.kappa_bar = 9.88;
  ok.errors = {7.25e-07};
  ConvergenceRow bad;
  bad.n = 240;
  bad.converged = false;
  bad.kappa_bar = 0.0;
  bad.errors = {std::numeric_limits<double>::quiet_NaN()};

  const std::string csv = emit_table({bad, ok}, Format::csv, {0});
  CHECK(csv.find("240,0,!!!") != std::string::npos);
  CHECK(csv.find("300,") != std::string::npos);
  CHECK(csv.find(",up,") != std::string::npos);  // row after a failure

  const ParsedTable back = parse_table(csv);
  REQUIRE(back.rows.size() == 2);
  CHECK_FALSE(back.rows[0].converged);
  CHECK(std::isnan(back.rows[0].errors[0]));
  CHECK(back.rows[1].converged);
  CHECK(back.rows[1].errors[0] == 7.25e-07);
}
