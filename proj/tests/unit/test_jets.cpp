#include <doctest.h>

#include <cmath>
#include <vector>

#include "structode/jets.hpp"

using namespace structode;
using namespace structode::jets;

TEST_CASE("series products carry binomial weights") {
  // h(t) = t^2 * sin(t): h' = 2t sin + t^2 cos, h'' = 2 sin + 4t cos - t^2 sin.
  const double t = 0.7;
  const auto tt = Series<double>::variable(t, 3);
  const auto h = tt * tt * jets::sin(tt);
  CHECK(h[0] == doctest::Approx(t * t * std::sin(t)));
  CHECK(h[1] == doctest::Approx(2 * t * std::sin(t) + t * t * std::cos(t)));
  CHECK(h[2] == doctest::Approx(2 * std::sin(t) + 4 * t * std::cos(t) -
                                t * t * std::sin(t)));
  CHECK(h[3] == doctest::Approx(6 * std::cos(t) - 6 * t * std::sin(t) -
                                t * t * std::cos(t)));
}

TEST_CASE("series division inverts multiplication") {
  const auto tt = Series<double>::variable(0.3, 5);
  const auto a = jets::exp(tt) + 2.0;
  const auto b = jets::cos(tt) + 3.0;
  const auto q = a / b;
  const auto back = q * b;
  for (int k = 0; k <= 5; ++k) CHECK(back[k] == doctest::Approx(a[k]));
  CHECK_THROWS_AS((void)(a / Series<double>::variable(0.0, 5)), DomainError);
}

TEST_CASE("exp series matches the analytic derivatives of exp(t^2)") {
  // g = exp(t^2): g' = 2t g, g'' = (2 + 4t^2) g, g''' = (12t + 8t^3) g.
  const double t = 0.5;
  const auto tt = Series<double>::variable(t, 3);
  const auto g = jets::exp(tt * tt);
  const double g0 = std::exp(t * t);
  CHECK(g[0] == doctest::Approx(g0));
  CHECK(g[1] == doctest::Approx(2 * t * g0));
  CHECK(g[2] == doctest::Approx((2 + 4 * t * t) * g0));
  CHECK(g[3] == doctest::Approx((12 * t + 8 * t * t * t) * g0));
}

TEST_CASE("log series inverts exp and guards its domain") {
  const auto tt = Series<double>::variable(0.4, 6);
  const auto f = jets::exp(tt) + 1.0;
  const auto l = jets::log(f);
  const auto back = jets::exp(l);
  for (int k = 0; k <= 6; ++k) CHECK(back[k] == doctest::Approx(f[k]));
  CHECK_THROWS_AS((void)jets::log(Series<double>::constant(-1.0, 3)),
                  DomainError);
  CHECK_THROWS_AS((void)jets::log(Series<double>::variable(0.0, 3)),
                  DomainError);
}

TEST_CASE("sin and cos stay on the circle order by order") {
  const auto tt = Series<double>::variable(1.1, 5);
  const auto f = tt * tt + 0.3;
  Series<double> s, c;
  sin_cos(f, s, c);
  const auto circle = s * s + c * c;
  CHECK(circle[0] == doctest::Approx(1.0));
  for (int k = 1; k <= 5; ++k) CHECK(circle[k] == doctest::Approx(0.0));
}

TEST_CASE("pow handles positive and negative exponents") {
  const auto tt = Series<double>::variable(0.9, 4);
  const auto p3 = jets::pow(tt, 3);
  CHECK(p3[0] == doctest::Approx(0.9 * 0.9 * 0.9));
  CHECK(p3[1] == doctest::Approx(3 * 0.9 * 0.9));
  const auto pm2 = jets::pow(tt + 1.0, -2);
  // (1+t)^-2: value (1.9)^-2, derivative -2 (1.9)^-3.
  CHECK(pm2[0] == doctest::Approx(std::pow(1.9, -2)));
  CHECK(pm2[1] == doctest::Approx(-2 * std::pow(1.9, -3)));
}

TEST_CASE("lift reproduces the exponential decay jet") {
  OdeProblem<double> p;
  p.dim = 1;
  p.rhs = [](const std::vector<Series<double>>& y, const Series<double>&) {
    return std::vector<Series<double>>{-y[0]};
  };
  const double t = 0.25;
  const double y = std::exp(-t);
  const auto jet = lift_derivatives(p, t, {y}, 6);
  for (int k = 0; k <= 6; ++k)
    CHECK(jet.comp[0][k] == doctest::Approx((k % 2 == 0 ? y : -y)));
}

TEST_CASE("lift handles coupled components") {
  // x' = y, y' = -x from (1, 0): x = cos t, y = -sin t at t = 0.
  OdeProblem<double> p;
  p.dim = 2;
  p.rhs = [](const std::vector<Series<double>>& y, const Series<double>&) {
    return std::vector<Series<double>>{y[1], -y[0]};
  };
  const auto jet = lift_derivatives(p, 0.0, {1.0, 0.0}, 5);
  const double x_expected[] = {1, 0, -1, 0, 1, 0};
  const double y_expected[] = {0, -1, 0, 1, 0, -1};
  for (int k = 0; k <= 5; ++k) {
    CHECK(jet.comp[0][k] == doctest::Approx(x_expected[k]));
    CHECK(jet.comp[1][k] == doctest::Approx(y_expected[k]));
  }
}

TEST_CASE("lift tracks explicit time dependence") {
  // y' = t y with y = exp(t^2 / 2): y'' = (1 + t^2) y, y''' = (3t + t^3) y.
  OdeProblem<double> p;
  p.dim = 1;
  p.rhs = [](const std::vector<Series<double>>& y, const Series<double>& t) {
    return std::vector<Series<double>>{t * y[0]};
  };
  const double t = 1.0;
  const double y = std::exp(0.5);
  const auto jet = lift_derivatives(p, t, {y}, 3);
  CHECK(jet.comp[0][1] == doctest::Approx(t * y));
  CHECK(jet.comp[0][2] == doctest::Approx((1 + t * t) * y));
  CHECK(jet.comp[0][3] == doctest::Approx((3 * t + t * t * t) * y));
}

TEST_CASE("prefix lift leaves supplied orders untouched") {
  OdeProblem<double> p;
  p.dim = 1;
  p.rhs = [](const std::vector<Series<double>>& y, const Series<double>&) {
    return std::vector<Series<double>>{-y[0]};
  };
  Jet<double> jet(1, 4);
  jet.comp[0][0] = 2.0;
  jet.comp[0][1] = 123.0;  // deliberately inconsistent prefix entry
  lift_derivatives_given_prefix(p, 0.0, jet, 1);
  CHECK(jet.comp[0][0] == 2.0);
  CHECK(jet.comp[0][1] == 123.0);
  // Order 2 comes from differentiating f = -y once: y'' = -y' = -123.
  CHECK(jet.comp[0][2] == doctest::Approx(-123.0));
  CHECK(jet.comp[0][3] == doctest::Approx(123.0));
}

TEST_CASE("jet arithmetic agrees with central finite differences") {
  // f(y) = sin(y) + y^2 / (1 + y): compare the order-1 entry of the lifted
  // rhs against a central difference of the rhs value along the solution.
  OdeProblem<double> p;
  p.dim = 1;
  p.rhs = [](const std::vector<Series<double>>& y, const Series<double>&) {
    const auto& u = y[0];
    return std::vector<Series<double>>{jets::sin(u) +
                                       (u * u) / (u + 1.0)};
  };
  const double t = 0.0, y0 = 0.7;
  const auto jet = lift_derivatives(p, t, {y0}, 4);

  // March a tiny explicit step with high-order Taylor to find y(t +/- h),
  // then difference f(y(t+h)) - f(y(t-h)).
  const double h = 1e-4;
  auto taylor = [&](double dt) {
    double acc = 0, fact = 1;
    for (int k = 0; k <= 4; ++k) {
      acc += jet.comp[0][k] * fact;
      fact *= dt / (k + 1);
    }
    return acc;
  };
  auto f_at = [&](double y) {
    return std::sin(y) + y * y / (1 + y);
  };
  const double fd = (f_at(taylor(h)) - f_at(taylor(-h))) / (2 * h);
  CHECK(jet.comp[0][2] == doctest::Approx(fd).epsilon(1e-5));
}
