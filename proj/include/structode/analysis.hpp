#pragma once
// Linear-stability and spectral machinery: the rational amplification
// function chi_R(z), Routh-Hurwitz A-stability verdicts, the unit-circle
// resolution function zeta, phase-deviation tables, Runge-Kutta export, and
// the minimal-grid search.
//
// All algebra on scheme coefficients is exact rational; floating arithmetic
// enters only at the final substitution z = i*omega (double or Ext).

#include "structode/jets.hpp"
#include "structode/numerics.hpp"
#include "structode/solver.hpp"
#include "structode/structural.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace structode::analysis {

using numerics::Complex;
using numerics::DenseMatrix;
using numerics::Poly;
using structural::SchemeId;
using structural::StructuralBasis;

/// det G(z) vanished identically (or at the sampled point).
struct DegenerateDenominator : Error {
  using Error::Error;
};
/// The minimal-grid search hit its cap without a passing N.
struct SearchExhausted : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Transfer functions
// ---------------------------------------------------------------------------

/// chi(z) = num(z)/den(z), normalized so the pair has unit joint content and
/// den(0) > 0.  For every shipped scheme den(z) = num(-z) ("palindromic
/// pair") and deg num = deg den.
struct RationalTransfer {
  Poly<Rational> num;
  Poly<Rational> den;
};

namespace detail {

/// G(z) (in-block columns r=1..R) and b(z) (anchor column) of a basis.
struct TransferSystem {
  DenseMatrix<Poly<Rational>> g;  // R x R
  std::vector<Poly<Rational>> b;  // R
};

[[nodiscard]] inline TransferSystem assemble(const StructuralBasis& basis) {
  const SchemeId& id = basis.id;
  if (id.S != id.R)
    throw Error("transfer_function: requires the S = R solver form");
  TransferSystem sys;
  sys.g = DenseMatrix<Poly<Rational>>(id.R, id.R);
  sys.b.resize(id.R);
  for (int s = 0; s < id.R; ++s)
    for (int r = 0; r <= id.R; ++r) {
      std::vector<Rational> coeffs(id.K + 1);
      for (int k = 0; k <= id.K; ++k) coeffs[k] = basis.coeff(s, k, r);
      Poly<Rational> poly{std::move(coeffs)};
      if (r == 0)
        sys.b[static_cast<std::size_t>(s)] = std::move(poly);
      else
        sys.g(s, r - 1) = std::move(poly);
    }
  return sys;
}

/// Divide num and den by their joint coefficient content and orient the pair
/// so den(0) > 0 (falling back to den's leading coefficient at a root).
inline void normalize_pair(Poly<Rational>& num, Poly<Rational>& den) {
  BigInt num_lcm = 1, den_lcm = 1;
  for (const Rational& c : num.coefficients())
    num_lcm = lcm(num_lcm, denominator(c));
  for (const Rational& c : den.coefficients())
    den_lcm = lcm(den_lcm, denominator(c));
  const BigInt scale_lcm = lcm(num_lcm, den_lcm);
  BigInt content = 0;
  for (const Rational& c : num.coefficients())
    content = gcd(content, numerator(Rational(c * scale_lcm)));
  for (const Rational& c : den.coefficients())
    content = gcd(content, numerator(Rational(c * scale_lcm)));
  if (content == 0) throw DegenerateDenominator("transfer pair is zero");
  Rational factor = Rational(scale_lcm) / Rational(content);
  const Rational den0 = den.degree() >= 0 ? den.coeff(0) : Rational(0);
  const Rational lead =
      den.degree() >= 0 ? den.coeff(static_cast<std::size_t>(den.degree()))
                        : Rational(0);
  const Rational orient = den0 != 0 ? den0 : lead;
  if (orient * factor < 0) factor = -factor;
  num = factor * num;
  den = factor * den;
}

}  // namespace detail

/// All R components of the amplification vector chi(z) = -G(z)^{-1} b(z),
/// computed by Cramer's rule with exact polynomial determinants.  Entry
/// r-1 maps the anchor value to node r (r = 1..R).
[[nodiscard]] inline std::vector<RationalTransfer> transfer_vector(
    const StructuralBasis& basis) {
  const auto sys = detail::assemble(basis);
  const int R = basis.id.R;
  const Poly<Rational> den = numerics::poly_det(sys.g);
  if (den.is_zero())
    throw DegenerateDenominator("transfer_function: det G(z) == 0");
  std::vector<RationalTransfer> out;
  out.reserve(R);
  for (int r = 0; r < R; ++r) {
    DenseMatrix<Poly<Rational>> replaced = sys.g;
    for (int s = 0; s < R; ++s)
      replaced(s, r) = -sys.b[static_cast<std::size_t>(s)];
    RationalTransfer t;
    t.num = numerics::poly_det(replaced);
    t.den = den;
    detail::normalize_pair(t.num, t.den);
    out.push_back(std::move(t));
  }
  return out;
}

/// The principal transfer chi_R(z): anchor-to-last-node amplification.
[[nodiscard]] inline RationalTransfer transfer_function(
    const StructuralBasis& basis) {
  return transfer_vector(basis).back();
}

[[nodiscard]] inline RationalTransfer transfer_function(const SchemeId& id) {
  return transfer_function(structural::scheme_basis(id));
}

// ---------------------------------------------------------------------------
// Routh-Hurwitz / A-stability
// ---------------------------------------------------------------------------

enum class StabilityVerdict { AStable, NotPalindromicForm, MinorNonPositive };

[[nodiscard]] inline std::string to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::AStable:
      return "AStable";
    case StabilityVerdict::NotPalindromicForm:
      return "NotPalindromicForm";
    default:
      return "MinorNonPositive";
  }
}

struct HurwitzReport {
  Poly<Rational> p;               // numerator, oriented to a positive leader
  numerics::DenseMatrix<Rational> h;  // the Hurwitz matrix of p
  std::vector<Rational> minors;   // leading principal minors m_1..m_I
  StabilityVerdict verdict = StabilityVerdict::NotPalindromicForm;
  int bad_minor = -1;             // 1-based index for MinorNonPositive
};

/// Hurwitz matrix of p (ascending coefficients, degree I): with a[0] the
/// leading coefficient, H[i][j] = a[2(j+1)-(i+1)], entries outside [0, I]
/// set to zero.
[[nodiscard]] inline DenseMatrix<Rational> hurwitz_matrix(
    const Poly<Rational>& p) {
  const int deg = p.degree();
  if (deg < 1) throw Error("hurwitz_matrix: degree must be at least 1");
  std::vector<Rational> a(deg + 1);
  for (int i = 0; i <= deg; ++i)
    a[static_cast<std::size_t>(i)] = p.coeff(static_cast<std::size_t>(deg - i));
  DenseMatrix<Rational> h(deg, deg);
  for (int i = 0; i < deg; ++i)
    for (int j = 0; j < deg; ++j) {
      const int idx = 2 * (j + 1) - (i + 1);
      if (idx >= 0 && idx <= deg) h(i, j) = a[static_cast<std::size_t>(idx)];
    }
  return h;
}

/// A-stability via the palindromic form plus Routh-Hurwitz minors: chi is
/// A-stable iff den(z) = num(-z) (so |chi| = 1 on the imaginary axis and the
/// modulus question reduces to root placement) and num is Hurwitz.
[[nodiscard]] inline HurwitzReport a_stability(const RationalTransfer& chi) {
  HurwitzReport report;
  const Poly<Rational> reflected = chi.num.reflected();
  if (!(chi.den == reflected || chi.den == -reflected)) {
    report.verdict = StabilityVerdict::NotPalindromicForm;
    return report;
  }
  report.p = chi.num;
  const int deg = report.p.degree();
  if (deg < 1) {
    // Constant chi: no poles at all; trivially stable.
    report.verdict = StabilityVerdict::AStable;
    return report;
  }
  if (report.p.coeff(static_cast<std::size_t>(deg)) < 0)
    report.p = -report.p;
  report.h = hurwitz_matrix(report.p);
  report.minors.reserve(deg);
  for (int k = 1; k <= deg; ++k) {
    DenseMatrix<Rational> sub(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sub(i, j) = report.h(i, j);
    report.minors.push_back(numerics::exact_determinant(std::move(sub)));
    if (!(report.minors.back() > 0)) {
      report.verdict = StabilityVerdict::MinorNonPositive;
      report.bad_minor = k;
      return report;
    }
  }
  report.verdict = StabilityVerdict::AStable;
  return report;
}

// ---------------------------------------------------------------------------
// Spectral resolution
// ---------------------------------------------------------------------------

/// Evaluate chi at z = i*omega; throws when the denominator is numerically
/// degenerate at the sampled point.
template <class T>
[[nodiscard]] Complex<T> eval_transfer(const RationalTransfer& chi,
                                       const T& omega) {
  using std::abs;
  const Complex<T> z = Complex<T>::i_times(omega);
  const Complex<T> den = numerics::eval_poly(chi.den, z);
  // Scale of the evaluation: sum |c_i| |omega|^i bounds roundoff growth.
  T scale(0), w(1);
  const T aw = abs_value(omega);
  for (int i = 0; i <= chi.den.degree(); ++i) {
    scale += abs_value(to_scalar<T>(chi.den.coeff(static_cast<std::size_t>(i)))) * w;
    w = w * aw;
  }
  if (!(den.modulus() > T(64) * machine_epsilon<T>() * scale))
    throw DegenerateDenominator("eval_transfer: den(i*omega) ~ 0");
  return numerics::eval_poly(chi.num, z) / den;
}

/// zeta_r(omega) = chi_r(i*omega) e^{-i r omega}: amplification relative to
/// the exact unit-modulus propagation over r steps of per-step phase omega.
template <class T>
[[nodiscard]] Complex<T> zeta(const RationalTransfer& chi, const T& omega,
                              int r) {
  return eval_transfer(chi, omega) * Complex<T>::unit(T(-r) * omega);
}

/// dev(omega; K, R) = zeta_R(omega)^{N/R}: the accumulated end-of-run
/// deviation after N steps.
template <class T>
[[nodiscard]] Complex<T> deviation(const RationalTransfer& chi, const T& omega,
                                   long long n, int r_steps) {
  if (r_steps <= 0 || n % r_steps != 0)
    throw Error("deviation: N must be a positive multiple of R");
  return zeta(chi, omega, r_steps).pow(n / r_steps);
}

// ---------------------------------------------------------------------------
// Dispersion table
// ---------------------------------------------------------------------------

/// CSV with header K,R,ell,omega,mod_zeta,arg_dev; one row per
/// (scheme, ell, omega) holding zeta_R(omega/ell)^ell.  Omegas where the
/// denominator degenerates are skipped and flagged as comment lines.
template <class T>
[[nodiscard]] std::string dispersion_table(const std::vector<SchemeId>& schemes,
                                           const std::vector<T>& omegas,
                                           const std::vector<int>& ells) {
  std::ostringstream csv;
  csv << "K,R,ell,omega,mod_zeta,arg_dev\n";
  char buf[160];
  for (const SchemeId& id : schemes) {
    const RationalTransfer chi = transfer_function(id);
    for (const int ell : ells)
      for (const T& omega : omegas) {
        try {
          Complex<T> dev = zeta(chi, omega / T(ell), id.R).pow(ell);
          std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,%.17g\n", id.K,
                        id.R, ell, static_cast<double>(omega),
                        static_cast<double>(dev.modulus()),
                        static_cast<double>(dev.argument()));
          csv << buf;
        } catch (const DegenerateDenominator&) {
          std::snprintf(buf, sizeof buf,
                        "# skipped K=%d R=%d ell=%d omega=%.17g: degenerate "
                        "denominator\n",
                        id.K, id.R, ell, static_cast<double>(omega));
          csv << buf;
        }
      }
  }
  return csv.str();
}

// ---------------------------------------------------------------------------
// Runge-Kutta (Butcher) export
// ---------------------------------------------------------------------------

/// The block update written as an (R+1)-stage Runge-Kutta scheme with one
/// coefficient matrix per derivative order.  raw[j-1] holds
/// -A0^{-1} [a-hat_j | A_j] in dt units; scaled[j-1] divides by R^j for the
/// macro step DT = R dt.  Stage nodes are (0, 1, ..., R)/R of DT.
struct ButcherTableau {
  int K = 0, R = 0;
  std::vector<Rational> nodes;                 // R+1 entries, r/R
  std::vector<DenseMatrix<Rational>> raw;      // K matrices, R x (R+1)
  std::vector<DenseMatrix<Rational>> scaled;   // K matrices, R x (R+1)
};

[[nodiscard]] inline ButcherTableau butcher_export(
    const StructuralBasis& basis) {
  const structural::SplitBasis split = structural::split(basis);
  ButcherTableau tab;
  tab.K = split.K;
  tab.R = split.R;
  tab.nodes.reserve(split.R + 1);
  for (int r = 0; r <= split.R; ++r)
    tab.nodes.push_back(Rational(r, split.R));
  Rational rpow(1);
  for (int j = 1; j <= split.K; ++j) {
    rpow *= split.R;
    // Stack the anchor column in front of A_j, then hit with -A0^{-1}.
    DenseMatrix<Rational> rhs(split.R, split.R + 1);
    for (int s = 0; s < split.R; ++s) {
      rhs(s, 0) = -split.anchors[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)];
      for (int r = 0; r < split.R; ++r)
        rhs(s, r + 1) = -split.a[static_cast<std::size_t>(j)](s, r);
    }
    DenseMatrix<Rational> raw = split.a0_inverse * rhs;
    DenseMatrix<Rational> scaled(split.R, split.R + 1);
    for (int s = 0; s < split.R; ++s)
      for (int c = 0; c <= split.R; ++c) scaled(s, c) = raw(s, c) / rpow;
    tab.raw.push_back(std::move(raw));
    tab.scaled.push_back(std::move(scaled));
  }
  return tab;
}

[[nodiscard]] inline ButcherTableau butcher_export(const SchemeId& id) {
  return butcher_export(structural::scheme_basis(id));
}

/// JSON export with exact fraction strings.
[[nodiscard]] inline std::string to_json(const ButcherTableau& tab) {
  nlohmann::json j;
  j["K"] = tab.K;
  j["R"] = tab.R;
  j["stages"] = tab.R + 1;
  auto frac = [](const Rational& q) {
    return nlohmann::json{numerator(q).str(), denominator(q).str()};
  };
  nlohmann::json nodes = nlohmann::json::array();
  for (const Rational& c : tab.nodes) nodes.push_back(frac(c));
  j["nodes"] = std::move(nodes);
  auto dump_set = [&](const std::vector<DenseMatrix<Rational>>& set) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& m : set) {
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t s = 0; s < m.rows(); ++s) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(frac(m(s, c)));
        rows.push_back(std::move(row));
      }
      out.push_back(std::move(rows));
    }
    return out;
  };
  j["alpha_raw"] = dump_set(tab.raw);
  j["alpha_scaled"] = dump_set(tab.scaled);
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Minimal grid search
// ---------------------------------------------------------------------------

namespace detail {

template <class T>
[[nodiscard]] std::optional<T> error_at(const jets::OdeProblem<T>& p,
                                        const SchemeId& scheme, long long n,
                                        double solver_eps) {
  using std::sqrt;
  solver::SolverConfig cfg;
  cfg.scheme = scheme;
  cfg.N = static_cast<int>(n);
  cfg.eps = solver_eps;
  try {
    const auto trace = solver::integrate(p, cfg);
    const auto errs = trace.final_errors(p);
    T acc(0);
    for (const T& e : errs) acc += e * e;
    return sqrt(acc);
  } catch (const numerics::NoConvergence&) {
    return std::nullopt;  // counts as a failing grid
  }
}

}  // namespace detail

/// Smallest N (multiple of R) whose final-time error is at most eps_target:
/// doubling from N = R to bracket the first crossing, then bisection at
/// granularity R inside the bracket.  Throws SearchExhausted past n_cap.
template <class T>
[[nodiscard]] long long find_min_n(const jets::OdeProblem<T>& p,
                                   const SchemeId& scheme, double eps_target,
                                   double solver_eps = 1e-12,
                                   long long n_cap = (1LL << 22)) {
  const int r_steps = scheme.R;
  if (std::isinf(eps_target) && eps_target > 0)
    return static_cast<long long>(r_steps);  // every grid qualifies
  const T target(eps_target);

  auto passes = [&](long long n) {
    const auto err = detail::error_at(p, scheme, n, solver_eps);
    return err.has_value() && *err <= target;
  };

  long long lo = 0;  // known-failing (0 = no grid at all)
  long long hi = r_steps;
  while (!passes(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > n_cap)
      throw SearchExhausted("find_min_n: no passing N up to cap " +
                            std::to_string(n_cap));
  }
  // Bisect the bracket (lo fails, hi passes) at granularity R.
  while (hi - lo > r_steps) {
    const long long mid = lo + (hi - lo) / (2 * r_steps) * r_steps;
    if (passes(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace structode::analysis
