#pragma once
// Derivative post-processing: recover phi^(p) for p > K from the backward
// history of node jets, without extra solves.  The coefficients a_{ik} come
// from exactness conditions on the monomial family, assembled and solved in
// exact rational arithmetic once and reused for every evaluation.

#include "structode/numerics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

namespace structode::postproc {

using numerics::DenseMatrix;

/// The requested (p, order) pair cannot be satisfied by the given history
/// depth: p + d exceeds the (I_p+1)(K+1) available coefficients, or the
/// request is malformed (p <= K needs no post-processing).
struct Infeasible : Error {
  using Error::Error;
};
/// Consistency errors sank below the working precision; no slope to fit.
struct DegenerateFit : Error {
  using Error::Error;
};

/// Immutable evaluator for phi^(p)_N = dt^(-p) sum_{i,k} a_{ik} dt^k
/// phi^(k)_{N-i} over the last I_p+1 nodes.
struct PostProcessor {
  int K = 0;   // derivative orders available per node
  int p = 0;   // target derivative order, p > K
  int Ip = 0;  // history depth: nodes N-I_p .. N
  int order = 0;  // achieved consistency order d
  DenseMatrix<Rational> coeffs;  // (I_p+1) x (K+1), coeffs(i, k) = a_{ik}
};

/// Largest consistency order achievable with I_p+1 nodes of K+1 orders each.
[[nodiscard]] inline int max_order(int k_orders, int p, int ip) {
  return (ip + 1) * (k_orders + 1) - p;
}

namespace detail {

/// Row m (1-based), column (i, k): the exactness condition on the monomial
/// t^(m-1) reads sum a_{ik} C^m_k (-i)^(m-1-k) = p! [m == p+1], with
/// C^m_k = (m-1)!/(m-1-k)! and entries with k > m-1 vanishing.
[[nodiscard]] inline DenseMatrix<Rational> exactness_matrix(int K, int p,
                                                            int Ip, int d) {
  const int rows = p + d;
  const int cols = (Ip + 1) * (K + 1);
  DenseMatrix<Rational> m(rows, cols);
  for (int row = 1; row <= rows; ++row)
    for (int i = 0; i <= Ip; ++i)
      for (int k = 0; k <= std::min(K, row - 1); ++k) {
        Rational c = 1;  // C^m_k = (m-1)(m-2)...(m-k)
        for (int j = 0; j < k; ++j) c *= row - 1 - j;
        Rational power = 1;  // (-i)^(m-1-k)
        for (int e = 0; e < row - 1 - k; ++e) power *= -i;
        m(row - 1, i * (K + 1) + k) = c * power;
      }
  return m;
}

}  // namespace detail

/// Build the coefficients for target derivative p with history depth I_p and
/// consistency order d (default: the maximum (I_p+1)(K+1) - p).  When the
/// exactness system is underdetermined the minimum-norm rational solution is
/// taken, a = M^T (M M^T)^{-1} b, so results are deterministic.
[[nodiscard]] inline PostProcessor build_postprocessor(int K, int p, int Ip,
                                                       int d = -1) {
  if (K < 1 || Ip < 0)
    throw Infeasible("build_postprocessor: need K >= 1 and I_p >= 0");
  if (p <= K)
    throw Infeasible(
        "build_postprocessor: p <= K is already held by the node jets");
  if (d < 0) d = max_order(K, p, Ip);
  if (d < 1 || p + d > (Ip + 1) * (K + 1))
    throw Infeasible("build_postprocessor: order " + std::to_string(d) +
                     " needs " + std::to_string(p + d) +
                     " coefficients, have " +
                     std::to_string((Ip + 1) * (K + 1)));

  const int rows = p + d;
  const int cols = (Ip + 1) * (K + 1);
  const DenseMatrix<Rational> m = detail::exactness_matrix(K, p, Ip, d);
  DenseMatrix<Rational> b(rows, 1);
  b(p, 0) = 1;
  for (int j = 2; j <= p; ++j) b(p, 0) *= j;  // p!

  DenseMatrix<Rational> a(cols, 1);
  try {
    if (rows == cols) {
      a = numerics::exact_solve(m, b);
    } else {
      // Minimum-norm: solve (M M^T) y = b, then a = M^T y.
      DenseMatrix<Rational> gram(rows, rows);
      for (int r = 0; r < rows; ++r)
        for (int s = 0; s < rows; ++s) {
          Rational acc = 0;
          for (int c = 0; c < cols; ++c) acc += m(r, c) * m(s, c);
          gram(r, s) = acc;
        }
      const DenseMatrix<Rational> y = numerics::exact_solve(gram, b);
      for (int c = 0; c < cols; ++c) {
        Rational acc = 0;
        for (int r = 0; r < rows; ++r) acc += m(r, c) * y(r, 0);
        a(c, 0) = acc;
      }
    }
  } catch (const numerics::SingularMatrix&) {
    throw Infeasible("build_postprocessor: exactness system is rank-deficient");
  }

  PostProcessor pp;
  pp.K = K;
  pp.p = p;
  pp.Ip = Ip;
  pp.order = d;
  pp.coeffs = DenseMatrix<Rational>(Ip + 1, K + 1);
  for (int i = 0; i <= Ip; ++i)
    for (int k = 0; k <= K; ++k) pp.coeffs(i, k) = a(i * (K + 1) + k, 0);
  return pp;
}

/// Evaluate phi^(p) at the newest node.  history[j] holds the jet of node
/// t_{N-I_p+j} (oldest first), entries 0..K the raw derivatives phi^(k);
/// so phi^(k)_{N-i} = history[I_p - i][k].
template <class T>
[[nodiscard]] T apply(const PostProcessor& pp,
                      const std::vector<std::vector<T>>& history, const T& dt) {
  if (static_cast<int>(history.size()) != pp.Ip + 1)
    throw Error("apply: history must hold exactly I_p + 1 nodes");
  for (const auto& node : history)
    if (static_cast<int>(node.size()) < pp.K + 1)
      throw Error("apply: each node needs derivative orders 0..K");
  T acc(0);
  for (int i = 0; i <= pp.Ip; ++i) {
    const auto& node = history[static_cast<std::size_t>(pp.Ip - i)];
    T weight(1);  // dt^k
    for (int k = 0; k <= pp.K; ++k) {
      acc += to_scalar<T>(pp.coeffs(i, k)) * weight * node[static_cast<std::size_t>(k)];
      weight = weight * dt;
    }
  }
  T scale(1);  // dt^p
  for (int j = 0; j < pp.p; ++j) scale = scale * dt;
  return acc / scale;
}

/// Log-log slope of the consistency error on exact e^t node data over [0, 1].
/// Uses the maximal-order processor for (K, p, I_p); T picks the working
/// precision (the high-order cells need Ext).
template <class T>
[[nodiscard]] double measure_consistency_order(int K, int p, int Ip,
                                               const std::vector<int>& grids) {
  using std::abs;
  using std::exp;
  using std::log;
  if (grids.size() < 2)
    throw Error("measure_consistency_order: need at least two grids");
  const PostProcessor pp = build_postprocessor(K, p, Ip);
  const T target = exp(T(1));  // every derivative of e^t at t = 1
  std::vector<double> log_dt, log_err;
  for (const int n : grids) {
    if (n <= Ip)
      throw Error("measure_consistency_order: grid too small for history");
    const T dt = T(1) / n;
    std::vector<std::vector<T>> history;
    history.reserve(static_cast<std::size_t>(Ip) + 1);
    for (int j = 0; j <= Ip; ++j) {
      const T value = exp(T(1) - T(Ip - j) * dt);
      history.emplace_back(static_cast<std::size_t>(K) + 1, value);
    }
    const T err = abs(apply(pp, history, dt) - target);
    // Roundoff floor of the cancellation-heavy sum: eps times the sum of
    // term magnitudes, amplified by the dt^(-p) rescaling.  Errors at or
    // below it measure noise, not truncation.
    T scale(0), dtp(1);
    for (int i = 0; i <= Ip; ++i) {
      T weight(1);
      for (int k = 0; k <= K; ++k) {
        scale += abs(to_scalar<T>(pp.coeffs(i, k))) * weight *
                 history[static_cast<std::size_t>(Ip - i)][static_cast<std::size_t>(k)];
        weight = weight * dt;
      }
    }
    for (int j = 0; j < p; ++j) dtp = dtp * dt;
    if (!(err > machine_epsilon<T>() * scale / dtp))
      throw DegenerateFit(
          "measure_consistency_order: error at N = " + std::to_string(n) +
          " is below the working-precision roundoff floor");
    log_dt.push_back(static_cast<double>(log(dt)));
    log_err.push_back(static_cast<double>(log(err)));
  }
  // Least-squares slope of log err against log dt.
  const double n = static_cast<double>(grids.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_dt.size(); ++i) {
    sx += log_dt[i];
    sy += log_err[i];
    sxx += log_dt[i] * log_dt[i];
    sxy += log_dt[i] * log_err[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Schema: {K, p, I_p, order, coeffs: [[[num, den], ...], ...]} with exact
/// decimal strings, one row per history node i = 0..I_p.
[[nodiscard]] inline std::string to_json(const PostProcessor& pp) {
  nlohmann::json j;
  j["K"] = pp.K;
  j["p"] = pp.p;
  j["I_p"] = pp.Ip;
  j["order"] = pp.order;
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i <= pp.Ip; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k <= pp.K; ++k)
      row.push_back({numerator(pp.coeffs(i, k)).str(),
                     denominator(pp.coeffs(i, k)).str()});
    rows.push_back(std::move(row));
  }
  j["coeffs"] = std::move(rows);
  return j.dump(2);
}

}  // namespace structode::postproc
