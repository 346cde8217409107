#pragma once
// Block solver: advances an IVP one block of R nodes at a time.  Each block
// couples the structural equations (exact linear relations between the
// derivative levels at the block's nodes and its anchor) with the physical
// equations (the ODE right-hand side lifted to derivative jets).  The two are
// alternated -- jet refresh, then one linear solve for the value level --
// until the value level stops moving.
//
// All floating work is templated on the working scalar (double or Ext); the
// scheme coefficients themselves stay exact until the single conversion in
// SchemeOperator.

#include "structode/jets.hpp"
#include "structode/numerics.hpp"
#include "structode/structural.hpp"

#include <string>
#include <vector>

namespace structode::solver {

using jets::Jet;
using jets::OdeProblem;
using numerics::DenseMatrix;
using numerics::NoConvergence;
using structural::SchemeId;
using structural::SplitBasis;

/// Configuration checks failed (grid not a block multiple, bad tolerance...).
struct InvalidConfig : Error {
  using Error::Error;
};

/// Working precision requested through untemplated configuration surfaces.
enum class Precision { f64, ext256 };

[[nodiscard]] inline std::string to_string(Precision p) {
  return p == Precision::f64 ? "f64" : "ext256";
}

struct SolverConfig {
  SchemeId scheme{1, 1};
  int N = 0;                           // total nodes; must be a multiple of R
  double eps = 1e-12;                  // sup-change stop tolerance
  int max_iters = 200;                 // sweep cap per block
  Precision precision = Precision::f64;

  void validate() const {
    if (N <= 0 || N % scheme.R != 0)
      throw InvalidConfig("N must be a positive multiple of R");
    if (!(eps > 0)) throw InvalidConfig("eps must be positive");
    if (max_iters < 1) throw InvalidConfig("max_iters must be at least 1");
  }
};

// ---------------------------------------------------------------------------
// SchemeOperator: the scheme coefficients converted to the working scalar
// ---------------------------------------------------------------------------

template <class T>
struct SchemeOperator {
  int K = 0, R = 0;
  std::vector<DenseMatrix<T>> a;        // K+1 in-block matrices, R x R
  std::vector<std::vector<T>> anchors;  // K+1 anchor columns, length R
  numerics::LuFactorization<T> a0_lu;   // factored once, shared everywhere
  std::vector<T> a0inv_ak_norm;         // ||A0^-1 A^(k)||_inf, k = 0..K

  explicit SchemeOperator(const SplitBasis& split) : K(split.K), R(split.R) {
    // The integer-normalized equations can differ in scale by many orders of
    // magnitude between rows (large K*R), which would wreck the floating-point
    // LU of A^(0).  Row-equilibrate each equation by its largest coefficient,
    // exactly in rationals, before converting.  A left diagonal scaling leaves
    // the solution of every block system (and A0^-1 A^(k)) unchanged.
    std::vector<Rational> row_scale(static_cast<std::size_t>(R), Rational(0));
    for (int s = 0; s < R; ++s) {
      Rational mx(0);
      for (int k = 0; k <= K; ++k) {
        Rational v = abs(split.anchors[k][static_cast<std::size_t>(s)]);
        if (v > mx) mx = v;
        for (int r = 0; r < R; ++r) {
          v = abs(split.a[k](s, r));
          if (v > mx) mx = v;
        }
      }
      row_scale[static_cast<std::size_t>(s)] = mx > 0 ? mx : Rational(1);
    }
    a.reserve(K + 1);
    anchors.reserve(K + 1);
    for (int k = 0; k <= K; ++k) {
      DenseMatrix<T> ak(R, R);
      std::vector<T> anc(R);
      for (int s = 0; s < R; ++s) {
        const Rational& d = row_scale[static_cast<std::size_t>(s)];
        anc[s] = to_scalar<T>(split.anchors[k][static_cast<std::size_t>(s)] / d);
        for (int r = 0; r < R; ++r) ak(s, r) = to_scalar<T>(split.a[k](s, r) / d);
      }
      a.push_back(std::move(ak));
      anchors.push_back(std::move(anc));
    }
    a0_lu = numerics::lu_factor(a[0]);
    a0inv_ak_norm.assign(K + 1, T(0));
    DenseMatrix<Rational> inv = split.a0_inverse;
    for (int k = 1; k <= K; ++k) {
      const DenseMatrix<Rational> prod = inv * split.a[k];
      DenseMatrix<T> conv(R, R);
      for (int s = 0; s < R; ++s)
        for (int r = 0; r < R; ++r) conv(s, r) = to_scalar<T>(prod(s, r));
      a0inv_ak_norm[k] = numerics::norm_inf(conv);
    }
  }
};

[[nodiscard]] inline SchemeId checked_scheme(const SolverConfig& c) {
  c.validate();
  return c.scheme;
}

// ---------------------------------------------------------------------------
// Block state
// ---------------------------------------------------------------------------

/// One block's unknowns: the anchor jet psi (node n, fully known) and the R
/// in-block jets phi (nodes n+1 .. n+R).
template <class T>
struct BlockState {
  Jet<T> psi;                 // anchor jet, order K, dim d
  std::vector<Jet<T>> phi;    // R in-block jets
  int iter_count = 0;
};

/// Contraction estimate of the block fixed-point map:
///   sum_{k>=1} dt^k * Lhat^k * ||A0^-1 A^(k)||_inf,
/// where Lhat bounds the per-order growth of the lifted right-hand side.
/// Below one, the sweep iteration is a contraction.
template <class T>
[[nodiscard]] T contraction_coefficient(const SchemeOperator<T>& op,
                                        const T& dt, const T& lhat) {
  T acc(0);
  T dtk(1), lk(1);
  for (int k = 1; k <= op.K; ++k) {
    dtk = dtk * dt;
    lk = lk * lhat;
    acc += dtk * lk * op.a0inv_ak_norm[static_cast<std::size_t>(k)];
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Block operations
// ---------------------------------------------------------------------------

/// Taylor predictor: march node by node from the anchor, each node's value
/// level seeded by the degree-K Taylor expansion of the previous node's jet,
/// higher orders filled by the physical lift.
template <class T>
[[nodiscard]] BlockState<T> init_block(const OdeProblem<T>& p,
                                       const SchemeOperator<T>& op,
                                       const T& t_anchor, const Jet<T>& psi,
                                       const T& dt) {
  BlockState<T> state;
  state.psi = psi;
  state.phi.reserve(op.R);
  const Jet<T>* prev = &psi;
  for (int r = 1; r <= op.R; ++r) {
    Jet<T> jet(p.dim, op.K);
    for (int c = 0; c < p.dim; ++c) {
      T acc(0), weight(1);
      for (int k = 0; k <= op.K; ++k) {
        acc += prev->comp[c][k] * weight;
        weight = weight * dt / T(k + 1);
      }
      jet.comp[c][0] = acc;
    }
    jets::lift_derivatives_given_prefix(p, t_anchor + T(r) * dt, jet, 0);
    state.phi.push_back(std::move(jet));
    prev = &state.phi.back();
  }
  return state;
}

/// One sweep: refresh every in-block jet from its current value level
/// (physical update), then solve the structural system for a new value level
/// (linear update).  Returns the sup-norm change of the value level.
template <class T>
[[nodiscard]] T sweep(const OdeProblem<T>& p, const SchemeOperator<T>& op,
                      const T& t_anchor, const T& dt, BlockState<T>& state) {
  using structode::abs_value;
  // Physical update: rebuild derivative orders 1..K above the value level.
  for (int r = 1; r <= op.R; ++r)
    jets::lift_derivatives_given_prefix(p, t_anchor + T(r) * dt,
                                        state.phi[static_cast<std::size_t>(r - 1)], 0);

  // Precompute dt powers.
  std::vector<T> dtk(op.K + 1);
  dtk[0] = T(1);
  for (int k = 1; k <= op.K; ++k) dtk[static_cast<std::size_t>(k)] = dtk[static_cast<std::size_t>(k - 1)] * dt;

  // Linear update, one solve per component against the shared LU of A^(0).
  T change(0);
  for (int c = 0; c < p.dim; ++c) {
    std::vector<T> rhs(op.R, T(0));
    for (int s = 0; s < op.R; ++s) {
      T acc(0);
      for (int k = 0; k <= op.K; ++k)
        acc += dtk[static_cast<std::size_t>(k)] *
               op.anchors[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)] *
               state.psi.comp[c][k];
      for (int k = 1; k <= op.K; ++k) {
        const auto& ak = op.a[static_cast<std::size_t>(k)];
        T inner(0);
        for (int r = 0; r < op.R; ++r)
          inner += ak(s, r) * state.phi[static_cast<std::size_t>(r)].comp[c][k];
        acc += dtk[static_cast<std::size_t>(k)] * inner;
      }
      rhs[static_cast<std::size_t>(s)] = -acc;
    }
    const std::vector<T> next = op.a0_lu.solve(rhs);
    for (int r = 0; r < op.R; ++r) {
      const T delta = abs_value(next[static_cast<std::size_t>(r)] -
                                state.phi[static_cast<std::size_t>(r)].comp[c][0]);
      // Written so a NaN delta (diverged iterates) poisons the change and
      // keeps the block from reporting convergence.
      if (!(delta <= change)) change = delta;
      state.phi[static_cast<std::size_t>(r)].comp[c][0] = next[static_cast<std::size_t>(r)];
    }
  }
  return change;
}

/// Iterate sweeps until the value level moves by at most eps, then refresh
/// the derivative levels one last time so the returned jets are consistent.
/// Throws NoConvergence at the iteration cap.
template <class T>
[[nodiscard]] BlockState<T> solve_block(const OdeProblem<T>& p,
                                        const SchemeOperator<T>& op,
                                        const T& t_anchor, const Jet<T>& psi,
                                        const T& dt, const T& eps,
                                        int max_iters) {
  BlockState<T> state = init_block(p, op, t_anchor, psi, dt);
  for (int iter = 1; iter <= max_iters; ++iter) {
    const T change = sweep(p, op, t_anchor, dt, state);
    state.iter_count = iter;
    if (change <= eps) {
      for (int r = 1; r <= op.R; ++r)
        jets::lift_derivatives_given_prefix(
            p, t_anchor + T(r) * dt, state.phi[static_cast<std::size_t>(r - 1)], 0);
      return state;
    }
  }
  throw NoConvergence("solve_block: sweep cap reached at " +
                      std::to_string(max_iters) + " iterations");
}

// ---------------------------------------------------------------------------
// Residual probes (used by tests and sanity checks)
// ---------------------------------------------------------------------------

/// Largest structural-equation residual over components and equations.
template <class T>
[[nodiscard]] T structural_residual(const SchemeOperator<T>& op,
                                    const BlockState<T>& state, const T& dt) {
  using structode::abs_value;
  std::vector<T> dtk(op.K + 1);
  dtk[0] = T(1);
  for (int k = 1; k <= op.K; ++k) dtk[static_cast<std::size_t>(k)] = dtk[static_cast<std::size_t>(k - 1)] * dt;
  T worst(0);
  const int dim = state.psi.dim();
  for (int c = 0; c < dim; ++c)
    for (int s = 0; s < op.R; ++s) {
      T acc(0);
      for (int k = 0; k <= op.K; ++k) {
        acc += dtk[static_cast<std::size_t>(k)] *
               op.anchors[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)] *
               state.psi.comp[c][k];
        for (int r = 0; r < op.R; ++r)
          acc += dtk[static_cast<std::size_t>(k)] *
                 op.a[static_cast<std::size_t>(k)](s, r) *
                 state.phi[static_cast<std::size_t>(r)].comp[c][k];
      }
      const T mag = abs_value(acc);
      if (mag > worst) worst = mag;
    }
  return worst;
}

/// Largest deviation of the stored derivative levels from a fresh physical
/// lift of the stored value level.
template <class T>
[[nodiscard]] T physical_residual(const OdeProblem<T>& p,
                                  const SchemeOperator<T>& op,
                                  const T& t_anchor, const T& dt,
                                  const BlockState<T>& state) {
  using structode::abs_value;
  T worst(0);
  for (int r = 1; r <= op.R; ++r) {
    const auto& stored = state.phi[static_cast<std::size_t>(r - 1)];
    Jet<T> fresh(p.dim, op.K);
    for (int c = 0; c < p.dim; ++c) fresh.comp[c][0] = stored.comp[c][0];
    jets::lift_derivatives_given_prefix(p, t_anchor + T(r) * dt, fresh, 0);
    for (int c = 0; c < p.dim; ++c)
      for (int k = 1; k <= op.K; ++k) {
        const T d = abs_value(fresh.comp[c][k] - stored.comp[c][k]);
        if (d > worst) worst = d;
      }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Trace and integrate
// ---------------------------------------------------------------------------

template <class T>
struct Trace {
  std::vector<T> times;              // N + 1 node times, including t0
  std::vector<Jet<T>> states;        // full jets at every node
  std::vector<int> block_iters;      // sweeps used per block

  /// Mean sweep count per step: blocks of R steps share one sweep loop, so
  /// the per-step cost is the block total divided by N.
  [[nodiscard]] double kappa_bar() const {
    if (times.size() < 2) return 0.0;
    double acc = 0;
    for (int it : block_iters) acc += it;
    return acc / static_cast<double>(times.size() - 1);
  }

  /// Absolute per-component error of the terminal value level.
  [[nodiscard]] std::vector<T> final_errors(const OdeProblem<T>& p) const {
    using structode::abs_value;
    if (!p.known_solution)
      throw Error("final_errors: problem has no known solution");
    const std::vector<T> exact = p.known_solution(times.back());
    const Jet<T>& last = states.back();
    std::vector<T> err(exact.size());
    for (std::size_t c = 0; c < exact.size(); ++c)
      err[c] = abs_value(last.comp[static_cast<int>(c)][0] - exact[c]);
    return err;
  }
};

/// March the problem across N/R blocks.  Each block anchors on the final
/// node of the previous one; the first anchors on the lifted initial data.
template <class T>
[[nodiscard]] Trace<T> integrate(const OdeProblem<T>& p,
                                 const SolverConfig& config) {
  config.validate();
  const SchemeOperator<T> op(structural::split_basis(config.scheme));
  const int blocks = config.N / op.R;
  const T dt = (p.t_end - p.t0) / T(config.N);
  const T eps(config.eps);  // double -> T is exact (binary mantissa widens)

  Trace<T> trace;
  trace.times.reserve(config.N + 1);
  trace.states.reserve(config.N + 1);
  trace.block_iters.reserve(blocks);

  Jet<T> psi = jets::lift_derivatives(p, p.t0, p.y0, op.K);
  trace.times.push_back(p.t0);
  trace.states.push_back(psi);

  for (int b = 0; b < blocks; ++b) {
    const T t_anchor = p.t0 + T(b * op.R) * dt;
    const BlockState<T> state = solve_block(p, op, t_anchor, psi, dt, eps,
                                            config.max_iters);
    for (int r = 1; r <= op.R; ++r) {
      trace.times.push_back(t_anchor + T(r) * dt);
      trace.states.push_back(state.phi[static_cast<std::size_t>(r - 1)]);
    }
    trace.block_iters.push_back(state.iter_count);
    psi = state.phi.back();
  }
  return trace;
}

}  // namespace structode::solver
