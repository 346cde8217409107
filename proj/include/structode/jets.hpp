#pragma once
// Derivative jets: truncated sequences of raw derivative values propagated
// through the right-hand side by Leibniz-rule arithmetic.
//
// A Series<T> stores (f(t), f'(t), ..., f^(K)(t)) -- raw derivatives, not
// Taylor coefficients.  Products therefore carry binomial weights:
//     (f g)^(n) = sum_j C(n, j) f^(j) g^(n-j).
// Evaluating the ODE right-hand side on series of order j yields, in its
// j-th entry, d^j/dt^j f(y(t), t) = y^(j+1)(t): one order of the solution
// jet per evaluation pass.

#include "structode/common.hpp"

#include <functional>
#include <vector>

namespace structode::jets {

using structode::Error;

/// Division by a series with zero constant term, or a transcendental applied
/// outside its domain (e.g. log of a nonpositive constant term).
struct DomainError : Error {
  using Error::Error;
};

namespace detail {
/// Binomial coefficients up to the small orders used here (K <= 8 is ample).
[[nodiscard]] inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long acc = 1;
  for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return acc;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Series: one scalar component's derivatives 0..K
// ---------------------------------------------------------------------------

template <class T>
class Series {
 public:
  Series() = default;
  explicit Series(int order, const T& value = T(0))
      : d_(static_cast<std::size_t>(order) + 1, T(0)) {
    d_[0] = value;
  }

  /// The independent variable: value v, first derivative 1, rest 0.
  [[nodiscard]] static Series variable(const T& v, int order) {
    Series s(order);
    s.d_[0] = v;
    if (order >= 1) s.d_[1] = T(1);
    return s;
  }
  [[nodiscard]] static Series constant(const T& v, int order) {
    return Series(order, v);
  }

  [[nodiscard]] int order() const { return static_cast<int>(d_.size()) - 1; }
  [[nodiscard]] T& operator[](int k) { return d_[static_cast<std::size_t>(k)]; }
  [[nodiscard]] const T& operator[](int k) const {
    return d_[static_cast<std::size_t>(k)];
  }

  /// Copy truncated to a lower order.
  [[nodiscard]] Series truncated(int order) const {
    Series s(order);
    for (int k = 0; k <= order; ++k) s.d_[static_cast<std::size_t>(k)] = d_[static_cast<std::size_t>(k)];
    return s;
  }

  // ---- ring operations (orders must match; helpers below enforce it) ----

  [[nodiscard]] friend Series operator+(const Series& a, const Series& b) {
    Series c(a.order());
    for (int k = 0; k <= a.order(); ++k) c[k] = a[k] + b[k];
    return c;
  }
  [[nodiscard]] friend Series operator-(const Series& a, const Series& b) {
    Series c(a.order());
    for (int k = 0; k <= a.order(); ++k) c[k] = a[k] - b[k];
    return c;
  }
  [[nodiscard]] friend Series operator-(const Series& a) {
    Series c(a.order());
    for (int k = 0; k <= a.order(); ++k) c[k] = -a[k];
    return c;
  }
  [[nodiscard]] friend Series operator*(const Series& a, const Series& b) {
    Series c(a.order());
    for (int n = 0; n <= a.order(); ++n) {
      T acc(0);
      for (int j = 0; j <= n; ++j)
        acc += T(detail::binomial(n, j)) * a[j] * b[n - j];
      c[n] = acc;
    }
    return c;
  }
  /// Leibniz division: solves a = c * b for c order by order.
  [[nodiscard]] friend Series operator/(const Series& a, const Series& b) {
    if (b[0] == T(0))
      throw DomainError("series division by zero constant term");
    Series c(a.order());
    for (int n = 0; n <= a.order(); ++n) {
      T acc = a[n];
      for (int j = 0; j < n; ++j)
        acc -= T(detail::binomial(n, j)) * c[j] * b[n - j];
      c[n] = acc / b[0];
    }
    return c;
  }

  // ---- scalar convenience ----
  [[nodiscard]] friend Series operator+(const Series& a, const T& s) {
    Series c = a;
    c[0] += s;
    return c;
  }
  [[nodiscard]] friend Series operator+(const T& s, const Series& a) {
    return a + s;
  }
  [[nodiscard]] friend Series operator-(const Series& a, const T& s) {
    Series c = a;
    c[0] -= s;
    return c;
  }
  [[nodiscard]] friend Series operator-(const T& s, const Series& a) {
    return (-a) + s;
  }
  [[nodiscard]] friend Series operator*(const T& s, const Series& a) {
    Series c(a.order());
    for (int k = 0; k <= a.order(); ++k) c[k] = s * a[k];
    return c;
  }
  [[nodiscard]] friend Series operator*(const Series& a, const T& s) {
    return s * a;
  }
  [[nodiscard]] friend Series operator/(const Series& a, const T& s) {
    Series c(a.order());
    for (int k = 0; k <= a.order(); ++k) c[k] = a[k] / s;
    return c;
  }

 private:
  std::vector<T> d_;
};

// ---- transcendental lifts -------------------------------------------------

template <class T>
[[nodiscard]] Series<T> exp(const Series<T>& f) {
  using std::exp;
  Series<T> u(f.order());
  u[0] = exp(f[0]);
  for (int n = 1; n <= f.order(); ++n) {
    T acc(0);
    for (int i = 0; i < n; ++i)
      acc += T(detail::binomial(n - 1, i)) * f[i + 1] * u[n - 1 - i];
    u[n] = acc;
  }
  return u;
}

template <class T>
void sin_cos(const Series<T>& f, Series<T>& s, Series<T>& c) {
  using std::cos;
  using std::sin;
  s = Series<T>(f.order());
  c = Series<T>(f.order());
  s[0] = sin(f[0]);
  c[0] = cos(f[0]);
  for (int n = 1; n <= f.order(); ++n) {
    T sa(0), ca(0);
    for (int i = 0; i < n; ++i) {
      const T w = T(detail::binomial(n - 1, i)) * f[i + 1];
      sa += w * c[n - 1 - i];
      ca -= w * s[n - 1 - i];
    }
    s[n] = sa;
    c[n] = ca;
  }
}

template <class T>
[[nodiscard]] Series<T> sin(const Series<T>& f) {
  Series<T> s, c;
  sin_cos(f, s, c);
  return s;
}

template <class T>
[[nodiscard]] Series<T> cos(const Series<T>& f) {
  Series<T> s, c;
  sin_cos(f, s, c);
  return c;
}

template <class T>
[[nodiscard]] Series<T> log(const Series<T>& f) {
  using std::log;
  if (!(f[0] > T(0)))
    throw DomainError("series log of nonpositive constant term");
  Series<T> l(f.order());
  l[0] = log(f[0]);
  for (int n = 1; n <= f.order(); ++n) {
    T acc = f[n];
    for (int i = 0; i + 1 < n; ++i)
      acc -= T(detail::binomial(n - 1, i)) * l[i + 1] * f[n - 1 - i];
    l[n] = acc / f[0];
  }
  return l;
}

/// Integer power by repeated multiplication (exponents here are tiny).
template <class T>
[[nodiscard]] Series<T> pow(const Series<T>& f, int e) {
  if (e < 0) return Series<T>::constant(T(1), f.order()) / pow(f, -e);
  Series<T> acc = Series<T>::constant(T(1), f.order());
  for (int i = 0; i < e; ++i) acc = acc * f;
  return acc;
}

// ---------------------------------------------------------------------------
// Jet: all components of a system at one time node
// ---------------------------------------------------------------------------

/// Raw derivatives 0..K of every component at one point: d series of a
/// common order.
template <class T>
struct Jet {
  std::vector<Series<T>> comp;

  Jet() = default;
  Jet(int dim, int order) : comp(dim, Series<T>(order)) {}

  [[nodiscard]] int dim() const { return static_cast<int>(comp.size()); }
  [[nodiscard]] int order() const { return comp.empty() ? -1 : comp[0].order(); }

  [[nodiscard]] T& value(int c, int k) { return comp[c][k]; }
  [[nodiscard]] const T& value(int c, int k) const { return comp[c][k]; }

  [[nodiscard]] std::vector<T> values(int k) const {
    std::vector<T> v(comp.size());
    for (std::size_t c = 0; c < comp.size(); ++c) v[c] = comp[c][k];
    return v;
  }
};

// ---------------------------------------------------------------------------
// ODE problems
// ---------------------------------------------------------------------------

/// An initial-value problem y' = f(y, t) on (t0, t_end], dimension d >= 1.
/// The right-hand side is written once against the generic series arithmetic
/// and reused for every derivative order and working precision.
template <class T>
struct OdeProblem {
  using Rhs = std::function<std::vector<Series<T>>(
      const std::vector<Series<T>>&, const Series<T>&)>;
  using Solution = std::function<std::vector<T>(const T&)>;

  int dim = 1;
  Rhs rhs;
  T t0 = T(0);
  T t_end = T(1);
  std::vector<T> y0;
  Solution known_solution;  // empty when no closed form is available
};

// ---------------------------------------------------------------------------
// Derivative lifts
// ---------------------------------------------------------------------------

/// Fill orders known_order+1 .. jet.order() from the orders 0..known_order
/// already present, leaving the supplied prefix untouched.  One RHS
/// evaluation per missing order: the j-th entry of f evaluated on order-j
/// series equals y^(j+1).
template <class T>
void lift_derivatives_given_prefix(const OdeProblem<T>& p, const T& t,
                                   Jet<T>& jet, int known_order) {
  const int target = jet.order();
  for (int j = known_order; j < target; ++j) {
    std::vector<Series<T>> y(p.dim);
    for (int c = 0; c < p.dim; ++c) y[c] = jet.comp[c].truncated(j);
    const std::vector<Series<T>> f = p.rhs(y, Series<T>::variable(t, j));
    for (int c = 0; c < p.dim; ++c) jet.comp[c][j + 1] = f[c][j];
  }
}

/// Transport the point value y at time t into a full jet of the given order.
template <class T>
[[nodiscard]] Jet<T> lift_derivatives(const OdeProblem<T>& p, const T& t,
                                      const std::vector<T>& y, int order) {
  Jet<T> jet(p.dim, order);
  for (int c = 0; c < p.dim; ++c) jet.comp[c][0] = y[c];
  lift_derivatives_given_prefix(p, t, jet, 0);
  return jet;
}

}  // namespace structode::jets
