#pragma once
// Dense linear-algebra kernels used by the structural-scheme machinery:
//   * DenseMatrix<T>: row-major dense matrix over any scalar-like type
//   * lu_solve: LU with partial pivoting and a backward-stable residual
//   * rational_null_space: exact kernel bases via fraction-free elimination
//   * svd_null_space: one-sided Jacobi SVD, smallest singular directions
//   * poly_det: determinant of a small matrix of polynomials (cofactors)
//   * Complex<T>: minimal complex arithmetic over double or Ext
//
// Everything here is pure and immutable; matrices up to a few dozen rows are
// the design target, so no blocking or sparsity is attempted.

#include "structode/common.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace structode::numerics {

using structode::BigInt;
using structode::Error;
using structode::Ext;
using structode::Rational;

/// Pivot fell below the singularity tolerance 1e3 * eps * ||A||_inf.
struct SingularMatrix : Error {
  using Error::Error;
};
/// An exact elimination found rank < rows where full row rank was required.
struct RankDeficient : Error {
  using Error::Error;
};
/// The Jacobi sweep cap was reached before the SVD converged.
struct NoConvergence : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// DenseMatrix
// ---------------------------------------------------------------------------

template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, const T& fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  [[nodiscard]] static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }

  [[nodiscard]] T& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  [[nodiscard]] const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  [[nodiscard]] DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Rows [r0, r1) as a new matrix.
  [[nodiscard]] DenseMatrix top_rows(std::size_t r1) const {
    DenseMatrix t(r1, cols_);
    for (std::size_t i = 0; i < r1; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(i, j) = (*this)(i, j);
    return t;
  }

  [[nodiscard]] friend DenseMatrix operator*(const DenseMatrix& a,
                                             const DenseMatrix& b) {
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t k = 0; k < a.cols(); ++k) {
        const T& aik = a(i, k);
        for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  [[nodiscard]] std::vector<T> apply(const std::vector<T>& x) const {
    std::vector<T> y(rows_, T{});
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

// ---------------------------------------------------------------------------
// Complex
// ---------------------------------------------------------------------------

/// Minimal complex value over double or Ext.  Only the operations the
/// spectral analysis needs: field arithmetic, modulus, argument, integer
/// powers, unit-circle exponentials.
template <class T>
struct Complex {
  T re{0}, im{0};

  Complex() = default;
  Complex(T r, T i) : re(std::move(r)), im(std::move(i)) {}
  explicit Complex(const T& r) : re(r), im(0) {}

  [[nodiscard]] friend Complex operator+(const Complex& a, const Complex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  [[nodiscard]] friend Complex operator-(const Complex& a, const Complex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  [[nodiscard]] friend Complex operator-(const Complex& a) {
    return {-a.re, -a.im};
  }
  [[nodiscard]] friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  [[nodiscard]] friend Complex operator*(const T& s, const Complex& a) {
    return {s * a.re, s * a.im};
  }
  [[nodiscard]] friend Complex operator/(const Complex& a, const Complex& b) {
    const T d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }

  [[nodiscard]] T norm2() const { return re * re + im * im; }
  [[nodiscard]] T modulus() const {
    using std::sqrt;
    return sqrt(norm2());
  }
  [[nodiscard]] T argument() const {
    using std::atan2;
    return atan2(im, re);
  }

  /// a^n by binary exponentiation, n >= 0.
  [[nodiscard]] Complex pow(long long n) const {
    Complex acc(T(1), T(0));
    Complex base = *this;
    for (; n > 0; n >>= 1) {
      if (n & 1) acc = acc * base;
      base = base * base;
    }
    return acc;
  }

  [[nodiscard]] static Complex unit(const T& angle) {
    using std::cos;
    using std::sin;
    return {cos(angle), sin(angle)};
  }
  [[nodiscard]] static Complex i_times(const T& v) { return {T(0), v}; }
};

template <class T>
[[nodiscard]] T abs_value(const Complex<T>& z) {
  return z.modulus();
}

/// Underlying real scalar of a (possibly complex) working type.
template <class T>
struct RealScalar {
  using type = T;
};
template <class T>
struct RealScalar<Complex<T>> {
  using type = T;
};

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

template <class T>
[[nodiscard]] typename RealScalar<T>::type norm_inf(const DenseMatrix<T>& a) {
  using R = typename RealScalar<T>::type;
  using structode::abs_value;
  R best(0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    R row(0);
    for (std::size_t j = 0; j < a.cols(); ++j) row += abs_value(a(i, j));
    if (row > best) best = row;
  }
  return best;
}

// ---------------------------------------------------------------------------
// LU with partial pivoting
// ---------------------------------------------------------------------------

template <class T>
struct LuFactorization {
  DenseMatrix<T> lu;               // L (unit diagonal, below) and U (above)
  std::vector<std::size_t> perm;   // row permutation applied to the input

  /// Solve for one right-hand-side matrix; columns are independent systems.
  [[nodiscard]] DenseMatrix<T> solve(const DenseMatrix<T>& b) const {
    const std::size_t n = lu.rows(), m = b.cols();
    DenseMatrix<T> x(n, m);
    for (std::size_t c = 0; c < m; ++c) {
      // forward substitution on the permuted RHS
      for (std::size_t i = 0; i < n; ++i) {
        T v = b(perm[i], c);
        for (std::size_t j = 0; j < i; ++j) v -= lu(i, j) * x(j, c);
        x(i, c) = v;
      }
      // back substitution
      for (std::size_t ii = n; ii-- > 0;) {
        T v = x(ii, c);
        for (std::size_t j = ii + 1; j < n; ++j) v -= lu(ii, j) * x(j, c);
        x(ii, c) = v / lu(ii, ii);
      }
    }
    return x;
  }

  [[nodiscard]] std::vector<T> solve(const std::vector<T>& b) const {
    DenseMatrix<T> rhs(b.size(), 1);
    for (std::size_t i = 0; i < b.size(); ++i) rhs(i, 0) = b[i];
    DenseMatrix<T> x = solve(rhs);
    std::vector<T> out(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = x(i, 0);
    return out;
  }
};

/// Factor a square matrix; throws SingularMatrix when the best remaining
/// pivot drops below 1e3 * eps * ||A||_inf.
template <class T>
[[nodiscard]] LuFactorization<T> lu_factor(DenseMatrix<T> a) {
  using R = typename RealScalar<T>::type;
  using structode::abs_value;
  const std::size_t n = a.rows();
  if (n != a.cols()) throw Error("lu_factor: matrix must be square");
  const R tol = R(1000) * machine_epsilon<R>() * norm_inf(a);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    R best = abs_value(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const R cand = abs_value(a(i, k));
      if (cand > best) {
        best = cand;
        piv = i;
      }
    }
    if (!(best > tol)) throw SingularMatrix("lu_factor: pivot below tolerance");
    if (piv != k) {
      std::swap(perm[k], perm[piv]);
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const T m = a(i, k) / a(k, k);
      a(i, k) = m;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
    }
  }
  return {std::move(a), std::move(perm)};
}

/// Solve A X = B with partial pivoting; B may hold many right-hand sides.
template <class T>
[[nodiscard]] DenseMatrix<T> lu_solve(const DenseMatrix<T>& a,
                                      const DenseMatrix<T>& b) {
  return lu_factor(a).solve(b);
}

// ---------------------------------------------------------------------------
// Exact elimination over a field (Rational), used wherever results must be
// reproduced coefficient-exactly.
// ---------------------------------------------------------------------------

/// Solve A X = B exactly; throws SingularMatrix when A is exactly singular.
template <class T>
[[nodiscard]] DenseMatrix<T> exact_solve(DenseMatrix<T> a, DenseMatrix<T> b) {
  const std::size_t n = a.rows(), m = b.cols();
  if (n != a.cols()) throw Error("exact_solve: matrix must be square");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && a(piv, k) == T(0)) ++piv;
    if (piv == n) throw SingularMatrix("exact_solve: zero pivot column");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(b(k, j), b(piv, j));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      if (a(i, k) == T(0)) continue;
      const T f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      for (std::size_t j = 0; j < m; ++j) b(i, j) -= f * b(k, j);
    }
  }
  DenseMatrix<T> x(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) x(i, j) = b(i, j) / a(i, i);
  return x;
}

template <class T>
[[nodiscard]] DenseMatrix<T> exact_inverse(const DenseMatrix<T>& a) {
  return exact_solve(a, DenseMatrix<T>::identity(a.rows()));
}

/// Exact determinant by Gaussian elimination over a field; returns the
/// field's zero for singular input.
template <class T>
[[nodiscard]] T exact_determinant(DenseMatrix<T> a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw Error("exact_determinant: matrix must be square");
  T det(1);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && a(piv, k) == T(0)) ++piv;
    if (piv == n) return T(0);
    if (piv != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det = det * a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k) == T(0)) continue;
      const T f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

// ---------------------------------------------------------------------------
// Exact null space by fraction-free (Bareiss) elimination
// ---------------------------------------------------------------------------

namespace detail {

/// Exact kernel basis by fraction-free elimination.  When require_full_rank
/// is set, throws RankDeficient unless rank == rows.
[[nodiscard]] inline std::vector<std::vector<Rational>> rational_kernel(
    const DenseMatrix<Rational>& a, bool require_full_rank) {
  const std::size_t rows = a.rows(), cols = a.cols();

  // Scale each row to integers (row scaling leaves the kernel unchanged).
  DenseMatrix<BigInt> w(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    BigInt scale = 1;
    for (std::size_t j = 0; j < cols; ++j)
      scale = lcm(scale, denominator(a(i, j)));
    for (std::size_t j = 0; j < cols; ++j)
      w(i, j) = numerator(a(i, j)) * (scale / denominator(a(i, j)));
  }

  // Fraction-free elimination to row-echelon form with row pivoting.
  std::vector<std::size_t> pivot_col;
  pivot_col.reserve(rows);
  BigInt prev = 1;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t piv = row;
    while (piv < rows && w(piv, col) == 0) ++piv;
    if (piv == rows) continue;  // free column
    if (piv != row)
      for (std::size_t j = 0; j < cols; ++j) std::swap(w(row, j), w(piv, j));
    for (std::size_t i = row + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j)
        w(i, j) = (w(row, col) * w(i, j) - w(i, col) * w(row, j)) / prev;
      w(i, col) = 0;
    }
    prev = w(row, col);
    pivot_col.push_back(col);
    ++row;
  }
  if (require_full_rank && row < rows)
    throw RankDeficient("rational_null_space: rank " + std::to_string(row) +
                        " < rows " + std::to_string(rows));
  const std::size_t rank = row;

  // Back-substitute one kernel vector per free column.
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivot_col) is_pivot[c] = true;

  std::vector<std::vector<Rational>> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[f] = 1;
    for (std::size_t r = rank; r-- > 0;) {
      const std::size_t pc = pivot_col[r];
      Rational acc(0);
      for (std::size_t j = pc + 1; j < cols; ++j)
        if (w(r, j) != 0) acc += Rational(w(r, j)) * v[j];
      v[pc] = -acc / Rational(w(r, pc));
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace detail

/// Exact kernel basis of a full-row-rank rational matrix.  Returns
/// cols - rows vectors v with A v = 0 exactly; throws RankDeficient when the
/// elimination finds rank < rows.
[[nodiscard]] inline std::vector<std::vector<Rational>> rational_null_space(
    const DenseMatrix<Rational>& a) {
  return detail::rational_kernel(a, /*require_full_rank=*/true);
}

/// Exact kernel basis without the full-row-rank requirement: returns
/// cols - rank(A) vectors.  Useful for rank probes on stacked spans.
[[nodiscard]] inline std::vector<std::vector<Rational>>
rational_null_space_allow_deficient(const DenseMatrix<Rational>& a) {
  return detail::rational_kernel(a, /*require_full_rank=*/false);
}

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD null space
// ---------------------------------------------------------------------------

/// Right-singular vectors belonging to the s smallest singular values,
/// computed by one-sided Jacobi rotations.  The returned vectors are
/// orthonormal to roundoff; throws NoConvergence when max_sweeps full sweeps
/// do not reach the relative-orthogonality threshold.
template <class T>
[[nodiscard]] std::vector<std::vector<T>> svd_null_space(
    const DenseMatrix<T>& a, std::size_t s, std::size_t max_sweeps = 100) {
  using std::sqrt;
  using structode::abs_value;
  const std::size_t m = a.rows(), n = a.cols();
  if (s > n) throw Error("svd_null_space: s exceeds column count");

  DenseMatrix<T> w = a;
  DenseMatrix<T> v = DenseMatrix<T>::identity(n);
  const T thresh = T(64) * machine_epsilon<T>();

  bool converged = false;
  for (std::size_t sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        T alpha(0), beta(0), gamma(0);
        for (std::size_t i = 0; i < m; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (alpha == T(0) || beta == T(0)) continue;
        if (abs_value(gamma) <= thresh * sqrt(alpha) * sqrt(beta)) continue;
        converged = false;
        const T zeta = (beta - alpha) / (T(2) * gamma);
        const T t = (zeta >= T(0) ? T(1) : T(-1)) /
                    (abs_value(zeta) + sqrt(T(1) + zeta * zeta));
        const T c = T(1) / sqrt(T(1) + t * t);
        const T sn = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const T wp = w(i, p);
          w(i, p) = c * wp - sn * w(i, q);
          w(i, q) = sn * wp + c * w(i, q);
        }
        for (std::size_t i = 0; i < n; ++i) {
          const T vp = v(i, p);
          v(i, p) = c * vp - sn * v(i, q);
          v(i, q) = sn * vp + c * v(i, q);
        }
      }
    }
  }
  if (!converged)
    throw NoConvergence("svd_null_space: Jacobi sweep cap reached");

  std::vector<std::pair<T, std::size_t>> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    T acc(0);
    for (std::size_t i = 0; i < m; ++i) acc += w(i, j) * w(i, j);
    sigma[j] = {acc, j};
  }
  std::sort(sigma.begin(), sigma.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  std::vector<std::vector<T>> out;
  out.reserve(s);
  for (std::size_t k = 0; k < s; ++k) {
    std::vector<T> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = v(i, sigma[k].second);
    out.push_back(std::move(col));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polynomials (ascending coefficients, exact or floating)
// ---------------------------------------------------------------------------

template <class T>
class Poly {
 public:
  Poly() = default;  // zero polynomial, degree -1
  explicit Poly(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
  [[nodiscard]] static Poly constant(const T& v) {
    return Poly(std::vector<T>{v});
  }

  /// Degree; the zero polynomial reports -1.
  [[nodiscard]] int degree() const { return static_cast<int>(c_.size()) - 1; }
  [[nodiscard]] bool is_zero() const { return c_.empty(); }
  [[nodiscard]] const std::vector<T>& coefficients() const { return c_; }
  [[nodiscard]] T coeff(std::size_t i) const {
    return i < c_.size() ? c_[i] : T(0);
  }

  [[nodiscard]] friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) + b.coeff(i);
    return Poly(std::move(c));
  }
  [[nodiscard]] friend Poly operator-(const Poly& a, const Poly& b) {
    std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) - b.coeff(i);
    return Poly(std::move(c));
  }
  [[nodiscard]] friend Poly operator-(const Poly& a) {
    std::vector<T> c = a.c_;
    for (T& x : c) x = -x;
    return Poly(std::move(c));
  }
  [[nodiscard]] friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j)
        c[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(c));
  }
  [[nodiscard]] friend Poly operator*(const T& s, const Poly& a) {
    std::vector<T> c = a.c_;
    for (T& x : c) x = s * x;
    return Poly(std::move(c));
  }
  [[nodiscard]] friend bool operator==(const Poly& a, const Poly& b) {
    return a.c_ == b.c_;
  }

  /// p(-z): flip the sign of odd coefficients.
  [[nodiscard]] Poly reflected() const {
    std::vector<T> c = c_;
    for (std::size_t i = 1; i < c.size(); i += 2) c[i] = -c[i];
    return Poly(std::move(c));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == T(0)) c_.pop_back();
  }
  std::vector<T> c_;
};

/// Evaluate an exact polynomial at z = complex point, at precision S.
template <class S>
[[nodiscard]] Complex<S> eval_poly(const Poly<Rational>& p,
                                   const Complex<S>& z) {
  Complex<S> acc(S(0), S(0));
  const auto& c = p.coefficients();
  for (std::size_t i = c.size(); i-- > 0;)
    acc = acc * z + Complex<S>(to_scalar<S>(c[i]));
  return acc;
}

/// Determinant of a small square matrix of polynomials, by cofactor
/// expansion along the first row.
template <class T>
[[nodiscard]] Poly<T> poly_det(const DenseMatrix<Poly<T>>& a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw Error("poly_det: matrix must be square");
  if (n == 0) return Poly<T>::constant(T(1));
  if (n == 1) return a(0, 0);
  Poly<T> acc;
  for (std::size_t j = 0; j < n; ++j) {
    if (a(0, j).is_zero()) continue;
    DenseMatrix<Poly<T>> minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t cc = 0;
      for (std::size_t jj = 0; jj < n; ++jj) {
        if (jj == j) continue;
        minor(i - 1, cc++) = a(i, jj);
      }
    }
    const Poly<T> term = a(0, j) * poly_det(minor);
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace structode::numerics
