#pragma once
// Structural equations for SK(K, R) schemes.
//
// A scheme couples, across a block of R time nodes, the values and the first
// K derivatives of the unknown.  Exactness on the monomial family
// pi_m(x) = x^(m-1) yields a linear constraint matrix
//     M[m, ell(k, r)] = C^m_k * r^(m-1-k),   ell(k, r) = k*(R+1) + r,
// with C^m_k = (m-1)!/(m-1-k)! when m-1 >= k and 0 otherwise, for
// m = 1 .. M = (K+1)(R+1).  A structural equation of exactness level s is an
// element of the kernel of the first M - s rows; the solver uses a basis of
// S = R independent equations.

#include "structode/numerics.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace structode::structural {

using numerics::DenseMatrix;
using structode::BigInt;
using structode::Error;
using structode::Rational;

/// K, R, or S outside the supported ranges.
struct InvalidScheme : Error {
  using Error::Error;
};
/// basis_analytic was asked for a (K, R, S) outside the built-in catalog.
struct NotInCatalog : Error {
  using Error::Error;
};
/// The zero-order in-block coefficient matrix A^(0) is singular.
struct SingularA0 : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Scheme identity
// ---------------------------------------------------------------------------

/// Identifies a scheme: derivative depth K, block size R, and the number of
/// structural equations S (defaults to R, the solver configuration).
struct SchemeId {
  int K = 1;
  int R = 1;
  int S = 1;

  SchemeId(int k, int r) : SchemeId(k, r, r) {}
  SchemeId(int k, int r, int s) : K(k), R(r), S(s) {
    if (K < 1 || K > 4) throw InvalidScheme("K must be in 1..4");
    if (R < 1 || R > 8) throw InvalidScheme("R must be in 1..8");
    if (S < 1 || S > size() - 1)
      throw InvalidScheme("S must be in 1..M-1");
  }

  /// M = (K+1)(R+1), the total number of block unknowns per component.
  [[nodiscard]] int size() const { return (K + 1) * (R + 1); }
  /// Flat column index of the coefficient of dt^k phi^(k)_{n+r}.
  [[nodiscard]] int column(int k, int r) const { return k * (R + 1) + r; }
};

// ---------------------------------------------------------------------------
// Constraint matrix
// ---------------------------------------------------------------------------

namespace detail {
/// (m-1)(m-2)...(m-k) as an exact integer; 1 when k = 0.
[[nodiscard]] inline BigInt falling_factorial(int m_minus_1, int k) {
  BigInt acc = 1;
  for (int i = 0; i < k; ++i) acc *= (m_minus_1 - i);
  return acc;
}

[[nodiscard]] inline BigInt int_pow(int base, int exp) {
  BigInt acc = 1;
  for (int i = 0; i < exp; ++i) acc *= base;
  return acc;
}
}  // namespace detail

/// Full M x M exactness-constraint matrix of the scheme.
[[nodiscard]] inline DenseMatrix<Rational> build_constraint_matrix(
    const SchemeId& id) {
  const int m_total = id.size();
  DenseMatrix<Rational> a(m_total, m_total);
  for (int m = 1; m <= m_total; ++m)
    for (int k = 0; k <= id.K; ++k) {
      if (m - 1 < k) continue;
      const BigInt c = detail::falling_factorial(m - 1, k);
      for (int r = 0; r <= id.R; ++r)
        a(m - 1, id.column(k, r)) = Rational(c * detail::int_pow(r, m - 1 - k));
    }
  return a;
}

// ---------------------------------------------------------------------------
// Structural bases
// ---------------------------------------------------------------------------

/// A set of S independent structural equations for one scheme.  Vectors are
/// integer-normalized: integral entries with content 1 and a positive leading
/// nonzero coefficient.
struct StructuralBasis {
  SchemeId id;
  std::vector<std::vector<Rational>> vectors;  // S rows of length M
  std::vector<int> exactness;                  // per-equation exactness degree

  /// Degree through which every equation in the basis annihilates pi_m:
  /// M - S - 1 for the standard constructions.
  [[nodiscard]] int exactness_degree() const { return id.size() - id.S - 1; }

  [[nodiscard]] const Rational& coeff(int s, int k, int r) const {
    return vectors[s][id.column(k, r)];
  }
};

namespace detail {
/// Scale to integer entries with content 1 and positive leading nonzero.
[[nodiscard]] inline std::vector<Rational> normalize_equation(
    std::vector<Rational> v) {
  BigInt den_lcm = 1;
  for (const Rational& x : v) den_lcm = lcm(den_lcm, denominator(x));
  BigInt content = 0;
  std::vector<BigInt> ints(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    ints[i] = numerator(v[i]) * (den_lcm / denominator(v[i]));
    content = gcd(content, ints[i]);
  }
  if (content == 0) throw Error("normalize_equation: zero vector");
  int sign = 0;
  for (const BigInt& x : ints)
    if (x != 0) {
      sign = x > 0 ? 1 : -1;
      break;
    }
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = Rational(ints[i] * sign / content);
  return v;
}

struct CatalogEntry {
  int K, R;
  std::vector<std::vector<long long>> eqs;
};

#include "structode/catalog_data.inl"
}  // namespace detail

/// Exact kernel basis of the first M - S constraint rows.
[[nodiscard]] inline StructuralBasis basis_exact(const SchemeId& id) {
  const int m_total = id.size();
  const DenseMatrix<Rational> constraints =
      build_constraint_matrix(id).top_rows(m_total - id.S);
  std::vector<std::vector<Rational>> kernel =
      numerics::rational_null_space(constraints);
  StructuralBasis basis{id, {}, {}};
  for (std::vector<Rational>& v : kernel) {
    basis.vectors.push_back(detail::normalize_equation(std::move(v)));
    basis.exactness.push_back(m_total - id.S - 1);
  }
  return basis;
}

/// Closed-form catalogued equations (K = 1 R <= 3, K = 2 R <= 3, K = 3
/// R <= 2).  The first S catalog rows form a valid S-equation basis; row s
/// has exactness degree M - s - 1.
[[nodiscard]] inline StructuralBasis basis_analytic(const SchemeId& id) {
  for (const detail::CatalogEntry& entry : detail::catalog_entries()) {
    if (entry.K != id.K || entry.R != id.R) continue;
    if (id.S > static_cast<int>(entry.eqs.size()))
      throw NotInCatalog("catalog lists only " +
                         std::to_string(entry.eqs.size()) + " equations for (" +
                         std::to_string(id.K) + ", " + std::to_string(id.R) +
                         ")");
    StructuralBasis basis{id, {}, {}};
    for (int s = 0; s < id.S; ++s) {
      std::vector<Rational> v(entry.eqs[s].size());
      for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = Rational(entry.eqs[s][i]);
      basis.vectors.push_back(std::move(v));
      basis.exactness.push_back(id.size() - (s + 1) - 1);
    }
    return basis;
  }
  throw NotInCatalog("no catalogued equations for (" + std::to_string(id.K) +
                     ", " + std::to_string(id.R) + ")");
}

/// Hierarchical basis: equation s lies in the kernel of the first M - s
/// constraint rows and is orthogonal (exactly, in rational arithmetic) to
/// equations 1 .. s-1.
[[nodiscard]] inline StructuralBasis basis_hierarchical(const SchemeId& id) {
  const int m_total = id.size();
  const DenseMatrix<Rational> full = build_constraint_matrix(id);
  StructuralBasis basis{id, {}, {}};
  for (int s = 1; s <= id.S; ++s) {
    const std::vector<std::vector<Rational>> kernel =
        numerics::rational_null_space(full.top_rows(m_total - s));
    std::vector<Rational> v;
    if (s == 1) {
      v = kernel.front();
    } else {
      // Coefficients c with sum_j c_j <kernel_j, prev_t> = 0 for all t < s.
      DenseMatrix<Rational> ortho(s - 1, s);
      for (int t = 0; t < s - 1; ++t)
        for (int j = 0; j < s; ++j) {
          Rational dot(0);
          for (int i = 0; i < m_total; ++i)
            dot += kernel[j][i] * basis.vectors[t][i];
          ortho(t, j) = dot;
        }
      const std::vector<std::vector<Rational>> coeffs =
          numerics::rational_null_space(ortho);
      v.assign(m_total, Rational(0));
      for (int j = 0; j < s; ++j)
        for (int i = 0; i < m_total; ++i)
          v[i] += coeffs.front()[j] * kernel[j][i];
    }
    basis.vectors.push_back(detail::normalize_equation(std::move(v)));
    basis.exactness.push_back(m_total - s - 1);
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Split form used by the solver
// ---------------------------------------------------------------------------

/// The S = R basis reorganized for the block solve: per derivative order k an
/// R x R in-block matrix A^(k) (columns r = 1..R) plus the anchor column
/// a-hat^(k) (r = 0).  A^(0) is verified invertible and its exact inverse is
/// kept for reuse.
struct SplitBasis {
  int K = 0, R = 0;
  std::vector<DenseMatrix<Rational>> a;        // K+1 matrices, R x R
  std::vector<std::vector<Rational>> anchors;  // K+1 columns, length R
  DenseMatrix<Rational> a0_inverse;
};

[[nodiscard]] inline SplitBasis split(const StructuralBasis& basis) {
  const SchemeId& id = basis.id;
  if (id.S != id.R)
    throw Error("split: solver form requires S = R");
  SplitBasis out;
  out.K = id.K;
  out.R = id.R;
  out.a.assign(id.K + 1, DenseMatrix<Rational>(id.R, id.R));
  out.anchors.assign(id.K + 1, std::vector<Rational>(id.R));
  for (int k = 0; k <= id.K; ++k)
    for (int s = 0; s < id.S; ++s) {
      out.anchors[k][s] = basis.coeff(s, k, 0);
      for (int r = 1; r <= id.R; ++r)
        out.a[k](s, r - 1) = basis.coeff(s, k, r);
    }
  try {
    out.a0_inverse = numerics::exact_inverse(out.a[0]);
  } catch (const numerics::SingularMatrix&) {
    throw SingularA0("split: A^(0) is singular");
  }
  return out;
}

/// Basis of the given variant: catalogued equations where available, the
/// deterministic level-by-level construction otherwise.  Both routes produce
/// the identical normalized equations on every catalogued pair, so this is a
/// pure extension.
[[nodiscard]] inline StructuralBasis scheme_basis(const SchemeId& id) {
  try {
    return basis_analytic(id);
  } catch (const NotInCatalog&) {
    return basis_hierarchical(id);
  }
}

/// Basis of the given variant in solver form.
[[nodiscard]] inline SplitBasis split_basis(const SchemeId& id) {
  return split(scheme_basis(id));
}

// ---------------------------------------------------------------------------
// JSON export
// ---------------------------------------------------------------------------

/// Schema: {K, R, S, vectors: [[[num, den], ...], ...], exactness_degree};
/// numerators and denominators are decimal strings (entries can exceed any
/// fixed-width integer for large K, R).
[[nodiscard]] inline std::string to_json(const StructuralBasis& basis) {
  nlohmann::json j;
  j["K"] = basis.id.K;
  j["R"] = basis.id.R;
  j["S"] = basis.id.S;
  j["exactness_degree"] = basis.exactness_degree();
  nlohmann::json vectors = nlohmann::json::array();
  for (const std::vector<Rational>& v : basis.vectors) {
    nlohmann::json row = nlohmann::json::array();
    for (const Rational& x : v)
      row.push_back({numerator(x).str(), denominator(x).str()});
    vectors.push_back(std::move(row));
  }
  j["vectors"] = std::move(vectors);
  return j.dump(2);
}

}  // namespace structode::structural
