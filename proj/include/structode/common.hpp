#pragma once
// Shared scalar types, error base class, and small helpers used across the
// structode library.
//
// Two working precisions are supported everywhere:
//   * binary64 (double)
//   * Ext, a 77-decimal-digit (~256-bit) binary float with deterministic
//     rounding, for benchmarks that push errors far below 1e-16.
// Exact arithmetic uses Rational (arbitrary-precision reduced fractions).

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace structode {

using Ext = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<77>,
    boost::multiprecision::et_off>;
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Machine epsilon of a floating scalar type.
template <class T>
[[nodiscard]] T machine_epsilon() {
  return std::numeric_limits<T>::epsilon();
}

/// abs() usable on double, Ext, and integral types through ADL.
template <class T>
[[nodiscard]] T abs_value(const T& x) {
  using std::abs;
  return abs(x);
}

/// pi at the working precision (4*atan(1) is exact to the last bit for both
/// supported scalar types).
template <class T>
[[nodiscard]] T pi_value() {
  using std::atan;
  return T(4) * atan(T(1));
}

/// Exact rational -> floating conversion at the target precision (never
/// routed through double, and safe for very large numerators/denominators).
template <class T>
[[nodiscard]] T to_scalar(const Rational& q) {
  return q.template convert_to<T>();
}

/// Parse a decimal literal at full working precision ("1e-60" stays 1e-60 in
/// Ext instead of being rounded through double first).
template <class T>
[[nodiscard]] T parse_scalar(const std::string& text) {
  return T(text);
}

template <>
[[nodiscard]] inline double parse_scalar<double>(const std::string& text) {
  return std::stod(text);
}

}  // namespace structode
