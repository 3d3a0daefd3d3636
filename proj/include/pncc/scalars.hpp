#pragma once

// Scalar types and numeric helpers shared across the library.
//
// Every algorithm is templated on the scalar; three instantiations are
// supported:
//   double   - IEEE double precision,
//   Float50  - 50-decimal-digit binary floating point,
//   Rational - exact GMP-backed rationals (exact determinant signs).
// Expression templates are disabled so the types behave as plain value
// scalars inside Eigen expressions.

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace pncc {

using Float50 =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>,
                                  boost::multiprecision::et_off>;
using Rational =
    boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                  boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::mpz_int;

enum class ArithmeticMode { Double, Extended, Exact };

inline const char* to_string(ArithmeticMode m) {
  switch (m) {
    case ArithmeticMode::Double: return "double";
    case ArithmeticMode::Extended: return "extended";
    case ArithmeticMode::Exact: return "exact";
  }
  return "unknown";
}

template <typename Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr ArithmeticMode mode = ArithmeticMode::Double;
  static constexpr bool is_exact = false;
};

template <>
struct ScalarTraits<Float50> {
  static constexpr ArithmeticMode mode = ArithmeticMode::Extended;
  static constexpr bool is_exact = false;
};

template <>
struct ScalarTraits<Rational> {
  static constexpr ArithmeticMode mode = ArithmeticMode::Exact;
  static constexpr bool is_exact = true;
};

template <typename Scalar>
inline constexpr bool is_exact_v = ScalarTraits<Scalar>::is_exact;

template <typename Scalar>
inline constexpr ArithmeticMode mode_v = ScalarTraits<Scalar>::mode;

// Default relative tolerance: ~4.5e6 ulp, which is 1e-9 in double
// precision. Exact arithmetic uses zero tolerance.
template <typename Scalar>
Scalar default_tolerance() {
  if constexpr (is_exact_v<Scalar>) {
    return Scalar(0);
  } else {
    return Scalar(4.5e6) * std::numeric_limits<Scalar>::epsilon();
  }
}

template <typename Scalar>
double to_double(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return x;
  } else {
    return x.template convert_to<double>();
  }
}

template <typename Scalar>
Scalar from_double(double x) {
  return Scalar(x);
}

template <typename Scalar>
bool is_finite_value(const Scalar& x) {
  if constexpr (is_exact_v<Scalar>) {
    (void)x;
    return true;
  } else {
    using std::isfinite;
    return isfinite(x);
  }
}

inline BigInt factorial_int(long n) {
  if (n < 0) throw std::invalid_argument("factorial of negative integer");
  BigInt f = 1;
  for (long i = 2; i <= n; ++i) f *= i;
  return f;
}

// n! / (n-m)! = n (n-1) ... (n-m+1); zero when m > n.
inline BigInt falling_factorial_int(long n, long m) {
  if (n < 0 || m < 0) throw std::invalid_argument("negative falling factorial argument");
  if (m > n) return BigInt(0);
  BigInt f = 1;
  for (long i = n - m + 1; i <= n; ++i) f *= i;
  return f;
}

// Integer factorials are computed exactly and then converted; a conversion
// that leaves the scalar's finite range throws instead of wrapping.
template <typename Scalar>
Scalar convert_big(const BigInt& v) {
  Scalar out;
  if constexpr (std::is_same_v<Scalar, double>) {
    out = v.convert_to<double>();
  } else {
    out = v.template convert_to<Scalar>();
  }
  if (!is_finite_value(out))
    throw std::overflow_error("integer value exceeds scalar range; use a wider arithmetic mode");
  return out;
}

template <typename Scalar>
Scalar factorial_as(long n) {
  return convert_big<Scalar>(factorial_int(n));
}

template <typename Scalar>
Scalar falling_factorial_as(long n, long m) {
  return convert_big<Scalar>(falling_factorial_int(n, m));
}

// Neumaier compensated accumulation for the floating modes; exact scalars
// accumulate directly.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(const Scalar& term) {
    if constexpr (is_exact_v<Scalar>) {
      sum_ += term;
    } else {
      using std::abs;
      const Scalar t = sum_ + term;
      if (abs(sum_) >= abs(term))
        compensation_ += (sum_ - t) + term;
      else
        compensation_ += (term - t) + sum_;
      sum_ = t;
    }
  }

  Scalar value() const {
    if constexpr (is_exact_v<Scalar>) return sum_;
    else return sum_ + compensation_;
  }

 private:
  Scalar sum_ = Scalar(0);
  Scalar compensation_ = Scalar(0);
};

// Parses a decimal literal ("0.44", "-1.2e-3") or a fraction ("44/100").
// For the exact scalar the decimal digits are honoured exactly.
inline Rational parse_exact_decimal(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty numeric literal");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const Rational num(text.substr(0, slash));
    const Rational den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return num / den;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false, seen_digit = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) ++frac_digits;
      seen_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c == 'e' || c == 'E') {
      break;
    } else {
      throw std::invalid_argument("malformed numeric literal '" + text + "'");
    }
  }
  long exponent = 0;
  if (pos < text.size()) {
    exponent = std::stol(text.substr(pos + 1));
  }
  if (!seen_digit) throw std::invalid_argument("malformed numeric literal '" + text + "'");
  // strip leading zeros: GMP's string constructor would read them as octal
  const auto first_nonzero = digits.find_first_not_of('0');
  digits = first_nonzero == std::string::npos ? "0" : digits.substr(first_nonzero);
  BigInt mantissa(digits);
  Rational value(mantissa);
  const long net = exponent - frac_digits;
  BigInt scale = 1;
  for (long i = 0; i < (net < 0 ? -net : net); ++i) scale *= 10;
  if (net >= 0)
    value *= Rational(scale);
  else
    value /= Rational(scale);
  return negative ? -value : value;
}

template <typename Scalar>
Scalar parse_scalar(const std::string& text) {
  try {
    if constexpr (std::is_same_v<Scalar, Rational>) {
      return parse_exact_decimal(text);
    } else if constexpr (std::is_same_v<Scalar, double>) {
      std::size_t used = 0;
      const auto slash = text.find('/');
      if (slash != std::string::npos)
        return parse_scalar<double>(text.substr(0, slash)) /
               parse_scalar<double>(text.substr(slash + 1));
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing characters");
      return v;
    } else {
      const auto slash = text.find('/');
      if (slash != std::string::npos)
        return Scalar(text.substr(0, slash)) / Scalar(text.substr(slash + 1));
      return Scalar(text);
    }
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("malformed numeric literal '" + text + "'");
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed numeric literal '" + text + "'");
  }
}

template <typename Scalar>
std::string scalar_to_string(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
  } else {
    return x.str();
  }
}

}  // namespace pncc

namespace Eigen {

template <>
struct NumTraits<pncc::Float50> : GenericNumTraits<pncc::Float50> {
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 8,
    MulCost = 16
  };
};

template <>
struct NumTraits<pncc::Rational> : GenericNumTraits<pncc::Rational> {
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 40,
    MulCost = 40
  };
  // Zero epsilon keeps Eigen's rank decisions exact for rational data.
  static pncc::Rational epsilon() { return pncc::Rational(0); }
  static pncc::Rational dummy_precision() { return pncc::Rational(0); }
  static int digits10() { return 0; }
};

}  // namespace Eigen
