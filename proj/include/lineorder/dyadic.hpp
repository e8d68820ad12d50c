#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace lineorder {

/// Thrown for malformed user input (bad literals, bad files, violated
/// preconditions of a public operation).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an internal consistency assertion fails. Never expected.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using Rational = mpq_class;

/// Exact dyadic rational numerator / 2^exponent.
///
/// Always normalized: exponent == 0 or the numerator is odd. Zero is stored
/// as 0/2^0, so structural equality coincides with numeric equality.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(long value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  explicit Dyadic(const mpz_class& value) : num_(value) {}

  /// numerator / 2^exponent, normalized. exponent may be negative.
  static Dyadic from_parts(mpz_class numerator, std::int64_t exponent);

  /// Accepts "p", "p/2^e", "p/q" with q a power of two, and decimal
  /// literals such as "-0.3125". Rejects anything that is not dyadic.
  static Dyadic parse(std::string_view text);

  const mpz_class& numerator() const { return num_; }
  std::int64_t exponent() const { return exp_; }

  Dyadic operator-() const;
  friend Dyadic operator+(const Dyadic& x, const Dyadic& y);
  friend Dyadic operator-(const Dyadic& x, const Dyadic& y);
  friend Dyadic operator*(const Dyadic& x, const Dyadic& y);
  Dyadic& operator+=(const Dyadic& y) { return *this = *this + y; }
  Dyadic& operator-=(const Dyadic& y) { return *this = *this - y; }
  Dyadic& operator*=(const Dyadic& y) { return *this = *this * y; }

  /// x * 2^k for any integer k.
  Dyadic scaled(std::int64_t k) const;
  Dyadic half() const { return scaled(-1); }

  friend bool operator==(const Dyadic& x, const Dyadic& y) {
    return x.exp_ == y.exp_ && x.num_ == y.num_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& x, const Dyadic& y);

  int sign() const { return sgn(num_); }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return exp_ == 0; }

  /// Greatest integer <= x.
  mpz_class floor() const;
  /// floor() as a machine integer; throws InvalidInput if it does not fit.
  std::int64_t floor_int() const;
  std::int64_t ceil_int() const;

  Rational to_rational() const;
  /// Nearest double; for diagnostics and plotting only.
  double to_double() const;

  /// "p" for integers, otherwise "p/2^e".
  std::string to_string() const;

 private:
  void normalize();

  mpz_class num_{0};
  std::int64_t exp_ = 0;
};

/// k with x == 2^k, or nullopt. Throws InvalidInput when x <= 0.
std::optional<std::int64_t> log2_exact(const Dyadic& x);

/// Exact conversion of a rational whose denominator is a power of two.
std::optional<Dyadic> to_dyadic(const Rational& q);

int compare(const Dyadic& x, const Rational& q);
std::string to_string(const Rational& q);

std::ostream& operator<<(std::ostream& os, const Dyadic& x);

}  // namespace lineorder
