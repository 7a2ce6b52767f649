#pragma once

// Exact rational arithmetic backed by GMP integers.
//
// Values are kept in lowest terms with a positive denominator. Budgets in
// bidding games arise from repeated halving, so the numbers flowing through
// value iteration almost always have power-of-two denominators; comparison
// and addition carry dedicated dyadic fast paths (shift + compare) that keep
// those operations linear in the operand size instead of paying for the
// cross-multiplication of a generic implementation.

#include <gmpxx.h>

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace bidmdp {

class Rational {
 public:
  /// Zero.
  Rational() : num_(0), den_(1) {}

  /// Integer value (also accepts int literals).
  Rational(long value) : num_(value), den_(1) {}  // NOLINT(runtime/explicit)

  explicit Rational(const mpz_class& value) : num_(value), den_(1) {}

  /// num/den in any form; reduced on construction.
  /// Throws std::invalid_argument if den == 0.
  Rational(mpz_class num, mpz_class den);

  Rational(long num, long den) : Rational(mpz_class(num), mpz_class(den)) {}

  /// Parses "3", "-3/4", or an exact decimal such as "0.25".
  /// Returns std::nullopt on malformed input (including zero denominators).
  static std::optional<Rational> parse(std::string_view text);

  const mpz_class& num() const { return num_; }
  const mpz_class& den() const { return den_; }

  int sign() const { return mpz_sgn(num_.get_mpz_t()); }
  bool is_zero() const { return sign() == 0; }
  bool is_integer() const { return den_ == 1; }

  /// Exact three-way comparison: -1, 0, or 1.
  int cmp(const Rational& other) const;

  bool operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;  // canonical form
  }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const { return cmp(o) < 0; }
  bool operator<=(const Rational& o) const { return cmp(o) <= 0; }
  bool operator>(const Rational& o) const { return cmp(o) > 0; }
  bool operator>=(const Rational& o) const { return cmp(o) >= 0; }

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const;

  /// Exact halving; cheap (a shift, never a gcd).
  Rational halved() const;

  /// Exact midpoint (a+b)/2.
  static Rational average(const Rational& a, const Rational& b);

  /// Largest multiple of 1/n that is <= this (n >= 1).
  Rational floor_to_grid(const mpz_class& n) const;
  /// Smallest multiple of 1/n that is >= this (n >= 1).
  Rational ceil_to_grid(const mpz_class& n) const;

  /// Exact integer floor / ceiling.
  mpz_class floor_int() const;
  mpz_class ceil_int() const;

  /// Nearest double (rounding handled by GMP); for rendering only.
  double to_double() const;

  /// Shortest form: "3" or "-3/4".
  std::string str() const;
  /// Always fractional: "3/1", "-3/4"; used by machine-readable outputs.
  std::string frac() const;

 private:
  mpz_class num_;
  mpz_class den_;  // invariant: den_ > 0, gcd(|num_|, den_) == 1, 0 == 0/1

  void normalize();
  /// Reduce assuming den_ is a power of two (strip shared factors of 2).
  void reduce_pow2(unsigned long exponent);
};

Rational abs(const Rational& a);
const Rational& min(const Rational& a, const Rational& b);
const Rational& max(const Rational& a, const Rational& b);

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace bidmdp
