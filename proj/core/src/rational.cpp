#include "bidmdp/rational.hpp"

#include <cctype>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace bidmdp {

namespace {

int cmp3(const mpz_class& a, const mpz_class& b) {
  const int c = mpz_cmp(a.get_mpz_t(), b.get_mpz_t());
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

/// True iff d == 2^k for some k >= 0 (d must be positive); sets k.
bool pow2_exponent(const mpz_class& d, unsigned long& k) {
  if (mpz_popcount(d.get_mpz_t()) != 1) return false;
  k = mpz_sizeinbase(d.get_mpz_t(), 2) - 1;
  return true;
}

mpz_class shifted_left(const mpz_class& v, unsigned long bits) {
  mpz_class out;
  mpz_mul_2exp(out.get_mpz_t(), v.get_mpz_t(), bits);
  return out;
}

}  // namespace

Rational::Rational(mpz_class num, mpz_class den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
  normalize();
}

void Rational::normalize() {
  if (mpz_sgn(den_.get_mpz_t()) < 0) {
    mpz_neg(den_.get_mpz_t(), den_.get_mpz_t());
    mpz_neg(num_.get_mpz_t(), num_.get_mpz_t());
  }
  if (mpz_sgn(num_.get_mpz_t()) == 0) {
    den_ = 1;
    return;
  }
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
  if (g != 1) {
    mpz_divexact(num_.get_mpz_t(), num_.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
  }
}

void Rational::reduce_pow2(unsigned long exponent) {
  if (mpz_sgn(num_.get_mpz_t()) == 0) {
    den_ = 1;
    return;
  }
  const unsigned long tz = mpz_scan1(num_.get_mpz_t(), 0);
  const unsigned long s = tz < exponent ? tz : exponent;
  if (s == 0) return;
  mpz_fdiv_q_2exp(num_.get_mpz_t(), num_.get_mpz_t(), s);
  mpz_fdiv_q_2exp(den_.get_mpz_t(), den_.get_mpz_t(), s);
}

int Rational::cmp(const Rational& o) const {
  const int sa = sign(), sb = o.sign();
  if (sa != sb) return sa < sb ? -1 : 1;
  if (den_ == o.den_) return cmp3(num_, o.num_);
  unsigned long ka, kb;
  if (pow2_exponent(den_, ka) && pow2_exponent(o.den_, kb)) {
    // Bring both to the larger power-of-two denominator by shifting.
    if (ka < kb) return cmp3(shifted_left(num_, kb - ka), o.num_);
    return cmp3(num_, shifted_left(o.num_, ka - kb));
  }
  mpz_class lhs = num_ * o.den_;
  mpz_class rhs = o.num_ * den_;
  return cmp3(lhs, rhs);
}

Rational& Rational::operator+=(const Rational& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  if (den_ == o.den_) {
    num_ += o.num_;
    unsigned long k;
    if (pow2_exponent(den_, k)) {
      reduce_pow2(k);
    } else {
      normalize();
    }
    return *this;
  }
  unsigned long ka, kb;
  if (pow2_exponent(den_, ka) && pow2_exponent(o.den_, kb)) {
    if (ka < kb) {
      num_ = shifted_left(num_, kb - ka) + o.num_;
      den_ = o.den_;
      reduce_pow2(kb);
    } else {
      num_ += shifted_left(o.num_, ka - kb);
      reduce_pow2(ka);
    }
    return *this;
  }
  num_ = num_ * o.den_ + o.num_ * den_;
  den_ *= o.den_;
  normalize();
  return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  if (is_zero() || o.is_zero()) {
    num_ = 0;
    den_ = 1;
    return *this;
  }
  // Cross-cancel before multiplying to keep operands reduced.
  mpz_class g1, g2;
  mpz_gcd(g1.get_mpz_t(), num_.get_mpz_t(), o.den_.get_mpz_t());
  mpz_gcd(g2.get_mpz_t(), o.num_.get_mpz_t(), den_.get_mpz_t());
  mpz_class on = o.num_, od = o.den_;
  if (g1 != 1) {
    mpz_divexact(num_.get_mpz_t(), num_.get_mpz_t(), g1.get_mpz_t());
    mpz_divexact(od.get_mpz_t(), od.get_mpz_t(), g1.get_mpz_t());
  }
  if (g2 != 1) {
    mpz_divexact(on.get_mpz_t(), on.get_mpz_t(), g2.get_mpz_t());
    mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g2.get_mpz_t());
  }
  num_ *= on;
  den_ *= od;
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("rational division by zero");
  *this = Rational(num_ * o.den_, den_ * o.num_);
  return *this;
}

Rational Rational::operator-() const {
  Rational out;
  mpz_neg(out.num_.get_mpz_t(), num_.get_mpz_t());
  out.den_ = den_;
  return out;
}

Rational Rational::halved() const {
  Rational out;
  if (mpz_even_p(num_.get_mpz_t())) {
    mpz_fdiv_q_2exp(out.num_.get_mpz_t(), num_.get_mpz_t(), 1);
    out.den_ = den_;
  } else {
    out.num_ = num_;
    out.den_ = shifted_left(den_, 1);
  }
  return out;
}

Rational Rational::average(const Rational& a, const Rational& b) {
  Rational sum = a;
  sum += b;
  return sum.halved();
}

Rational Rational::floor_to_grid(const mpz_class& n) const {
  mpz_class q;
  mpz_class scaled = num_ * n;
  mpz_fdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), den_.get_mpz_t());
  return Rational(std::move(q), n);
}

Rational Rational::ceil_to_grid(const mpz_class& n) const {
  mpz_class q;
  mpz_class scaled = num_ * n;
  mpz_cdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), den_.get_mpz_t());
  return Rational(std::move(q), n);
}

mpz_class Rational::floor_int() const {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
  return q;
}

mpz_class Rational::ceil_int() const {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
  return q;
}

double Rational::to_double() const {
  mpq_t q;
  mpq_init(q);
  mpz_set(mpq_numref(q), num_.get_mpz_t());
  mpz_set(mpq_denref(q), den_.get_mpz_t());
  const double d = mpq_get_d(q);
  mpq_clear(q);
  return d;
}

std::optional<Rational> Rational::parse(std::string_view text) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  const auto all_digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
  };

  size_t split = 0;
  while (split < text.size() &&
         std::isdigit(static_cast<unsigned char>(text[split]))) {
    ++split;
  }
  if (split == 0) return std::nullopt;
  const std::string head(text.substr(0, split));

  mpz_class num, den;
  if (split == text.size()) {
    num = mpz_class(head, 10);
    den = 1;
  } else if (text[split] == '/') {
    const std::string_view tail = text.substr(split + 1);
    if (!all_digits(tail)) return std::nullopt;
    num = mpz_class(head, 10);
    den = mpz_class(std::string(tail), 10);
    if (den == 0) return std::nullopt;
  } else if (text[split] == '.') {
    const std::string_view tail = text.substr(split + 1);
    if (!all_digits(tail)) return std::nullopt;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, tail.size());
    num = mpz_class(head, 10) * scale + mpz_class(std::string(tail), 10);
    den = scale;
  } else {
    return std::nullopt;
  }
  if (negative) mpz_neg(num.get_mpz_t(), num.get_mpz_t());
  return Rational(std::move(num), std::move(den));
}

std::string Rational::str() const {
  if (den_ == 1) return num_.get_str();
  return num_.get_str() + "/" + den_.get_str();
}

std::string Rational::frac() const {
  return num_.get_str() + "/" + den_.get_str();
}

Rational abs(const Rational& a) { return a.sign() < 0 ? -a : a; }

const Rational& min(const Rational& a, const Rational& b) {
  return b < a ? b : a;
}

const Rational& max(const Rational& a, const Rational& b) {
  return a < b ? b : a;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  return os << r.str();
}

}  // namespace bidmdp
