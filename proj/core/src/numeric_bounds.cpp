#include "bidmdp/numeric_bounds.hpp"

#include <stdexcept>

namespace bidmdp::bounds {

namespace {

mpz_class pow2(unsigned long k) {
  mpz_class v;
  mpz_ui_pow_ui(v.get_mpz_t(), 2, k);
  return v;
}

/// Round a non-negative value upward, keeping ~`bits` significant bits.
/// The result is >= v with relative error at most 2^{1-bits}.
Rational round_up_sig(const Rational& v, unsigned long bits) {
  if (v.is_zero()) return v;
  const long exponent =
      static_cast<long>(mpz_sizeinbase(v.num().get_mpz_t(), 2)) -
      static_cast<long>(mpz_sizeinbase(v.den().get_mpz_t(), 2));
  const long shift = static_cast<long>(bits) - exponent;
  if (shift <= 0) return v;
  return v.ceil_to_grid(pow2(static_cast<unsigned long>(shift)));
}

/// atanh-series upper bound: ln((1+z)/(1-z)) = 2*sum_{j odd} z^j/j for
/// z in [0,1/3]. The partial sum underestimates; a geometric tail bound is
/// added to restore the upward direction.
Rational atanh_log_upper(const Rational& z) {
  constexpr unsigned kLastOdd = 25;
  Rational sum;
  Rational power = z;  // z^j for the current odd j
  const Rational z2 = z * z;
  for (unsigned j = 1; j <= kLastOdd; j += 2) {
    sum += power / Rational(static_cast<long>(j));
    power *= z2;
  }
  // power now holds z^{kLastOdd+2}.
  const Rational tail =
      power / (Rational(static_cast<long>(kLastOdd) + 2) * (Rational(1) - z2));
  Rational result = (sum + tail) * Rational(2);
  return round_up_sig(result, 96);
}

const Rational& ln2_upper() {
  static const Rational value = atanh_log_upper(Rational(1, 3));
  return value;
}

/// Alternating exponential series for e^{-f}, f in [0,1): truncating after
/// an even power keeps the partial sum >= the true value.
Rational exp_neg_fraction_upper(const Rational& f) {
  constexpr unsigned kLastEven = 16;
  Rational sum(1);
  Rational power(1);
  mpz_class factorial(1);
  for (unsigned k = 1; k <= kLastEven; ++k) {
    power *= f;
    factorial *= k;
    const Rational term = power / Rational(factorial);
    if (k % 2 == 1) {
      sum -= term;
    } else {
      sum += term;
    }
  }
  return sum;
}

const Rational& exp_neg_one_upper() {
  static const Rational value = exp_neg_fraction_upper(Rational(1));
  return value;
}

}  // namespace

Rational ln_upper(const Rational& q) {
  if (q < Rational(1)) {
    throw std::invalid_argument("ln_upper requires an argument >= 1");
  }
  // Find k with 2^k <= q < 2^{k+1}, then reduce to ln on [1,2).
  long k = static_cast<long>(mpz_sizeinbase(q.num().get_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(q.den().get_mpz_t(), 2));
  if (k < 0) k = 0;
  while (k > 0 && q < Rational(pow2(static_cast<unsigned long>(k)))) --k;
  while (q >= Rational(pow2(static_cast<unsigned long>(k) + 1))) ++k;

  const Rational m(q.num(), q.den() * pow2(static_cast<unsigned long>(k)));
  const Rational z = (m - Rational(1)) / (m + Rational(1));  // in [0, 1/3)
  Rational result = Rational(k) * ln2_upper();
  if (!z.is_zero()) result += atanh_log_upper(z);
  return round_up_sig(result, 96);
}

Rational exp_neg_upper(const Rational& x) {
  if (x.sign() < 0) {
    throw std::invalid_argument("exp_neg_upper requires an argument >= 0");
  }
  const mpz_class whole = x.floor_int();
  if (whole >= 128) {
    // e^{-x} <= e^{-128} < 2^{-120}; any small constant upper bound works
    // and avoids building numbers with astronomically long denominators.
    return Rational(mpz_class(1), pow2(120));
  }
  const Rational fraction_part = x - Rational(whole);
  const Rational head = exp_neg_fraction_upper(fraction_part);
  unsigned long exponent = mpz_get_ui(whole.get_mpz_t());
  if (exponent == 0) return head;

  // Binary exponentiation of the e^{-1} upper bound; upward rounding after
  // every multiply keeps operand sizes bounded and the direction sound.
  Rational factor(1);
  Rational base = exp_neg_one_upper();
  while (exponent > 0) {
    if (exponent & 1UL) factor = round_up_sig(factor * base, 96);
    exponent >>= 1UL;
    if (exponent > 0) base = round_up_sig(base * base, 96);
  }
  return round_up_sig(head * factor, 96);
}

Rational sqrt_upper(const Rational& x) {
  if (x.sign() < 0) {
    throw std::invalid_argument("sqrt_upper requires an argument >= 0");
  }
  if (x.is_zero()) return Rational(0);
  // ceil(x * 2^64), integer square root rounded up, rescale by 2^32.
  mpz_class scaled_num;
  mpz_mul_2exp(scaled_num.get_mpz_t(), x.num().get_mpz_t(), 64);
  mpz_class scaled;
  mpz_cdiv_q(scaled.get_mpz_t(), scaled_num.get_mpz_t(), x.den().get_mpz_t());
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
  if (root * root < scaled) root += 1;
  return Rational(root, pow2(32));
}

}  // namespace bidmdp::bounds
