#pragma once

// Certified rational bounds on the transcendental quantities that appear in
// solver stopping rules: the natural logarithm, the decaying exponential and
// the square root. Every routine returns a value that is >= the true
// quantity; callers rely only on that direction, never on tightness. All
// rounding is therefore upward, performed on exact rationals.

#include "bidmdp/rational.hpp"

namespace bidmdp::bounds {

/// Upper bound on ln(q) for q >= 1, within 2^-32 of the true value.
/// Throws std::invalid_argument for q < 1.
Rational ln_upper(const Rational& q);

/// Upper bound on e^{-x} for x >= 0, within 2^-32 of the true value
/// (intentionally loose for x >= 128, where any tiny bound suffices).
/// Throws std::invalid_argument for x < 0.
Rational exp_neg_upper(const Rational& x);

/// Upper bound s on sqrt(x) for x >= 0 with s*s >= x and s - sqrt(x) <= 2^-32.
/// Throws std::invalid_argument for x < 0.
Rational sqrt_upper(const Rational& x);

}  // namespace bidmdp::bounds
