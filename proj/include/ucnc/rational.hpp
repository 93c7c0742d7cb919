#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace ucnc {

using Rational = mpq_class;

/// Largest denominator accepted when a decimal literal is converted to a
/// rational. Literals that need more are replaced by their best rational
/// approximation under this bound.
inline constexpr std::int64_t kMaxDenominator = 1'000'000;

/// Parses "3", "-2/7", "0.8" or "1e-3" into an exact rational. Fractions are
/// kept exactly; decimals are converted exactly and then bounded to
/// kMaxDenominator. Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// Converts a double through its shortest round-trip decimal representation.
Rational rational_from_double(double value);

/// Best approximation p/q of `value` with q <= max_den (continued fractions).
Rational limit_denominator(const Rational& value, std::int64_t max_den);

/// "p/q" or "p" when q == 1.
std::string to_string(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }

}  // namespace ucnc
