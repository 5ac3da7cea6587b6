#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace nagur {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses `INT` or `INT "/" POSINT` (optional leading '-'); the result is canonicalized.
Rational parse_rational(std::string_view text);

/// Canonical text: `n` or `n/d` with d > 1.
std::string to_string(const Rational& q);

Integer floor(const Rational& q);

inline Rational make_rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

} // namespace nagur
