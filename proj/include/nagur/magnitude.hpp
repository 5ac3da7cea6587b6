#pragma once

/*
 * Exact positive reals of the form  p1^e1 * p2^e2 * ... * pk^ek  with primes pi
 * and nonzero rational exponents ei, plus a distinguished zero.
 *
 * Every norm, weight and threshold in the library lives here. The class is closed
 * under products, quotients and k-th roots, and the order is decidable: two
 * magnitudes are equal iff their factor maps coincide (unique factorization), and
 * otherwise the sign of  sum ei*ln(pi)  is resolved by interval refinement of the
 * logarithms. A nonzero rational combination of logs of distinct primes is never
 * zero, so refinement always terminates.
 */

#include "nagur/error.hpp"
#include "nagur/rational.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace nagur {

using Prime = std::uint64_t;

struct Coset;
struct ValueGroupDescriptor;

class Magnitude {
public:
    using FactorMap = std::map<Prime, Rational>;

    /// The value 1.
    Magnitude() = default;

    static Magnitude zero();
    static Magnitude one() { return {}; }
    /// Factors a nonnegative rational; negative input is rejected.
    static Magnitude from_rational(const Rational& q);
    static Magnitude from_integer(long n) { return from_rational(Rational(n)); }
    static Magnitude prime_power(Prime p, const Rational& exponent);
    /// Builds from a factor map; keys must be prime, zero exponents are dropped.
    static Magnitude from_factors(FactorMap factors);

    /// Accepts the canonical grammar  `0 | TERM("*"TERM)*`, `TERM := PRIME "^" RATIONAL`,
    /// the literal `1`, and (for convenience on input) a positive rational literal.
    static Magnitude parse(std::string_view text);

    bool is_zero() const { return zero_; }
    bool is_one() const { return !zero_ && factors_.empty(); }
    const FactorMap& factors() const { return factors_; }
    Rational exponent_of(Prime p) const;

    /// The value as a rational, when every exponent is an integer.
    std::optional<Rational> to_rational() const;
    /// Natural logarithm as a double; only for estimates and display.
    double log_estimate() const;
    double to_double() const;

    std::string to_string() const;

    friend bool operator==(const Magnitude& a, const Magnitude& b) {
        return a.zero_ == b.zero_ && a.factors_ == b.factors_;
    }
    /// The real order (exact).
    friend std::strong_ordering operator<=>(const Magnitude& a, const Magnitude& b);

private:
    friend Magnitude operator*(const Magnitude& a, const Magnitude& b);
    friend Magnitude pow(const Magnitude& a, const Rational& e);
    friend Coset coset_of(const Magnitude& m, const ValueGroupDescriptor& g);

    bool zero_ = false;
    FactorMap factors_;
};

Magnitude operator*(const Magnitude& a, const Magnitude& b);
/// Throws DivisionByZero when b is zero.
Magnitude operator/(const Magnitude& a, const Magnitude& b);
/// k-th root; throws InvalidArgument for zero input or k == 0.
Magnitude root(const Magnitude& a, unsigned k);
/// a^e for rational e; zero only to a positive power.
Magnitude pow(const Magnitude& a, const Rational& e);

/// Exact three-way comparison (same as operator<=>).
std::strong_ordering compare(const Magnitude& a, const Magnitude& b);

const Magnitude& max(const Magnitude& a, const Magnitude& b);
const Magnitude& min(const Magnitude& a, const Magnitude& b);

/// Largest integer k with p^k <= m (m nonzero).
Integer floor_log(const Magnitude& m, Prime p);

/// Total order on factor maps; unrelated to the real order, used for map keys.
struct StructuralLess {
    bool operator()(const Magnitude& a, const Magnitude& b) const;
};

bool is_prime(const Integer& n);

// ---------------------------------------------------------------------------
// Value groups and cosets

enum class ValueGroupKind { Discrete, Dense };

/// The value group |K*| of a field: p^Z (discrete) or p^Q (dense).
struct ValueGroupDescriptor {
    Prime prime = 2;
    ValueGroupKind kind = ValueGroupKind::Discrete;

    /// p^-1, the absolute value of a uniformizer (of t for the dense backend).
    Magnitude uniformizer_magnitude() const { return Magnitude::prime_power(prime, -1); }
    bool contains(const Magnitude& m) const;
    bool is_dense() const { return kind == ValueGroupKind::Dense; }

    friend bool operator==(const ValueGroupDescriptor&, const ValueGroupDescriptor&) = default;
};

/// Canonical representative of m * |K*| in (0, inf) / |K*|.
///   Discrete: the factor map with the p-exponent reduced into [0, 1).
///   Dense:    the factor map with the p-exponent deleted.
struct Coset {
    Magnitude representative;

    bool is_trivial() const { return representative.is_one(); }
    std::string to_string() const { return representative.to_string(); }

    friend bool operator==(const Coset&, const Coset&) = default;
};

struct CosetLess {
    bool operator()(const Coset& a, const Coset& b) const {
        return StructuralLess{}(a.representative, b.representative);
    }
};

/// Throws InvalidArgument on zero.
Coset coset_of(const Magnitude& m, const ValueGroupDescriptor& g);

/// The element of coset c inside (lo, hi].
///
/// Discrete groups need hi/lo >= p; the answer is then unique when hi/lo == p, and
/// otherwise the candidate whose shift exponent is closest to zero (positive first).
/// Dense groups search shifts p^(n/2^j) for j = 0, 1, 2, ... and, inside one
/// denominator, by |n| ascending with positive n first.
Magnitude representative_in(const Coset& c, const Magnitude& lo, const Magnitude& hi,
                            const ValueGroupDescriptor& g);

/// Same search as representative_in, with the interval's openness at each end
/// chosen by the caller. Returns nothing when a discrete search finds no element.
std::optional<Magnitude> search_in_interval(const Magnitude& base, const Magnitude& lo, bool lo_open,
                                            const Magnitude& hi, bool hi_open,
                                            const ValueGroupDescriptor& g);

} // namespace nagur
