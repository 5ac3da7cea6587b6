#pragma once

#include "nagur/error.hpp"
#include "nagur/magnitude.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nagur {

enum class Backend {
    PadicRational,  ///< Q with the p-adic absolute value (dense in Q_p), value group p^Z
    HahnTruncated,  ///< finite-support Hahn series over Q in t^Q with |t| = 1/p, value group p^Q
};

struct FieldDescriptor {
    Backend backend = Backend::PadicRational;
    Prime prime = 2;
    /// Meta-level flag: the completed field of both backends is spherically complete.
    bool spherically_complete_meta = true;
    /// Relative truncation order used by Hahn inversion.
    Rational default_tail_order = 8;

    static FieldDescriptor padic(Prime p);
    static FieldDescriptor hahn(Prime p, Rational tail_order = 8);

    ValueGroupDescriptor value_group() const;
    bool is_dense() const { return backend == Backend::HahnTruncated; }
    std::string backend_name() const;

    friend bool operator==(const FieldDescriptor&, const FieldDescriptor&) = default;
};

class NotInValueGroup : public InvalidArgument {
public:
    NotInValueGroup(const Magnitude& m, Coset c)
        : InvalidArgument("magnitude " + m.to_string() + " is not in the value group (coset " + c.to_string() + ")"),
          coset(std::move(c)) {}
    Coset coset;
};

class EmptyIntersection : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct HahnTerm {
    Rational coeff;
    Rational exponent;
    friend bool operator==(const HahnTerm&, const HahnTerm&) = default;
};

/// sum c_i t^(e_i) + O(t^tail): exponents strictly increasing, coefficients nonzero,
/// every exponent below the tail order. No tail means the sum is exact.
class HahnSeries {
public:
    HahnSeries() = default;
    static HahnSeries constant(const Rational& c) { return monomial(c, 0); }
    static HahnSeries monomial(const Rational& c, const Rational& exponent);
    static HahnSeries big_o(const Rational& order);
    /// Normalizes: sorts, merges equal exponents, drops zeros and terms at or above the tail.
    static HahnSeries from_terms(std::vector<HahnTerm> terms, std::optional<Rational> tail = std::nullopt);

    static HahnSeries parse(std::string_view text);
    std::string to_string() const;

    const std::vector<HahnTerm>& terms() const { return terms_; }
    const std::optional<Rational>& tail() const { return tail_; }

    bool is_exact_zero() const { return terms_.empty() && !tail_; }
    /// Only a tail remains: the valuation is unknown.
    bool is_unknown() const { return terms_.empty() && tail_.has_value(); }
    /// Throws PrecisionExhausted when unknown, InvalidArgument when exactly zero.
    const Rational& leading_exponent() const;

    HahnSeries operator-() const;
    friend HahnSeries operator+(const HahnSeries& a, const HahnSeries& b);
    friend HahnSeries operator-(const HahnSeries& a, const HahnSeries& b) { return a + (-b); }
    friend HahnSeries operator*(const HahnSeries& a, const HahnSeries& b);
    /// Geometric-series inverse, truncated `relative_order` above the leading exponent.
    HahnSeries inverse(const Rational& relative_order) const;

    friend bool operator==(const HahnSeries&, const HahnSeries&) = default;

private:
    std::vector<HahnTerm> terms_;
    std::optional<Rational> tail_;
};

/// A field element of either backend.
class Scalar {
public:
    Scalar() = default;  // p-adic zero
    explicit Scalar(Rational q) : value_(std::move(q)) {}
    explicit Scalar(HahnSeries s) : value_(std::move(s)) {}

    static Scalar zero(const FieldDescriptor& f);
    static Scalar one(const FieldDescriptor& f) { return from_rational(1, f); }
    static Scalar from_rational(const Rational& q, const FieldDescriptor& f);
    static Scalar parse(std::string_view text, const FieldDescriptor& f);

    Backend backend() const;
    bool is_padic() const { return std::holds_alternative<Rational>(value_); }
    const Rational& rational() const { return std::get<Rational>(value_); }
    const HahnSeries& series() const { return std::get<HahnSeries>(value_); }

    /// Throws PrecisionExhausted for an unknown Hahn series.
    bool is_zero() const;
    std::string to_string() const;

    Scalar operator-() const;
    friend Scalar operator+(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a, const Scalar& b);
    friend Scalar operator*(const Scalar& a, const Scalar& b);

    friend bool operator==(const Scalar&, const Scalar&) = default;

private:
    std::variant<Rational, HahnSeries> value_;
};

/// p-adic valuation of a nonzero integer.
long padic_valuation(const Integer& n, Prime p);

/// |a|: p^(-v_p(a)) for the p-adic backend, p^(-leading exponent) for Hahn series.
Magnitude abs(const Scalar& a, const FieldDescriptor& f);

Scalar inverse(const Scalar& a, const FieldDescriptor& f);
Scalar divide(const Scalar& a, const Scalar& b, const FieldDescriptor& f);

/// The canonical scalar with absolute value m: p^-k for m = p^k (p-adic), t^-q for m = p^q (Hahn).
Scalar scalar_with_abs(const Magnitude& m, const FieldDescriptor& f);

/// A scalar whose absolute value lies in (lo, hi], chosen by the representative_in search order.
Scalar scalar_with_abs_in(const Magnitude& lo, const Magnitude& hi, const FieldDescriptor& f);

} // namespace nagur
