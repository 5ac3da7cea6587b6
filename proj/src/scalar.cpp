#include "nagur/scalar.hpp"

#include <algorithm>
#include <cctype>

namespace nagur {

FieldDescriptor FieldDescriptor::padic(Prime p) {
    if (!is_prime(Integer(static_cast<unsigned long>(p)))) throw InvalidArgument("field prime must be prime");
    FieldDescriptor f;
    f.backend = Backend::PadicRational;
    f.prime = p;
    return f;
}

FieldDescriptor FieldDescriptor::hahn(Prime p, Rational tail_order) {
    if (!is_prime(Integer(static_cast<unsigned long>(p)))) throw InvalidArgument("field prime must be prime");
    if (sgn(tail_order) <= 0) throw InvalidArgument("tail order must be positive");
    FieldDescriptor f;
    f.backend = Backend::HahnTruncated;
    f.prime = p;
    f.default_tail_order = std::move(tail_order);
    return f;
}

ValueGroupDescriptor FieldDescriptor::value_group() const {
    return {prime, backend == Backend::PadicRational ? ValueGroupKind::Discrete : ValueGroupKind::Dense};
}

std::string FieldDescriptor::backend_name() const {
    return backend == Backend::PadicRational ? "padic" : "hahn";
}

// ---------------------------------------------------------------------------
// HahnSeries

HahnSeries HahnSeries::monomial(const Rational& c, const Rational& exponent) {
    return from_terms({{c, exponent}});
}

HahnSeries HahnSeries::big_o(const Rational& order) {
    HahnSeries s;
    s.tail_ = order;
    return s;
}

HahnSeries HahnSeries::from_terms(std::vector<HahnTerm> terms, std::optional<Rational> tail) {
    std::sort(terms.begin(), terms.end(),
              [](const HahnTerm& a, const HahnTerm& b) { return a.exponent < b.exponent; });
    HahnSeries s;
    s.tail_ = std::move(tail);
    for (auto& t : terms) {
        if (s.tail_ && t.exponent >= *s.tail_) break;
        if (!s.terms_.empty() && s.terms_.back().exponent == t.exponent) {
            s.terms_.back().coeff += t.coeff;
            if (sgn(s.terms_.back().coeff) == 0) s.terms_.pop_back();
        } else if (sgn(t.coeff) != 0) {
            s.terms_.push_back(std::move(t));
        }
    }
    return s;
}

const Rational& HahnSeries::leading_exponent() const {
    if (is_unknown())
        throw PrecisionExhausted("all known terms cancelled below O(t^" + nagur::to_string(*tail_) + ")");
    if (terms_.empty()) throw InvalidArgument("leading exponent of zero");
    return terms_.front().exponent;
}

HahnSeries HahnSeries::operator-() const {
    HahnSeries s = *this;
    for (auto& t : s.terms_) t.coeff = -t.coeff;
    return s;
}

namespace {

std::optional<Rational> min_tail(const std::optional<Rational>& a, const std::optional<Rational>& b) {
    if (!a) return b;
    if (!b) return a;
    return std::min(*a, *b);
}

// Lower bound on the valuation: the leading exponent, or the tail order when unknown.
Rational valuation_bound(const HahnSeries& s) {
    return s.terms().empty() ? *s.tail() : s.terms().front().exponent;
}

} // namespace

HahnSeries operator+(const HahnSeries& a, const HahnSeries& b) {
    std::vector<HahnTerm> all = a.terms_;
    all.insert(all.end(), b.terms_.begin(), b.terms_.end());
    return HahnSeries::from_terms(std::move(all), min_tail(a.tail_, b.tail_));
}

HahnSeries operator*(const HahnSeries& a, const HahnSeries& b) {
    if (a.is_exact_zero() || b.is_exact_zero()) return {};
    std::optional<Rational> tail;
    if (a.tail_) tail = *a.tail_ + valuation_bound(b);
    if (b.tail_) tail = min_tail(tail, *b.tail_ + valuation_bound(a));
    std::vector<HahnTerm> prod;
    prod.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& x : a.terms_)
        for (const auto& y : b.terms_) prod.push_back({x.coeff * y.coeff, x.exponent + y.exponent});
    return HahnSeries::from_terms(std::move(prod), std::move(tail));
}

HahnSeries HahnSeries::inverse(const Rational& relative_order) const {
    if (is_exact_zero()) throw DivisionByZero("inverse of zero Hahn series");
    const Rational& e = leading_exponent();
    const Rational c = terms_.front().coeff;

    // a = c t^e (1 + u)
    std::vector<HahnTerm> u;
    for (std::size_t i = 1; i < terms_.size(); ++i) u.push_back({terms_[i].coeff / c, terms_[i].exponent - e});
    std::optional<Rational> rel_tail;
    if (tail_) rel_tail = *tail_ - e;

    if (u.empty() && !rel_tail) return monomial(1 / c, -e);

    Rational order = relative_order;
    if (rel_tail) order = std::min(order, *rel_tail);

    // 1/(1+u) = sum_k (-u)^k, truncated at `order`
    std::vector<HahnTerm> neg_u;
    for (const auto& t : u) neg_u.push_back({-t.coeff, t.exponent});
    HahnSeries minus_u = from_terms(neg_u);
    HahnSeries sum = from_terms({{1, 0}}, order);
    HahnSeries power = from_terms({{1, 0}});
    if (!minus_u.terms_.empty()) {
        const Rational delta = minus_u.terms_.front().exponent;
        Integer steps = floor(order / delta) + 1;
        for (Integer k = 1; k <= steps; ++k) {
            power = from_terms((power * minus_u).terms_, order);
            if (power.terms_.empty()) break;
            sum = sum + power;
        }
    }
    std::vector<HahnTerm> shifted;
    for (const auto& t : sum.terms_) shifted.push_back({t.coeff / c, t.exponent - e});
    return from_terms(std::move(shifted), order - e);
}

namespace {

void append_rational_exponent(std::string& out, const Rational& e) {
    out += "t^(" + nagur::to_string(e) + ")";
}

} // namespace

std::string HahnSeries::to_string() const {
    if (is_exact_zero()) return "0";
    std::string out;
    for (const auto& t : terms_) {
        Rational mag = abs(t.coeff);
        if (sgn(t.coeff) < 0) out += '-';
        else if (!out.empty()) out += '+';
        if (sgn(t.exponent) == 0) {
            out += nagur::to_string(mag);
        } else {
            if (mag != 1) out += nagur::to_string(mag) + "*";
            append_rational_exponent(out, t.exponent);
        }
    }
    if (tail_) {
        if (!out.empty()) out += '+';
        out += "O(";
        append_rational_exponent(out, *tail_);
        out += ")";
    }
    return out;
}

namespace {

class SeriesParser {
public:
    explicit SeriesParser(std::string_view s) : s_(s) {}

    HahnSeries parse() {
        if (s_ == "0") return {};
        std::vector<HahnTerm> terms;
        std::optional<Rational> tail;
        bool first = true;
        while (pos_ < s_.size()) {
            bool negative = false;
            if (!first) {
                char c = s_[pos_];
                if (c != '+' && c != '-') fail("expected '+' or '-'");
                negative = c == '-';
                ++pos_;
            } else if (peek() == '-') {
                negative = true;
                ++pos_;
            }
            first = false;
            if (peek() == 'O') {
                if (negative) fail("negative O-term");
                tail = parse_big_o();
                if (pos_ != s_.size()) fail("O-term must be last");
                break;
            }
            HahnTerm t = parse_term();
            if (negative) t.coeff = -t.coeff;
            terms.push_back(std::move(t));
        }
        if (terms.empty() && !tail) fail("empty series");
        for (std::size_t i = 1; i < terms.size(); ++i)
            if (terms[i].exponent <= terms[i - 1].exponent) fail("exponents must be strictly increasing");
        return HahnSeries::from_terms(std::move(terms), std::move(tail));
    }

private:
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

    [[noreturn]] void fail(const std::string& why) const {
        throw ParseError("bad Hahn series '" + std::string(s_) + "': " + why + " at offset " + std::to_string(pos_));
    }

    void expect(std::string_view lit) {
        if (s_.substr(pos_, lit.size()) != lit) fail("expected '" + std::string(lit) + "'");
        pos_ += lit.size();
    }

    Rational parse_unsigned_rational() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/')) ++pos_;
        if (start == pos_) fail("expected a coefficient");
        return parse_rational(s_.substr(start, pos_ - start));
    }

    Rational parse_exponent() {
        expect("t^(");
        std::size_t close = s_.find(')', pos_);
        if (close == std::string_view::npos) fail("unclosed exponent");
        Rational e = parse_rational(s_.substr(pos_, close - pos_));
        pos_ = close + 1;
        return e;
    }

    HahnTerm parse_term() {
        if (peek() == 't') return {1, parse_exponent()};
        Rational c = parse_unsigned_rational();
        if (sgn(c) == 0) fail("zero coefficient");
        if (peek() == '*') {
            ++pos_;
            return {c, parse_exponent()};
        }
        return {c, 0};
    }

    Rational parse_big_o() {
        expect("O(");
        Rational e = parse_exponent();
        expect(")");
        return e;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace

HahnSeries HahnSeries::parse(std::string_view text) {
    return SeriesParser(text).parse();
}

// ---------------------------------------------------------------------------
// Scalar

Scalar Scalar::zero(const FieldDescriptor& f) {
    return f.backend == Backend::PadicRational ? Scalar(Rational(0)) : Scalar(HahnSeries{});
}

Scalar Scalar::from_rational(const Rational& q, const FieldDescriptor& f) {
    return f.backend == Backend::PadicRational ? Scalar(q) : Scalar(HahnSeries::constant(q));
}

Scalar Scalar::parse(std::string_view text, const FieldDescriptor& f) {
    if (f.backend == Backend::PadicRational) return Scalar(parse_rational(text));
    return Scalar(HahnSeries::parse(text));
}

Backend Scalar::backend() const {
    return is_padic() ? Backend::PadicRational : Backend::HahnTruncated;
}

bool Scalar::is_zero() const {
    if (is_padic()) return sgn(rational()) == 0;
    const auto& s = series();
    if (s.is_unknown()) s.leading_exponent();  // throws PrecisionExhausted
    return s.is_exact_zero();
}

std::string Scalar::to_string() const {
    return is_padic() ? nagur::to_string(rational()) : series().to_string();
}

Scalar Scalar::operator-() const {
    return is_padic() ? Scalar(Rational(-rational())) : Scalar(-series());
}

namespace {

void require_same_backend(const Scalar& a, const Scalar& b) {
    if (a.backend() != b.backend()) throw InvalidArgument("scalar arithmetic across backends");
}

} // namespace

Scalar operator+(const Scalar& a, const Scalar& b) {
    require_same_backend(a, b);
    if (a.is_padic()) return Scalar(Rational(a.rational() + b.rational()));
    return Scalar(a.series() + b.series());
}

Scalar operator-(const Scalar& a, const Scalar& b) {
    require_same_backend(a, b);
    if (a.is_padic()) return Scalar(Rational(a.rational() - b.rational()));
    return Scalar(a.series() - b.series());
}

Scalar operator*(const Scalar& a, const Scalar& b) {
    require_same_backend(a, b);
    if (a.is_padic()) return Scalar(Rational(a.rational() * b.rational()));
    return Scalar(a.series() * b.series());
}

long padic_valuation(const Integer& n, Prime p) {
    if (n == 0) throw InvalidArgument("valuation of zero");
    Integer m = abs(n);
    Integer pz(static_cast<unsigned long>(p));
    return static_cast<long>(mpz_remove(m.get_mpz_t(), m.get_mpz_t(), pz.get_mpz_t()));
}

Magnitude abs(const Scalar& a, const FieldDescriptor& f) {
    if (a.backend() != f.backend) throw InvalidArgument("scalar does not belong to field backend " + f.backend_name());
    if (a.is_padic()) {
        const Rational& q = a.rational();
        if (sgn(q) == 0) return Magnitude::zero();
        long v = padic_valuation(q.get_num(), f.prime) - padic_valuation(q.get_den(), f.prime);
        return Magnitude::prime_power(f.prime, Rational(-v));
    }
    const auto& s = a.series();
    if (s.is_exact_zero()) return Magnitude::zero();
    return Magnitude::prime_power(f.prime, -s.leading_exponent());
}

Scalar inverse(const Scalar& a, const FieldDescriptor& f) {
    if (a.is_padic()) {
        if (sgn(a.rational()) == 0) throw DivisionByZero();
        return Scalar(Rational(1 / a.rational()));
    }
    return Scalar(a.series().inverse(f.default_tail_order));
}

Scalar divide(const Scalar& a, const Scalar& b, const FieldDescriptor& f) {
    require_same_backend(a, b);
    if (a.is_padic()) {
        if (sgn(b.rational()) == 0) throw DivisionByZero();
        return Scalar(Rational(a.rational() / b.rational()));
    }
    return a * inverse(b, f);
}

Scalar scalar_with_abs(const Magnitude& m, const FieldDescriptor& f) {
    ValueGroupDescriptor g = f.value_group();
    if (m.is_zero()) return Scalar::zero(f);
    if (!g.contains(m)) throw NotInValueGroup(m, coset_of(m, g));
    Rational e = m.exponent_of(f.prime);
    if (f.backend == Backend::PadicRational) {
        Integer pk;
        Integer ek = abs(e.get_num());
        mpz_ui_pow_ui(pk.get_mpz_t(), f.prime, ek.get_ui());
        // |p^j| = p^-j
        return Scalar(sgn(e) > 0 ? Rational(1, pk) : Rational(pk));
    }
    return Scalar(HahnSeries::monomial(1, -e));
}

Scalar scalar_with_abs_in(const Magnitude& lo, const Magnitude& hi, const FieldDescriptor& f) {
    auto m = search_in_interval(Magnitude::one(), lo, true, hi, false, f.value_group());
    if (!m)
        throw EmptyIntersection("value group of " + f.backend_name() + " misses (" + lo.to_string() + ", " +
                                hi.to_string() + "]");
    return scalar_with_abs(*m, f);
}

} // namespace nagur
