#include "nagur/magnitude.hpp"

#include "nagur/error.hpp"

#include <mpfr.h>

#include <cmath>
#include <limits>
#include <vector>

namespace nagur {

namespace {

constexpr unsigned kTrialLimit = 1u << 14;
constexpr mpfr_prec_t kStartPrecision = 64;
constexpr mpfr_prec_t kMaxPrecision = mpfr_prec_t(1) << 22;

Prime to_prime(const Integer& p) {
    if (!p.fits_ulong_p()) throw InvalidArgument("prime factor " + p.get_str() + " exceeds 64 bits");
    return static_cast<Prime>(p.get_ui());
}

Integer pollard_brent(const Integer& n) {
    if (mpz_even_p(n.get_mpz_t())) return 2;
    for (unsigned long c = 1;; ++c) {
        Integer y = 2, x, ys, g = 1, q = 1;
        auto f = [&](const Integer& v) {
            Integer r = v * v + c;
            mpz_mod(r.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t());
            return r;
        };
        unsigned long r = 1;
        const unsigned long m = 128;
        do {
            x = y;
            for (unsigned long i = 0; i < r; ++i) y = f(y);
            unsigned long k = 0;
            do {
                ys = y;
                for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    Integer diff = abs(x - y);
                    q = (q * diff) % n;
                }
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                Integer diff = abs(x - ys);
                mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void factor_into(Integer n, std::map<Prime, Integer>& out) {
    for (unsigned long d = 2; d < kTrialLimit && n > 1; d += (d == 2 ? 1 : 2)) {
        if (Integer(d) * d > n) break;
        while (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
            n /= d;
            out[d] += 1;
        }
    }
    if (n == 1) return;
    std::vector<Integer> stack{n};
    while (!stack.empty()) {
        Integer m = stack.back();
        stack.pop_back();
        if (m == 1) continue;
        if (is_prime(m)) {
            out[to_prime(m)] += 1;
            continue;
        }
        Integer d = pollard_brent(m);
        stack.push_back(d);
        stack.push_back(m / d);
    }
}

// Sign of sum e_i ln p_i by interval arithmetic at the given precision.
// Returns 0 when the interval still straddles zero.
int interval_sign(const Magnitude::FactorMap& f, mpfr_prec_t prec) {
    mpfr_t lnlo, lnhi, tlo, thi, slo, shi;
    mpfr_inits2(prec, lnlo, lnhi, tlo, thi, slo, shi, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_zero(slo, 1);
    mpfr_set_zero(shi, 1);
    for (const auto& [p, e] : f) {
        mpfr_set_ui(lnlo, p, MPFR_RNDD);
        mpfr_log(lnlo, lnlo, MPFR_RNDD);
        mpfr_set_ui(lnhi, p, MPFR_RNDU);
        mpfr_log(lnhi, lnhi, MPFR_RNDU);
        if (sgn(e) > 0) {
            mpfr_mul_z(tlo, lnlo, e.get_num_mpz_t(), MPFR_RNDD);
            mpfr_mul_z(thi, lnhi, e.get_num_mpz_t(), MPFR_RNDU);
        } else {
            mpfr_mul_z(tlo, lnhi, e.get_num_mpz_t(), MPFR_RNDD);
            mpfr_mul_z(thi, lnlo, e.get_num_mpz_t(), MPFR_RNDU);
        }
        mpfr_div_z(tlo, tlo, e.get_den_mpz_t(), MPFR_RNDD);
        mpfr_div_z(thi, thi, e.get_den_mpz_t(), MPFR_RNDU);
        mpfr_add(slo, slo, tlo, MPFR_RNDD);
        mpfr_add(shi, shi, thi, MPFR_RNDU);
    }
    int s = 0;
    if (mpfr_sgn(slo) > 0) s = 1;
    else if (mpfr_sgn(shi) < 0) s = -1;
    mpfr_clears(lnlo, lnhi, tlo, thi, slo, shi, static_cast<mpfr_ptr>(nullptr));
    return s;
}

// Double-precision filter with a conservative error bound; 0 means undecided.
int quick_sign(const Magnitude::FactorMap& f) {
    double sum = 0, scale = 0;
    for (const auto& [p, e] : f) {
        double term = e.get_d() * std::log(static_cast<double>(p));
        sum += term;
        scale += std::fabs(term);
    }
    if (!std::isfinite(sum) || !std::isfinite(scale)) return 0;
    double bound = 1e-12 * scale + 1e-300;
    if (sum > bound) return 1;
    if (sum < -bound) return -1;
    return 0;
}

// Sign of log of the nonzero magnitude with factor map f, f nonempty.
int log_sign(const Magnitude::FactorMap& f) {
    bool any_pos = false, any_neg = false;
    for (const auto& [p, e] : f) (sgn(e) > 0 ? any_pos : any_neg) = true;
    if (!any_neg) return 1;
    if (!any_pos) return -1;
    if (int s = quick_sign(f)) return s;
    for (mpfr_prec_t prec = kStartPrecision; prec <= kMaxPrecision; prec *= 2)
        if (int s = interval_sign(f, prec)) return s;
    throw Error("magnitude comparison did not resolve within precision cap");
}

} // namespace

bool is_prime(const Integer& n) {
    if (n < 2) return false;
    return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0;
}

Magnitude Magnitude::zero() {
    Magnitude m;
    m.zero_ = true;
    return m;
}

Magnitude Magnitude::from_rational(const Rational& q) {
    if (sgn(q) < 0) throw InvalidArgument("magnitude of a negative rational");
    if (sgn(q) == 0) return zero();
    std::map<Prime, Integer> num, den;
    factor_into(q.get_num(), num);
    factor_into(q.get_den(), den);
    Magnitude m;
    for (auto& [p, k] : num) m.factors_[p] += Rational(k);
    for (auto& [p, k] : den) m.factors_[p] -= Rational(k);
    return m;
}

Magnitude Magnitude::prime_power(Prime p, const Rational& exponent) {
    if (!is_prime(Integer(static_cast<unsigned long>(p)))) throw InvalidArgument("not a prime: " + std::to_string(p));
    Magnitude m;
    Rational e = exponent;
    e.canonicalize();
    if (sgn(e) != 0) m.factors_.emplace(p, e);
    return m;
}

Magnitude Magnitude::from_factors(FactorMap factors) {
    Magnitude m;
    for (auto& [p, e] : factors) {
        if (!is_prime(Integer(static_cast<unsigned long>(p)))) throw InvalidArgument("not a prime: " + std::to_string(p));
        Rational c = e;
        c.canonicalize();
        if (sgn(c) != 0) m.factors_.emplace(p, c);
    }
    return m;
}

Rational Magnitude::exponent_of(Prime p) const {
    auto it = factors_.find(p);
    return it == factors_.end() ? Rational(0) : it->second;
}

std::optional<Rational> Magnitude::to_rational() const {
    if (zero_) return Rational(0);
    Rational r(1);
    for (const auto& [p, e] : factors_) {
        if (e.get_den() != 1) return std::nullopt;
        Integer pk;
        Integer ee = abs(e.get_num());
        if (!ee.fits_ulong_p()) return std::nullopt;
        mpz_ui_pow_ui(pk.get_mpz_t(), p, ee.get_ui());
        if (sgn(e) > 0) r *= pk;
        else r /= pk;
    }
    r.canonicalize();
    return r;
}

double Magnitude::log_estimate() const {
    if (zero_) return -std::numeric_limits<double>::infinity();
    double s = 0;
    for (const auto& [p, e] : factors_) s += e.get_d() * std::log(static_cast<double>(p));
    return s;
}

double Magnitude::to_double() const {
    return zero_ ? 0.0 : std::exp(log_estimate());
}

std::string Magnitude::to_string() const {
    if (zero_) return "0";
    if (factors_.empty()) return "1";
    std::string out;
    for (const auto& [p, e] : factors_) {
        if (!out.empty()) out += '*';
        out += std::to_string(p) + '^' + nagur::to_string(e);
    }
    return out;
}

Magnitude Magnitude::parse(std::string_view text) {
    if (text == "0") return zero();
    if (text == "1") return one();
    if (text.empty()) throw ParseError("empty magnitude");
    if (text.find('^') == std::string_view::npos) {
        Rational q = parse_rational(text);
        if (sgn(q) <= 0) throw ParseError("magnitude literal must be positive: '" + std::string(text) + "'");
        return from_rational(q);
    }
    Magnitude m;
    Prime last = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('*', pos);
        std::string_view term = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        std::size_t caret = term.find('^');
        if (caret == std::string_view::npos || caret == 0)
            throw ParseError("bad magnitude term '" + std::string(term) + "'");
        std::string_view base = term.substr(0, caret);
        for (char c : base)
            if (c < '0' || c > '9') throw ParseError("bad prime '" + std::string(base) + "'");
        Integer pz(std::string(base), 10);
        if (!is_prime(pz)) throw ParseError("not a prime: " + std::string(base));
        Prime p = to_prime(pz);
        if (p <= last) throw ParseError("primes must be strictly ascending in '" + std::string(text) + "'");
        last = p;
        Rational e = parse_rational(term.substr(caret + 1));
        if (sgn(e) == 0) throw ParseError("zero exponent in '" + std::string(text) + "'");
        m.factors_.emplace(p, e);
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    return m;
}

std::strong_ordering compare(const Magnitude& a, const Magnitude& b) {
    if (a.is_zero() || b.is_zero()) {
        if (a.is_zero() && b.is_zero()) return std::strong_ordering::equal;
        return a.is_zero() ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (a == b) return std::strong_ordering::equal;
    Magnitude q = a / b;
    return log_sign(q.factors()) > 0 ? std::strong_ordering::greater : std::strong_ordering::less;
}

std::strong_ordering operator<=>(const Magnitude& a, const Magnitude& b) {
    return compare(a, b);
}

Magnitude operator*(const Magnitude& a, const Magnitude& b) {
    if (a.is_zero() || b.is_zero()) return Magnitude::zero();
    Magnitude::FactorMap f = a.factors();
    for (const auto& [p, e] : b.factors()) {
        auto [it, inserted] = f.emplace(p, e);
        if (!inserted) {
            it->second += e;
            if (sgn(it->second) == 0) f.erase(it);
        }
    }
    Magnitude m;
    m.factors_ = std::move(f);
    return m;
}

Magnitude operator/(const Magnitude& a, const Magnitude& b) {
    if (b.is_zero()) throw DivisionByZero("magnitude division by zero");
    return a * pow(b, -1);
}

Magnitude pow(const Magnitude& a, const Rational& e) {
    if (a.is_zero()) {
        if (sgn(e) <= 0) throw DivisionByZero("zero magnitude to a nonpositive power");
        return a;
    }
    Magnitude m;
    if (sgn(e) != 0)
        for (const auto& [p, x] : a.factors()) m.factors_.emplace(p, x * e);
    return m;
}

Magnitude root(const Magnitude& a, unsigned k) {
    if (k == 0) throw InvalidArgument("zeroth root");
    if (a.is_zero()) throw InvalidArgument("root of zero magnitude");
    return pow(a, Rational(1, k));
}

const Magnitude& max(const Magnitude& a, const Magnitude& b) {
    return compare(a, b) < 0 ? b : a;
}

const Magnitude& min(const Magnitude& a, const Magnitude& b) {
    return compare(b, a) < 0 ? b : a;
}

Integer floor_log(const Magnitude& m, Prime p) {
    if (m.is_zero()) throw InvalidArgument("floor_log of zero");
    // Exact fast path: a pure power of p.
    if (m.factors().size() <= 1 && (m.factors().empty() || m.factors().begin()->first == p))
        return floor(m.exponent_of(p));
    double est = m.log_estimate() / std::log(static_cast<double>(p));
    Integer k = std::isfinite(est) ? Integer(std::floor(est)) : Integer(0);
    auto pk = [p](const Integer& e) { return Magnitude::prime_power(p, Rational(e)); };
    while (compare(pk(k), m) > 0) --k;
    while (compare(pk(k + 1), m) <= 0) ++k;
    return k;
}

bool StructuralLess::operator()(const Magnitude& a, const Magnitude& b) const {
    if (a.is_zero() != b.is_zero()) return a.is_zero();
    const auto& fa = a.factors();
    const auto& fb = b.factors();
    auto ia = fa.begin(), ib = fb.begin();
    for (; ia != fa.end() && ib != fb.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return ia->first < ib->first;
        if (ia->second != ib->second) return ia->second < ib->second;
    }
    return ia == fa.end() && ib != fb.end();
}

// ---------------------------------------------------------------------------

bool ValueGroupDescriptor::contains(const Magnitude& m) const {
    if (m.is_zero()) return false;
    const auto& f = m.factors();
    if (f.empty()) return true;
    if (f.size() > 1 || f.begin()->first != prime) return false;
    return kind == ValueGroupKind::Dense || f.begin()->second.get_den() == 1;
}

Coset coset_of(const Magnitude& m, const ValueGroupDescriptor& g) {
    if (m.is_zero()) throw InvalidArgument("coset of zero magnitude");
    Magnitude::FactorMap f = m.factors();
    auto it = f.find(g.prime);
    if (it != f.end()) {
        if (g.kind == ValueGroupKind::Dense) {
            f.erase(it);
        } else {
            it->second -= Rational(floor(it->second));
            if (sgn(it->second) == 0) f.erase(it);
        }
    }
    Magnitude rep;
    rep.factors_ = std::move(f);
    return Coset{rep};
}

namespace {

// Integer range [nmin, nmax] of n with  base * p^(n/d)  inside the interval.
// nmin is absent when the interval has no lower bound.
struct ShiftRange {
    std::optional<Integer> nmin;
    Integer nmax;
};

ShiftRange shift_range(const Magnitude& base, const Magnitude& lo, bool lo_open, const Magnitude& hi,
                       bool hi_open, Prime p, unsigned long d) {
    const Rational dd(d);
    ShiftRange r;
    Magnitude H = pow(hi / base, dd);
    Integer fh = floor_log(H, p);
    r.nmax = fh;
    if (hi_open && Magnitude::prime_power(p, Rational(fh)) == H) r.nmax = fh - 1;
    if (!lo.is_zero()) {
        Magnitude L = pow(lo / base, dd);
        Integer fl = floor_log(L, p);
        bool exact = Magnitude::prime_power(p, Rational(fl)) == L;
        r.nmin = (lo_open || !exact) ? fl + 1 : fl;
    }
    return r;
}

std::optional<Integer> pick_closest_to_zero(const ShiftRange& r) {
    if (r.nmin && *r.nmin > r.nmax) return std::nullopt;
    if (r.nmax < 0) return r.nmax;
    if (r.nmin && *r.nmin > 0) return *r.nmin;
    return Integer(0);
}

} // namespace

std::optional<Magnitude> search_in_interval(const Magnitude& base, const Magnitude& lo, bool lo_open,
                                            const Magnitude& hi, bool hi_open, const ValueGroupDescriptor& g) {
    if (base.is_zero() || hi.is_zero()) return std::nullopt;
    auto c = compare(lo, hi);
    if (c > 0 || (c == 0 && (lo_open || hi_open))) return std::nullopt;
    const unsigned max_level = g.is_dense() ? 62 : 0;
    for (unsigned level = 0; level <= max_level; ++level) {
        unsigned long d = 1ul << level;
        ShiftRange r = shift_range(base, lo, lo_open, hi, hi_open, g.prime, d);
        if (auto n = pick_closest_to_zero(r)) return base * Magnitude::prime_power(g.prime, Rational(*n, Integer(d)));
    }
    return std::nullopt;
}

Magnitude representative_in(const Coset& c, const Magnitude& lo, const Magnitude& hi, const ValueGroupDescriptor& g) {
    if (compare(lo, hi) >= 0) throw InvalidArgument("empty interval (" + lo.to_string() + ", " + hi.to_string() + "]");
    if (!g.is_dense() && !lo.is_zero() &&
        compare(hi / lo, Magnitude::prime_power(g.prime, 1)) < 0)
        throw InvalidArgument("interval (" + lo.to_string() + ", " + hi.to_string() +
                              "] is shorter than one period of the value group");
    auto m = search_in_interval(c.representative, lo, true, hi, false, g);
    if (!m) throw InvalidArgument("no representative of coset " + c.to_string() + " in interval");
    return *m;
}

} // namespace nagur
