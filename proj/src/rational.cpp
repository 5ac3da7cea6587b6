#include "nagur/rational.hpp"

#include "nagur/error.hpp"

#include <cctype>

namespace nagur {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace

Rational parse_rational(std::string_view text) {
    std::string_view num = text;
    std::string_view den;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        num = text.substr(0, slash);
        den = text.substr(slash + 1);
        if (!all_digits(den)) throw ParseError("bad rational denominator in '" + std::string(text) + "'");
    }
    std::string_view digits = num;
    if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
    if (!all_digits(digits)) throw ParseError("bad rational '" + std::string(text) + "'");

    Rational q;
    q.get_num() = Integer(std::string(num), 10);
    q.get_den() = den.empty() ? Integer(1) : Integer(std::string(den), 10);
    if (q.get_den() == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) {
    return q.get_str(10);
}

Integer floor(const Rational& q) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

} // namespace nagur
