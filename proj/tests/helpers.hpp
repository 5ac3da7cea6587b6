#pragma once

#include "nagur/magnitude.hpp"
#include "nagur/scalar.hpp"

#include <ostream>

namespace testing_helpers {

inline nagur::Magnitude M(const char* s) { return nagur::Magnitude::parse(s); }

/// compare() as -1 / 0 / 1, for gtest's relational assertions.
inline int cmp3(const nagur::Magnitude& a, const nagur::Magnitude& b) {
    auto c = nagur::compare(a, b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

} // namespace testing_helpers

namespace nagur {

inline void PrintTo(const Magnitude& m, std::ostream* os) { *os << m.to_string(); }
inline void PrintTo(const Scalar& s, std::ostream* os) { *os << s.to_string(); }

} // namespace nagur
