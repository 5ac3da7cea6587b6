#include "nagur/scalar.hpp"

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nagur;
using namespace testing_helpers;

namespace {

const FieldDescriptor Q2 = FieldDescriptor::padic(2);
const FieldDescriptor H2 = FieldDescriptor::hahn(2);

Scalar P(const char* s) { return Scalar::parse(s, Q2); }
Scalar H(const char* s) { return Scalar::parse(s, H2); }

} // namespace

TEST(ScalarTest, ArithmeticExamples) {
    Scalar one = P("1/2") + P("1/2");
    EXPECT_EQ(one, P("1"));
    EXPECT_EQ(abs(one, Q2), Magnitude::one());

    Scalar prod = H("t^(1/2)") * H("t^(1/3)");
    EXPECT_EQ(prod.to_string(), "t^(5/6)");
    EXPECT_EQ(abs(prod, H2), M("2^-5/6"));
}

TEST(ScalarTest, GeometricInverse) {
    FieldDescriptor h5 = FieldDescriptor::hahn(2, 5);
    Scalar a = Scalar::parse("1-t^(1)", h5);
    Scalar inv = inverse(a, h5);
    EXPECT_EQ(inv.to_string(), "1+t^(1)+t^(2)+t^(3)+t^(4)+O(t^(5))");
    // Multiplying back leaves 1 up to the truncation order.
    Scalar back = a * inv;
    EXPECT_EQ(back.series().terms().size(), 1u);
    EXPECT_EQ(back.series().terms()[0], (HahnTerm{1, 0}));
    EXPECT_EQ(*back.series().tail(), 5);
}

TEST(ScalarTest, AbsExamples) {
    EXPECT_EQ(abs(P("12"), Q2), M("2^-2"));
    EXPECT_EQ(abs(P("0"), Q2), Magnitude::zero());
    EXPECT_EQ(abs(H("3/4*t^(-1/2)+t^(1)"), H2), M("2^1/2"));
    EXPECT_EQ(abs(P("5/24"), Q2), M("2^3"));
    EXPECT_EQ(abs(Scalar::parse("5/24", FieldDescriptor::padic(3)), FieldDescriptor::padic(3)), M("3^1"));
}

TEST(ScalarTest, PrecisionExhausted) {
    Scalar a = H("1+O(t^(2))"), b = H("1");
    Scalar d = a - b;
    EXPECT_TRUE(d.series().is_unknown());
    EXPECT_THROW(abs(d, H2), PrecisionExhausted);
    EXPECT_THROW(d.is_zero(), PrecisionExhausted);
    EXPECT_THROW(inverse(H("0"), H2), DivisionByZero);
    EXPECT_THROW(inverse(P("0"), Q2), DivisionByZero);
}

TEST(ScalarTest, ScalarWithAbs) {
    EXPECT_EQ(scalar_with_abs(M("2^3"), Q2), P("1/8"));
    EXPECT_EQ(scalar_with_abs(M("2^-1/3"), H2), H("t^(1/3)"));
    EXPECT_THROW(scalar_with_abs(M("3^1"), Q2), NotInValueGroup);
    try {
        scalar_with_abs(M("3^1"), Q2);
    } catch (const NotInValueGroup& e) {
        EXPECT_EQ(e.coset.representative, M("3^1"));
    }
}

TEST(ScalarTest, ScalarWithAbsIn) {
    // q = 0 is searched first and 1 lies in the half-open interval.
    EXPECT_EQ(scalar_with_abs_in(M("9/10"), Magnitude::one(), H2), H("1"));
    // Excluding 1, the first dyadic hit is t^(1/8).
    EXPECT_EQ(scalar_with_abs_in(M("9/10"), M("2^-1/16"), H2), H("t^(1/8)"));
    EXPECT_EQ(scalar_with_abs_in(M("2^-1"), Magnitude::one(), Q2), P("1"));
    EXPECT_THROW(scalar_with_abs_in(M("3/5"), M("9/10"), Q2), EmptyIntersection);
}

TEST(ScalarTest, SeriesGrammarRoundTrip) {
    for (const char* s : {"0", "1", "-1", "3/4*t^(1/2)+t^(2)+O(t^(5))", "O(t^(3))", "-t^(-1)+2", "t^(1/3)"}) {
        HahnSeries x = HahnSeries::parse(s);
        EXPECT_EQ(HahnSeries::parse(x.to_string()), x) << s;
    }
    for (const char* bad : {"", "t^(1)+t^(0)", "t^1", "O(t^(1))+1", "1+", "0*t^(1)", "1 + t^(1)"})
        EXPECT_THROW(HahnSeries::parse(bad), ParseError) << bad;
    EXPECT_THROW(P("1/0"), ParseError);
    EXPECT_THROW(P("0.5"), ParseError);
}

TEST(ScalarTest, MixedBackendsRejected) {
    EXPECT_THROW(P("1") + H("1"), InvalidArgument);
    EXPECT_THROW(abs(P("1"), H2), InvalidArgument);
}

class ScalarPropertyTest : public ::testing::Test {
protected:
    std::mt19937_64 rng{77};

    Rational rnd_rational(long range, bool nonzero = false) {
        std::uniform_int_distribution<long> num(-range, range), den(1, range);
        for (;;) {
            Rational q(num(rng), den(rng));
            q.canonicalize();
            if (!nonzero || sgn(q) != 0) return q;
        }
    }
    Scalar rnd_padic(const FieldDescriptor& f) { return Scalar::from_rational(rnd_rational(200), f); }
    Scalar rnd_hahn() {
        std::vector<HahnTerm> terms;
        int n = static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) terms.push_back({rnd_rational(5, true), rnd_rational(6)});
        return Scalar(HahnSeries::from_terms(std::move(terms)));
    }
};

TEST_F(ScalarPropertyTest, UltrametricAndMultiplicative) {
    for (const FieldDescriptor& f : {FieldDescriptor::padic(2), FieldDescriptor::padic(3), H2}) {
        for (int i = 0; i < 300; ++i) {
            Scalar a = f.is_dense() ? rnd_hahn() : rnd_padic(f);
            Scalar b = f.is_dense() ? rnd_hahn() : rnd_padic(f);
            Magnitude na = abs(a, f), nb = abs(b, f), ns = abs(a + b, f);
            EXPECT_LE(cmp3(ns, max(na, nb)), 0);
            if (na != nb) EXPECT_EQ(ns, max(na, nb));
            EXPECT_EQ(abs(a * b, f), na * nb);
            if (!na.is_zero()) {
                if (f.is_dense()) {
                    EXPECT_TRUE(na.factors().size() == 1 || na.is_one());
                } else {
                    EXPECT_EQ(na.exponent_of(f.prime).get_den(), 1);
                    EXPECT_LE(na.factors().size(), 1u);
                }
            }
        }
    }
}

TEST_F(ScalarPropertyTest, ScalarWithAbsRoundTrip) {
    for (int i = 0; i < 200; ++i) {
        Magnitude md = Magnitude::prime_power(2, Rational(static_cast<long>(rng() % 21) - 10));
        EXPECT_EQ(abs(scalar_with_abs(md, Q2), Q2), md);
        Magnitude mq = Magnitude::prime_power(2, rnd_rational(12));
        EXPECT_EQ(abs(scalar_with_abs(mq, H2), H2), mq);
    }
}

TEST_F(ScalarPropertyTest, DivisionInvertsMultiplication) {
    for (int i = 0; i < 200; ++i) {
        Scalar a = rnd_padic(Q2), b = rnd_padic(Q2);
        if (b.is_zero()) continue;
        EXPECT_EQ(divide(a * b, b, Q2), a);
    }
}
