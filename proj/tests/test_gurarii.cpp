#include "nagur/gurarii.hpp"

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nagur;
using namespace testing_helpers;

namespace {

const FieldDescriptor Q2 = FieldDescriptor::padic(2);
const FieldDescriptor H2 = FieldDescriptor::hahn(2);

Vector V(std::initializer_list<const char*> xs, const FieldDescriptor& f = Q2) {
    Vector v;
    for (const char* x : xs) v.push_back(Scalar::parse(x, f));
    return v;
}

WeightedSpace W(std::initializer_list<const char*> ws, const FieldDescriptor& f = Q2) {
    std::vector<Magnitude> w;
    for (const char* s : ws) w.push_back(M(s));
    return WeightedSpace(f, w);
}

} // namespace

TEST(ValueSetTest, Examples) {
    auto r = value_set_dense(WeightedSpace::standard(Q2, 3));
    EXPECT_FALSE(r.dense);
    ASSERT_TRUE(r.gap);
    EXPECT_EQ(r.gap->lo, M("2^-1"));
    EXPECT_EQ(r.gap->hi, Magnitude::one());

    EXPECT_TRUE(value_set_dense(WeightedSpace::standard(H2, 2)).dense);

    auto r2 = value_set_dense(W({"1", "2^-1/2"}));
    EXPECT_FALSE(r2.dense);
    EXPECT_EQ(r2.gap->lo, M("2^-1/2"));
    EXPECT_EQ(r2.gap->hi, Magnitude::one());

    EXPECT_TRUE(value_set_dense(Ambient::universal(Q2)).dense);
}

TEST(ValueSetTest, LadderPoints) {
    auto E = W({"3^1", "2^1/3"});
    // norm values: 3*2^k and 2^(1/3+k)
    EXPECT_EQ(value_point_above(E, Magnitude::one(), false), M("2^1/3"));
    EXPECT_EQ(value_point_below(E, Magnitude::one(), false), M("2^-2*3^1"));
    EXPECT_EQ(value_point_above(E, M("2^1/3"), false), M("2^1/3"));
    EXPECT_EQ(value_point_above(E, M("2^1/3"), true), M("2^-1*3^1"));
    EXPECT_TRUE(in_value_set(E, M("2^-5/3")));
    EXPECT_FALSE(in_value_set(E, M("5^1")));
}

TEST(EpsilonIsometryTest, ChooseT) {
    EXPECT_EQ(choose_t(Rational(1, 2), 2), M("2^-1/8"));
    for (Rational eps : {Rational(1, 4), Rational(1, 10)}) {
        Magnitude t = choose_t(eps, 2);
        EXPECT_GT(cmp3(t * t * t * Magnitude::from_rational(1 + eps), Magnitude::one()), 0);
        EXPECT_LT(cmp3(t, Magnitude::one()), 0);
    }
}

TEST(EpsilonIsometryTest, IdentityGivesInclusion) {
    Ambient A(WeightedSpace::standard(H2, 2));
    auto i = LinearMap::identity(Subspace::whole(A.stage()));
    auto r = epsilon_isometry(A, i, Rational(1, 2));
    EXPECT_EQ(r.min_ratio, Magnitude::one());
    EXPECT_EQ(r.max_ratio, Magnitude::one());
    EXPECT_TRUE(r.bounds_hold);
    EXPECT_TRUE(r.retraction_exact);
    EXPECT_EQ(A.dim(), 2u);
    EXPECT_EQ(r.f.apply(V({"1", "t^(1)"}, H2)), V({"1", "t^(1)"}, H2));
}

TEST(EpsilonIsometryTest, HahnWorkedExample) {
    Ambient A(WeightedSpace::standard(H2, 2));
    Subspace X(A.stage(), {A.stage().unit(0)});
    WeightedSpace Y = W({"1", "2^-1/3"}, H2);
    auto i = LinearMap::on_base(X, Y, {V({"1", "0"}, H2)});
    auto r = epsilon_isometry(A, i, Rational(1, 2));
    EXPECT_EQ(r.t, M("2^-1/8"));
    EXPECT_EQ(r.f.apply(V({"0", "1"}, H2)), V({"0", "t^(1/3)"}, H2));
    EXPECT_TRUE(r.bounds_hold);
    EXPECT_TRUE(r.t_chain_holds);
    EXPECT_TRUE(r.strict_predicate);
    EXPECT_TRUE(r.retraction_exact);
    EXPECT_EQ(A.dim(), 2u);
    // ratio bounds are exact: here f is an isometry
    EXPECT_EQ(r.lower, Magnitude::one());
    EXPECT_EQ(r.upper, Magnitude::one());
}

TEST(EpsilonIsometryTest, DiscreteAmbientRejected) {
    Ambient A(WeightedSpace::standard(Q2, 2));
    Subspace X(A.stage(), {A.stage().unit(0)});
    auto i = LinearMap::on_base(X, W({"1", "2^-1/3"}), {V({"1", "0"})});
    try {
        epsilon_isometry(A, i, Rational(1, 2));
        FAIL() << "expected NotDenselyValued";
    } catch (const NotDenselyValued& e) {
        ASSERT_TRUE(e.gap);
        EXPECT_EQ(e.gap->lo, M("2^-1"));
    }
}

TEST(EpsilonIsometryTest, DiscreteUniversalAmbientAllocates) {
    Ambient A = Ambient::universal(Q2, std::nullopt, 1);
    Subspace X(A.stage(), {A.stage().unit(0)});
    auto i = LinearMap::on_base(X, W({"1", "2^-1/3"}), {V({"1", "0"})});
    auto r = epsilon_isometry(A, i, Rational(1, 4));
    EXPECT_EQ(A.dim(), 2u);
    EXPECT_EQ(A.stage().weight(1), M("2^-1/3"));
    EXPECT_TRUE(r.bounds_hold);
    EXPECT_TRUE(r.retraction_exact);
}

TEST(GapCertificateTest, Examples) {
    auto E = WeightedSpace::standard(Q2, 1);
    auto c = nonexistence_certificate(E, M("3/4"), Rational(1, 4));
    EXPECT_EQ(c.gap.lo, M("2^-1"));
    EXPECT_EQ(c.gap.hi, Magnitude::one());
    EXPECT_EQ(c.lower, M("9/16"));
    EXPECT_EQ(c.upper, M("15/16"));
    EXPECT_TRUE(c.refutes_constructive);
    EXPECT_TRUE(c.refutes_definitional);
    ASSERT_EQ(c.ladders.size(), 1u);
    EXPECT_EQ(c.ladders[0].below, -1);
    EXPECT_EQ(c.test_space.weight(1), M("3/4"));

    try {
        nonexistence_certificate(E, M("1/2"), Rational(1, 4));
        FAIL();
    } catch (const NoGap& e) {
        EXPECT_EQ(e.blocking, M("2^-1"));
    }
    try {
        nonexistence_certificate(E, M("3/4"), Rational(2, 5));
        FAIL();
    } catch (const NoGap& e) {
        EXPECT_EQ(e.blocking, M("2^-1"));
    }
    EXPECT_THROW(nonexistence_certificate(WeightedSpace::standard(H2, 1), M("3/4"), Rational(1, 4)), NoGap);
}

TEST(PatchTest, WorkedExample) {
    auto G = WeightedSpace::standard(Q2, 3);
    auto Yspace = WeightedSpace::standard(Q2, 2);
    Subspace Y = Subspace::whole(Yspace);
    Subspace X(Yspace, {Yspace.unit(0)});
    auto j = LinearMap::on_base(X, G, {V({"1", "0", "0"})});
    auto f = LinearMap::from_images(Yspace, {Yspace.unit(0), Yspace.unit(1)}, G, {V({"1", "2", "0"}), V({"0", "0", "1"})});
    auto r = patch_isometry(j, f);
    EXPECT_EQ(r.t, M("2^-1"));
    EXPECT_TRUE(r.certificate.isometric);
    EXPECT_TRUE(r.agrees_on_x);
    EXPECT_EQ(r.T.apply(V({"1", "0"})), V({"1", "0", "0"}));
    EXPECT_EQ(r.T.apply(V({"0", "1"})), V({"0", "0", "1"}));
    EXPECT_EQ(r.T.apply(V({"3", "5"})), V({"3", "0", "5"}));
}

TEST(PatchTest, DegenerateAndViolation) {
    auto G = WeightedSpace::standard(Q2, 3);
    auto Ys = WeightedSpace::standard(Q2, 2);
    Subspace X(Ys, {Ys.unit(0)});
    auto f = LinearMap::from_images(Ys, {Ys.unit(0), Ys.unit(1)}, G, {V({"1", "2", "0"}), V({"0", "0", "1"})});
    auto same = patch_isometry(f.restricted_to(X), f);
    EXPECT_TRUE(same.t.is_zero());
    EXPECT_EQ(same.T.images(), f.images());

    auto j = LinearMap::on_base(X, G, {V({"0", "1", "0"})});
    try {
        patch_isometry(j, f);
        FAIL();
    } catch (const OperatorNormNotBelowOne& e) {
        EXPECT_EQ(e.norm, Magnitude::one());
        EXPECT_EQ(e.witness, Ys.unit(0));
    }
}

TEST(SplitTest, Examples) {
    auto E2 = WeightedSpace::standard(Q2, 2);
    auto same = maximal_orthogonal_split(Subspace::whole(E2), Subspace::whole(E2));
    EXPECT_EQ(same.f_y.dim(), 0u);

    auto r = maximal_orthogonal_split(Subspace::whole(E2), Subspace(E2, {V({"1", "1"})}));
    EXPECT_EQ(r.u, (std::vector<Vector>{V({"1", "1"}), V({"0", "1"})}));
    EXPECT_EQ(r.m_x, 1u);
    EXPECT_TRUE(r.certificate.orthogonal);

    auto E3 = WeightedSpace::standard(Q2, 3);
    auto r3 = maximal_orthogonal_split(Subspace::whole(E3), Subspace(E3, {E3.unit(0), E3.unit(1)}));
    EXPECT_EQ(r3.f_y.base(), std::vector<Vector>{E3.unit(2)});
}

TEST(PerturbationTest, Examples) {
    auto E = WeightedSpace::standard(Q2, 2);
    std::vector<Vector> xs{E.unit(0), E.unit(1)};
    auto same = check_perturbation(E, xs, xs, Magnitude::one());
    EXPECT_TRUE(same.certified);

    auto r = check_perturbation(E, xs, {V({"1", "2"}), E.unit(1)}, Magnitude::one());
    EXPECT_TRUE(r.hypotheses_hold);
    EXPECT_TRUE(r.norms_preserved);
    EXPECT_EQ(r.zs_certificate->level, Magnitude::one());
    EXPECT_TRUE(r.certified);

    auto bad = check_perturbation(E, xs, {V({"1", "1"}), E.unit(1)}, Magnitude::one());
    EXPECT_FALSE(bad.hypotheses_hold);
    EXPECT_EQ(bad.failed_index, 1u);
}

TEST(ImmediateExtensionTest, Examples) {
    auto E = WeightedSpace::standard(Q2, 2);
    auto T = LinearMap::identity(Subspace::whole(E));
    EXPECT_EQ(extend_isometry_immediate(Subspace::whole(E), T).images(), T.images());
    try {
        extend_isometry_immediate(Subspace::whole(E), LinearMap::identity(Subspace(E, {E.unit(0)})));
        FAIL();
    } catch (const NotImmediate& e) {
        EXPECT_EQ(e.witness, E.unit(1));
    }
    try {
        extend_isometry_immediate(Subspace::whole(E), LinearMap::identity(Subspace(E, {V({"1", "1"})})));
        FAIL();
    } catch (const NotImmediate& e) {
        EXPECT_EQ(e.witness, V({"0", "1"}));
    }
}

TEST(EmbedTest, Examples) {
    Ambient A = Ambient::universal(Q2);
    auto one = embed_into_Eu(Subspace::whole(WeightedSpace::standard(Q2, 1)), A);
    EXPECT_EQ(one.scales[0], Scalar(Rational(1)));
    EXPECT_EQ(A.stage().weight(0), Magnitude::one());
    EXPECT_TRUE(one.certificate.isometric);

    Ambient B = Ambient::universal(Q2);
    auto E = W({"1", "2^1/2"});
    auto r = embed_into_Eu(Subspace::whole(E), B);
    EXPECT_EQ(B.stage().weight(1), M("2^-1/2"));
    EXPECT_EQ(r.scales[1], Scalar(Rational(1, 2)));
    EXPECT_EQ(r.map.apply(E.unit(1)), V({"0", "1/2"}));
    EXPECT_TRUE(r.certificate.isometric);

    Ambient C = Ambient::universal(Q2);
    auto eq = embed_into_Eu(Subspace::whole(W({"2^1/3", "2^4/3"})), C);
    EXPECT_NE(eq.indices[0], eq.indices[1]);
    auto* entry = C.registry().find(coset_of(M("2^1/3"), Q2.value_group()));
    ASSERT_NE(entry, nullptr);
    EXPECT_EQ(entry->indices, (std::vector<std::size_t>{0, 1}));
}

TEST(DispositionTest, Examples) {
    Ambient A(WeightedSpace::standard(Q2, 1));
    Subspace X(A.stage(), {A.stage().unit(0)});
    auto Y = W({"1", "2^1/2"});
    auto j = LinearMap::on_base(X, Y, {V({"1", "0"})});
    auto r = disposition_extend(A, j);
    EXPECT_EQ(A.dim(), 2u);
    EXPECT_EQ(A.stage().weight(1), M("2^-1/2"));
    EXPECT_EQ(r.f.apply(V({"0", "1"})), V({"0", "1/2"}));
    EXPECT_TRUE(r.certificate.isometric);
    EXPECT_TRUE(r.retraction_exact);

    Ambient B(WeightedSpace::standard(Q2, 2));
    auto jid = LinearMap::identity(Subspace::whole(B.stage()));
    auto same = disposition_extend(B, jid);
    EXPECT_EQ(B.dim(), 2u);
    EXPECT_TRUE(same.allocated.empty());
    EXPECT_EQ(same.f.apply(V({"3", "1/5"})), V({"3", "1/5"}));
}

TEST(DispositionTest, ApproxThenPatch) {
    Ambient A(WeightedSpace::standard(Q2, 1));
    Subspace X(A.stage(), {A.stage().unit(0)});
    auto j = LinearMap::on_base(X, W({"1", "2^1/2"}), {V({"1", "0"})});
    auto r = disposition_extend(A, j, DispositionMode::ApproxThenPatch);
    EXPECT_TRUE(r.approximation_distance->is_zero());
    EXPECT_FALSE(r.patched);
    EXPECT_TRUE(r.certificate.isometric);

    Ambient B(WeightedSpace::standard(Q2, 2));
    Subspace X2(B.stage(), {V({"1", "4"})});
    auto j2 = LinearMap::on_base(X2, W({"1", "1"}), {V({"1", "0"})});
    auto r2 = disposition_extend(B, j2, DispositionMode::ApproxThenPatch);
    EXPECT_EQ(*r2.approximation_distance, M("2^-2"));
    EXPECT_TRUE(r2.patched);
    EXPECT_TRUE(r2.certificate.isometric);
    EXPECT_TRUE(r2.retraction_exact);
}

TEST(ClassifyTest, Examples) {
    auto E = WeightedSpace::standard(Q2, 2);
    auto same = isometric_eq(Subspace::whole(E), Subspace::whole(E));
    EXPECT_TRUE(same.isometric);
    EXPECT_EQ(same.witness->images(), Subspace::whole(E).base());

    auto r = isometric_eq(Subspace::whole(W({"2^1/2", "1"})), Subspace::whole(E));
    EXPECT_FALSE(r.isometric);
    ASSERT_TRUE(r.obstruction);
    EXPECT_EQ(r.obstruction->representative, M("2^1/2"));
    EXPECT_TRUE(r.value_set_obstruction);

    auto s = isometric_eq(Subspace::whole(W({"1", "2^3"})), Subspace::whole(E));
    EXPECT_TRUE(s.isometric);
    EXPECT_EQ(s.left, s.right);
    EXPECT_EQ(s.witness->apply(V({"0", "1"})), V({"0", "1/8"}));
    EXPECT_TRUE(s.certificate->isometric);
}

TEST(ShrinkingBallsTest, Examples) {
    auto two = shrinking_balls(2);
    EXPECT_EQ(two.stream[0], M("2^-1/4"));
    EXPECT_EQ(two.stream[1], M("2^-1/3"));
    EXPECT_EQ(two.nesting_checks, 1u);
    EXPECT_TRUE(two.all_passed);
    EXPECT_EQ(two.ambient.stage().norm(two.balls[1].center - two.balls[0].center), M("2^-1/3"));

    auto fifty = shrinking_balls(50);
    EXPECT_EQ(fifty.nesting_checks, 49u);
    EXPECT_TRUE(fifty.all_passed);
    for (const auto& b : fifty.balls) EXPECT_GT(cmp3(b.radius, M("2^-1/2")), 0);

    EXPECT_THROW(shrinking_balls(3, std::vector<Magnitude>(4, M("3/4"))), InvalidArgument);
}
