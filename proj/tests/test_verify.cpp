#include "helpers.hpp"

#include "nagur/verify.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace nagur;
using testing_helpers::M;

namespace {

const FieldDescriptor Q2 = FieldDescriptor::padic(2);

Vector V(std::initializer_list<long> xs) {
    Vector v;
    for (long x : xs) v.emplace_back(Rational(x));
    return v;
}

Json golden(const std::string& name) {
    std::ifstream in(std::string(NAGUR_GOLDEN_DIR) + "/" + name);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_json(buf.str());
}

} // namespace

TEST(OracleExamples, Distances) {
    auto E = WeightedSpace::standard(Q2, 2);
    Subspace D(E, {V({1, 1})});
    EXPECT_TRUE(brute_force_distance(V({3, 3}), D).distance.is_zero());
    auto r = brute_force_distance(V({1, 0}), D);
    EXPECT_EQ(r.distance, Magnitude::one());
    EXPECT_TRUE(r.resolved);
    auto h = brute_force_distance(V({1, 2}), Subspace(E, {V({1, 0})}));
    EXPECT_EQ(h.distance, M("2^-1"));
    EXPECT_TRUE(h.resolved);
    EXPECT_EQ(h.distance, distance(V({1, 2}), Subspace(E, {V({1, 0})})).distance);
}

TEST(OracleExamples, CapsAndBackend) {
    auto E4 = WeightedSpace::standard(Q2, 4);
    EXPECT_THROW(brute_force_distance(E4.unit(0), Subspace(E4, {E4.unit(1)})), CapsExceeded);
    auto E3 = WeightedSpace::standard(Q2, 3);
    EXPECT_THROW(brute_force_distance(E3.unit(0), Subspace(E3, {E3.unit(0), E3.unit(1), E3.unit(2)})), CapsExceeded);
    auto H = WeightedSpace::standard(FieldDescriptor::hahn(2), 2);
    EXPECT_THROW(brute_force_distance(H.unit(0), Subspace(H, {H.unit(1)})), InvalidArgument);
    OracleConfig bad;
    bad.window = 0;
    EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(OracleExamples, DepthChoice) {
    OracleConfig cfg;
    EXPECT_EQ(cfg.depth_for(2), 3);
    EXPECT_EQ(cfg.depth_for(3), 2);
    EXPECT_EQ(cfg.depth_for(5), 2);
    EXPECT_EQ(cfg.depth_for(11), 1);
}

TEST(GeneratorExamples, GoldenIsometry) {
    Rng rng = InstanceSeed{42, 0}.engine();
    auto E = gen_space(rng, Q2, 2);
    auto g = gen_isometry(rng, E);
    Json now = {{"seed", 42}, {"dim", 2}, {"prime", 2}, {"space", to_json(E)}, {"steps", g.steps},
                {"rejected_shears", g.rejected_shears}, {"map", to_json(g.map)}};
    EXPECT_EQ(now, golden("gen_isometry_seed42_dim2_p2.json"));
}

TEST(GeneratorExamples, GoldenIsUnimodular) {
    // equal weights: an isometry is a matrix over Z_2 with unit determinant
    Json g = golden("gen_isometry_seed42_dim2_p2.json");
    WeightedSpace E = space_from_json(g["space"]);
    ASSERT_EQ(E.weight(0), E.weight(1));
    auto cols = vectors_from_json(g["map"]["images"], E);
    Rational det = cols[0][0].rational() * cols[1][1].rational() - cols[1][0].rational() * cols[0][1].rational();
    for (const auto& c : cols)
        for (const auto& x : c) EXPECT_NE(x.rational().get_den() % 2, 0);
    EXPECT_NE(det.get_num() % 2, 0);
    EXPECT_NE(det.get_den() % 2, 0);
}

TEST(GeneratorExamples, ShearGuardAndPermutations) {
    std::size_t rejected = 0;
    WeightedSpace skew(Q2, {M("2^-3"), M("2^3")});
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng = InstanceSeed{s, 0}.engine();
        auto g = gen_isometry(rng, skew, 6);
        EXPECT_TRUE(g.certificate.isometric);
        rejected += g.rejected_shears;
    }
    EXPECT_GT(rejected, 0u);

    bool swapped = false;
    auto E = WeightedSpace::standard(Q2, 3);
    for (std::uint64_t s = 0; s < 10; ++s) {
        Rng rng = InstanceSeed{s, 1}.engine();
        auto g = gen_isometry(rng, E, 6, false);
        EXPECT_TRUE(g.certificate.isometric);
        for (const auto& st : g.steps) swapped = swapped || st.rfind("swap", 0) == 0;
    }
    EXPECT_TRUE(swapped);
}

TEST(GeneratorExamples, SeedsReproduce) {
    EXPECT_EQ(InstanceSeed({7, 3}).derived(), InstanceSeed({7, 3}).derived());
    EXPECT_NE(InstanceSeed({7, 3}).derived(), InstanceSeed({7, 4}).derived());
    EXPECT_NE(InstanceSeed({7, 3}).derived(), InstanceSeed({8, 3}).derived());
    Rng a = InstanceSeed{1, 1}.engine(), b = InstanceSeed{1, 1}.engine();
    EXPECT_EQ(gen_vector(a, WeightedSpace::standard(Q2, 4)), gen_vector(b, WeightedSpace::standard(Q2, 4)));
}

TEST(GapRecheckExamples, DetectsTampering) {
    auto E = WeightedSpace::standard(Q2, 1);
    auto cert = nonexistence_certificate(E, M("3/4"), Rational(1, 4));
    EXPECT_TRUE(recheck_gap_certificate(cert).ok);
    Rng rng(1);
    auto adv = run_adversary(cert, rng, 1000);
    EXPECT_EQ(adv.refuted, 1000u);
    EXPECT_EQ(adv.refuted_by_value_set, 1000u);

    auto wide = cert;
    wide.gap.hi = M("2");
    EXPECT_FALSE(recheck_gap_certificate(wide).ok);
    auto ladder = cert;
    ladder.ladders[0].below += 1;
    EXPECT_FALSE(recheck_gap_certificate(ladder).ok);
    auto interval = cert;
    interval.upper = M("1");
    EXPECT_FALSE(recheck_gap_certificate(interval).ok);
}

TEST(SuiteExamples, NamedRuns) {
    auto lort = run_suite("l-ort", 7, 1000);
    EXPECT_EQ(lort.passed, 1000u);
    auto tchar = run_suite("t-char", 1, 1);
    EXPECT_EQ(tchar.passed, 1u);
    EXPECT_THROW(run_suite("bogus", 1, 1), UnknownSuite);
}

TEST(SuiteExamples, ReportShape) {
    auto r = run_suite("nowy", 5, 12, 2);
    Json j = to_json(r);
    EXPECT_EQ(j["suite"], "nowy");
    EXPECT_EQ(j["cases"], 12);
    EXPECT_EQ(j["passed"].get<std::size_t>() + j["failed"].get<std::size_t>(), 12u);
    EXPECT_EQ(j["verdicts"].get<std::string>().size(), 12u);
    EXPECT_TRUE(j["failures"].is_array());
    EXPECT_TRUE(j.contains("wall_seconds"));
    EXPECT_FALSE(to_json(r, false).contains("wall_seconds"));
}

TEST(ChainExamples, TenRequests) {
    for (auto f : {Q2, FieldDescriptor::hahn(2)}) {
        auto rep = run_disposition_chain(f, 11, 10);
        EXPECT_EQ(rep.steps.size(), 10u);
        EXPECT_TRUE(rep.all_certified) << rep.failure;
        EXPECT_TRUE(rep.all_retractions) << rep.failure;
        EXPECT_TRUE(rep.approximations_below_one) << rep.failure;
        EXPECT_TRUE(rep.coherent) << rep.failure;
        EXPECT_GT(rep.final_stage.dim(), 1u);
    }
}

class VerifyProperties : public ::testing::Test {
protected:
    static constexpr std::uint64_t kSeed = 20261015;
};

TEST_F(VerifyProperties, EverySuitePasses) {
    for (const auto& name : suite_names()) {
        if (name == "all") continue;
        auto r = run_suite(name, kSeed, 40);
        EXPECT_EQ(r.failed, 0u) << name << ": "
                                << (r.failed ? to_json(r, false)["failures"][0]["detail"].get<std::string>() : "");
    }
}

TEST_F(VerifyProperties, ReportsIgnoreThreadCount) {
    for (const char* name : {"oracle", "prop-ud", "izo-classify"}) {
        auto a = to_json(run_suite(name, kSeed, 16, 1), false).dump();
        auto b = to_json(run_suite(name, kSeed, 16, 3), false).dump();
        EXPECT_EQ(a, b) << name;
    }
}

TEST_F(VerifyProperties, GeneratedIsometriesCertify) {
    for (std::uint64_t i = 0; i < 200; ++i) {
        Rng rng = InstanceSeed{kSeed, i}.engine();
        FieldDescriptor f = i % 3 == 2 ? FieldDescriptor::hahn(2) : FieldDescriptor::padic(i % 3 ? 3 : 2);
        GenParams gp;
        gp.fractional_weights = i % 2;
        auto E = gen_space(rng, f, 1 + i % 5, gp);
        auto g = gen_isometry(rng, E, 5, !f.is_dense());
        EXPECT_TRUE(g.certificate.isometric);
        Vector x = gen_vector(rng, E);
        EXPECT_EQ(E.norm(g.map.apply(x)), E.norm(x));
    }
}
