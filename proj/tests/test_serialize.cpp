#include "helpers.hpp"

#include "nagur/gurarii.hpp"
#include "nagur/serialize.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nagur;
using testing_helpers::M;

namespace {

Scalar q(long n, long d = 1) { return Scalar(make_rational(n, d)); }

} // namespace

TEST(SerializeExamples, SpaceFileFormat) {
    auto j = parse_json(R"({"field":{"backend":"padic","prime":2}, "weights":["1","2^-1/2"]})");
    WeightedSpace E = space_from_json(j);
    EXPECT_EQ(E.field(), FieldDescriptor::padic(2));
    ASSERT_EQ(E.dim(), 2u);
    EXPECT_EQ(E.weight(1), M("2^-1/2"));
    EXPECT_EQ(space_from_json(to_json(E)), E);
}

TEST(SerializeExamples, FieldFallbackAndOverride) {
    auto j = parse_json(R"({"weights":["1","1"]})");
    EXPECT_THROW(space_from_json(j), ParseError);
    WeightedSpace E = space_from_json(j, FieldDescriptor::hahn(3, 4));
    EXPECT_EQ(E.field(), FieldDescriptor::hahn(3, 4));
    EXPECT_EQ(space_from_json(to_json(E)), E);
}

TEST(SerializeExamples, VectorsAndSubspaces) {
    WeightedSpace E = WeightedSpace::standard(FieldDescriptor::padic(2), 2);
    auto vs = vectors_from_json(parse_json(R"([["1","1"],["0","-1/2"]])"), E);
    ASSERT_EQ(vs.size(), 2u);
    EXPECT_EQ(vs[1][1], q(-1, 2));
    EXPECT_EQ(vectors_from_json(parse_json(R"({"vectors":[["1","1"]]})"), E).size(), 1u);
    Subspace D = subspace_from_json(parse_json(R"({"span":[["1","1"],["2","2"]]})"), E);
    EXPECT_EQ(D.dim(), 1u);
    EXPECT_EQ(subspace_from_json(to_json(D), E).base(), D.base());
}

TEST(SerializeExamples, MalformedInputs) {
    WeightedSpace E = WeightedSpace::standard(FieldDescriptor::padic(2), 2);
    EXPECT_THROW(parse_json("{"), ParseError);
    EXPECT_THROW(vectors_from_json(parse_json(R"([["1"]])"), E), ParseError);
    EXPECT_THROW(vectors_from_json(parse_json(R"([["1","x"]])"), E), ParseError);
    EXPECT_THROW(space_from_json(parse_json(R"({"field":{"backend":"real","prime":2},"weights":[]})")), ParseError);
    EXPECT_THROW(space_from_json(parse_json(R"({"field":{"backend":"padic","prime":4},"weights":[]})")), ParseError);
    EXPECT_THROW(space_from_json(parse_json(R"({"field":{"backend":"padic","prime":2},"weights":["2^1/"]})")),
                 ParseError);
    EXPECT_THROW(read_json_file("/nonexistent/space.json"), ParseError);
}

TEST(SerializeExamples, MapRoundTrip) {
    auto f = FieldDescriptor::hahn(2);
    WeightedSpace Y(f, {M("1"), M("1")});
    WeightedSpace A(f, {M("1"), M("2^-1/3")});
    auto L = LinearMap::from_images(Y, {Y.unit(0), Y.unit(1)}, A,
                                    {A.unit(0), Vector{Scalar::zero(f), Scalar::parse("t^(1/3)", f)}});
    LinearMap back = map_from_json(parse_json(to_json(L).dump()));
    EXPECT_EQ(back.images(), L.images());
    EXPECT_EQ(back.base(), L.base());
    EXPECT_EQ(back.codomain(), L.codomain());
}

TEST(SerializeExamples, CertificateEnvelope) {
    WeightedSpace E = WeightedSpace::standard(FieldDescriptor::padic(2), 1);
    auto cert = nonexistence_certificate(E, M("3/4"), make_rational(1, 4));
    Json j = certificate("gap", E.field(), to_json(cert));
    EXPECT_EQ(j["tool"], kToolName);
    EXPECT_EQ(j["version"], kToolVersion);
    EXPECT_EQ(j["field"]["backend"], "padic");
    EXPECT_EQ(j["gap"]["lo"], "2^-1");
    EXPECT_EQ(j["gap"]["hi"], "1");
    EXPECT_EQ(Magnitude::parse(j["lower"].get<std::string>()), cert.lower);
    EXPECT_TRUE(j["refutes_constructive"].get<bool>());
}

class SerializeProperties : public ::testing::Test {
protected:
    std::mt19937_64 rng{20261015};
};

TEST_F(SerializeProperties, PrintedValuesReparse) {
    for (auto f : {FieldDescriptor::padic(3), FieldDescriptor::hahn(2)}) {
        for (int it = 0; it < 200; ++it) {
            std::uniform_int_distribution<long> num(-30, 30), den(1, 12), ex(-6, 6);
            std::vector<Magnitude> ws;
            Vector v;
            for (int i = 0; i < 3; ++i) {
                ws.push_back(Magnitude::prime_power(f.prime, make_rational(ex(rng), den(rng))));
                Scalar s = Scalar::from_rational(make_rational(num(rng), den(rng)), f);
                if (!f.is_dense() || it % 2) v.push_back(s);
                else
                    v.push_back(Scalar(HahnSeries::from_terms(
                        {{make_rational(num(rng), 1), make_rational(ex(rng), den(rng))},
                         {make_rational(num(rng), 1), make_rational(ex(rng), den(rng))}})));
            }
            WeightedSpace E(f, ws);
            Json doc = {{"space", to_json(E)}, {"v", to_json(v)}, {"norm", to_json(E.norm(v))}};
            Json back = parse_json(doc.dump());
            EXPECT_EQ(space_from_json(back["space"]), E);
            EXPECT_EQ(vector_from_json(back["v"], E), v);
            EXPECT_EQ(magnitude_from_json(back["norm"]), E.norm(v));
        }
    }
}
