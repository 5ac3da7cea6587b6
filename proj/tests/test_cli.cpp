#include "nagur/serialize.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace nagur;

namespace {

const std::regex kMagnitude(R"(^(0|1|[0-9]+\^-?[0-9]+(/[0-9]+)?(\*[0-9]+\^-?[0-9]+(/[0-9]+)?)*)$)");
const std::regex kRational(R"(^-?[0-9]+(/[0-9]+)?$)");

struct Counts {
    std::size_t magnitudes = 0, rationals = 0, scalars = 0, spaces = 0, maps = 0;
};

Json read(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_json(buf.str());
}

bool is_vector_list(const Json& j) {
    return j.is_array() && !j.empty() &&
           std::all_of(j.begin(), j.end(), [](const Json& v) {
               return v.is_array() && std::all_of(v.begin(), v.end(), [](const Json& s) { return s.is_string(); });
           });
}

void walk(const Json& j, const std::optional<FieldDescriptor>& field, Counts& n, const std::string& where) {
    if (j.is_object()) {
        std::optional<FieldDescriptor> f = field;
        if (j.contains("field") && j["field"].is_object()) f = field_from_json(j["field"]);
        if (j.contains("weights") && j.contains("field")) {
            WeightedSpace E = space_from_json(j);
            EXPECT_EQ(to_json(E), j) << where;
            ++n.spaces;
        }
        if (j.contains("domain") && j.contains("codomain") && j.contains("images")) {
            LinearMap L = map_from_json(j);
            EXPECT_EQ(to_json(L.codomain()), j["codomain"]) << where;
            EXPECT_EQ(L.apply(L.base().front()).size(), L.codomain().dim()) << where;
            ++n.maps;
        }
        for (auto it = j.begin(); it != j.end(); ++it) walk(it.value(), f, n, where + "/" + it.key());
        return;
    }
    if (is_vector_list(j) && field) {
        for (const auto& v : j)
            for (const auto& s : v) {
                auto text = s.get<std::string>();
                EXPECT_EQ(Scalar::parse(text, *field).to_string(), text) << where;
                ++n.scalars;
            }
        return;
    }
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) walk(j[i], field, n, where + "/" + std::to_string(i));
        return;
    }
    if (!j.is_string()) return;
    auto text = j.get<std::string>();
    if (std::regex_match(text, kMagnitude)) {
        EXPECT_EQ(Magnitude::parse(text).to_string(), text) << where;
        ++n.magnitudes;
    } else if (std::regex_match(text, kRational)) {
        EXPECT_EQ(to_string(parse_rational(text)), text) << where;
        ++n.rationals;
    }
}

std::vector<std::filesystem::path> golden_outputs() {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(std::string(NAGUR_GOLDEN_DIR) + "/cli"))
        if (e.path().extension() == ".json") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST(CliGolden, OutputsPresent) {
    auto files = golden_outputs();
    EXPECT_GE(files.size(), 20u);
    for (const auto& f : files) {
        Json j = read(f);
        EXPECT_EQ(j["tool"], kToolName) << f;
        EXPECT_EQ(j["version"], kToolVersion) << f;
    }
}

class CliProperties : public ::testing::Test {};

TEST_F(CliProperties, PrintedValuesReparse) {
    Counts n;
    for (const auto& f : golden_outputs()) walk(read(f), std::nullopt, n, f.filename().string());
    EXPECT_GT(n.magnitudes, 100u);
    EXPECT_GT(n.rationals, 0u);
    EXPECT_GT(n.scalars, 100u);
    EXPECT_GT(n.spaces, 20u);
    EXPECT_GT(n.maps, 5u);
}
