#include "nagur/serialize.hpp"

#include "nagur/error.hpp"

#include <fstream>
#include <sstream>

namespace nagur {

namespace {

const Json& member(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing member \"") + key + "\"");
    return j.at(key);
}

std::string text_of(const Json& j, const char* what) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw ParseError(std::string(what) + " must be a string in the exact grammar");
}

Json magnitudes(const std::vector<Magnitude>& ms) {
    Json out = Json::array();
    for (const auto& m : ms) out.push_back(to_json(m));
    return out;
}

Json scalars(const std::vector<Scalar>& ss) {
    Json out = Json::array();
    for (const auto& s : ss) out.push_back(to_json(s));
    return out;
}

Json indices(const std::vector<std::size_t>& is) {
    Json out = Json::array();
    for (auto i : is) out.push_back(i);
    return out;
}

Json optional_vector(const std::optional<Vector>& v) {
    return v ? to_json(*v) : Json(nullptr);
}

} // namespace

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_json(buf.str());
}

// ---------------------------------------------------------------------------
// Values

Json to_json(const FieldDescriptor& f) {
    Json j = {{"backend", f.backend_name()}, {"prime", f.prime}};
    if (f.backend == Backend::HahnTruncated) j["tail_order"] = to_string(f.default_tail_order);
    return j;
}

FieldDescriptor field_from_json(const Json& j) {
    std::string backend = member(j, "backend").is_string() ? member(j, "backend").get<std::string>() : "";
    const Json& pj = member(j, "prime");
    if (!pj.is_number_unsigned() && !pj.is_number_integer()) throw ParseError("prime must be an integer");
    long long p = pj.get<long long>();
    if (p < 2) throw ParseError("prime must be at least 2");
    try {
        if (backend == "padic") return FieldDescriptor::padic(static_cast<Prime>(p));
        if (backend == "hahn") {
            Rational tail = 8;
            if (j.contains("tail_order")) tail = parse_rational(text_of(j.at("tail_order"), "tail_order"));
            if (sgn(tail) <= 0) throw ParseError("tail_order must be positive");
            return FieldDescriptor::hahn(static_cast<Prime>(p), tail);
        }
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    throw ParseError("backend must be \"padic\" or \"hahn\"");
}

Json to_json(const Magnitude& m) { return m.to_string(); }

Magnitude magnitude_from_json(const Json& j) { return Magnitude::parse(text_of(j, "magnitude")); }

Json to_json(const Scalar& s) { return s.to_string(); }

Scalar scalar_from_json(const Json& j, const FieldDescriptor& f) { return Scalar::parse(text_of(j, "scalar"), f); }

Json to_json(const Vector& v) { return scalars(v); }

Vector vector_from_json(const Json& j, const WeightedSpace& space) {
    if (!j.is_array()) throw ParseError("a vector must be an array of scalars");
    if (j.size() != space.dim())
        throw ParseError("vector of length " + std::to_string(j.size()) + " in a space of dimension " +
                         std::to_string(space.dim()));
    Vector v;
    v.reserve(j.size());
    for (const auto& x : j) v.push_back(scalar_from_json(x, space.field()));
    return v;
}

Json to_json(const std::vector<Vector>& vs) {
    Json out = Json::array();
    for (const auto& v : vs) out.push_back(to_json(v));
    return out;
}

std::vector<Vector> vectors_from_json(const Json& j, const WeightedSpace& space) {
    const Json& arr = j.is_object() ? member(j, "vectors") : j;
    if (!arr.is_array()) throw ParseError("expected an array of vectors");
    std::vector<Vector> out;
    for (const auto& v : arr) out.push_back(vector_from_json(v, space));
    return out;
}

Json to_json(const WeightedSpace& space) {
    return {{"field", to_json(space.field())}, {"weights", magnitudes(space.weights())}};
}

WeightedSpace space_from_json(const Json& j, const std::optional<FieldDescriptor>& fallback) {
    if (!j.is_object()) throw ParseError("a space must be an object");
    FieldDescriptor f;
    if (j.contains("field")) f = field_from_json(j.at("field"));
    else if (fallback) f = *fallback;
    else throw ParseError("space has no field and none was given (--prime/--backend)");
    const Json& ws = member(j, "weights");
    if (!ws.is_array()) throw ParseError("weights must be an array");
    std::vector<Magnitude> weights;
    for (const auto& w : ws) weights.push_back(magnitude_from_json(w));
    try {
        return WeightedSpace(f, std::move(weights));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

Json to_json(const Subspace& D) { return {{"span", to_json(D.base())}}; }

Subspace subspace_from_json(const Json& j, const WeightedSpace& ambient) {
    const Json& arr = j.is_object() ? member(j, "span") : j;
    return Subspace(ambient, vectors_from_json(arr, ambient));
}

Json to_json(const LinearMap& L) {
    return {{"domain", to_json(L.domain().ambient())},
            {"codomain", to_json(L.codomain())},
            {"vectors", to_json(L.base())},
            {"images", to_json(L.images())}};
}

LinearMap map_from_json(const Json& j, const std::optional<FieldDescriptor>& fallback) {
    WeightedSpace dom = space_from_json(member(j, "domain"), fallback);
    WeightedSpace cod = space_from_json(member(j, "codomain"), dom.field());
    auto xs = vectors_from_json(member(j, "vectors"), dom);
    auto ys = vectors_from_json(member(j, "images"), cod);
    return LinearMap::from_images(dom, xs, cod, ys);
}

Json to_json(const Coset& c) { return c.to_string(); }

Json to_json(const Gap& g) { return {{"lo", to_json(g.lo)}, {"hi", to_json(g.hi)}}; }

// ---------------------------------------------------------------------------
// Results

Json to_json(const Orthogonalization& o) {
    Json deps = Json::array();
    for (std::size_t k = 0; k < o.dependent.size(); ++k)
        deps.push_back({{"index", o.dependent[k]}, {"coefficients", scalars(o.dependencies[k])}});
    Json combos = Json::array();
    for (const auto& c : o.combos) combos.push_back(scalars(c));
    return {{"base", to_json(o.base)}, {"pivots", indices(o.pivots)}, {"combos", combos}, {"dependent", deps}};
}

Json to_json(const DistanceResult& d) {
    return {{"distance", to_json(d.distance)},
            {"witness", to_json(d.witness)},
            {"coefficients", scalars(d.coefficients)}};
}

Json to_json(const OrthoCertificate& c) {
    return {{"level", to_json(c.level)},
            {"orthogonal", c.orthogonal()},
            {"vectors", to_json(c.vectors)},
            {"distances", magnitudes(c.distances)},
            {"ratios", magnitudes(c.ratios)},
            {"worst", c.worst},
            {"witness_coefficients", scalars(c.witness_coefficients)}};
}

Json to_json(const OrthogonalityResult& r) {
    return {{"orthogonal", r.orthogonal}, {"certificate", to_json(r.certificate)}};
}

Json to_json(const ExtendedBase& b) {
    return {{"vectors", to_json(b.vectors)}, {"certificate", to_json(b.certificate)}};
}

Json to_json(const IsometryCertificate& c) {
    return {{"isometric", c.isometric},
            {"base_norms", magnitudes(c.base_norms)},
            {"image_norms", magnitudes(c.image_norms)},
            {"image_defect", c.image_defect ? to_json(*c.image_defect) : Json(nullptr)},
            {"failed_condition", c.failed_condition},
            {"refutation", optional_vector(c.refutation)}};
}

Json to_json(const DensityResult& d) {
    return {{"dense", d.dense}, {"gap", d.gap ? to_json(*d.gap) : Json(nullptr)}, {"reason", d.reason}};
}

Json to_json(const EpsIsometryReport& r) {
    return {{"epsilon", to_string(r.epsilon)},
            {"t", to_json(r.t)},
            {"map", to_json(r.f)},
            {"y_base", to_json(r.y_base)},
            {"x_base", to_json(r.x_base)},
            {"y_level", to_json(r.y_level)},
            {"x_level", to_json(r.x_level)},
            {"min_ratio", to_json(r.min_ratio)},
            {"max_ratio", to_json(r.max_ratio)},
            {"lower", to_json(r.lower)},
            {"upper", to_json(r.upper)},
            {"asserts", "(1-eps)||y|| <= ||f(y)|| <= (1+eps)||y||"},
            {"bounds_hold", r.bounds_hold},
            {"t_chain_holds", r.t_chain_holds},
            {"strict_predicate", r.strict_predicate},
            {"retraction_exact", r.retraction_exact}};
}

Json to_json(const GapCertificate& c) {
    Json ladders = Json::array();
    for (const auto& l : c.ladders)
        ladders.push_back({{"weight", to_json(l.weight)}, {"below", l.below.get_str()}, {"above", l.above.get_str()}});
    return {{"space", to_json(c.space)},
            {"s", to_json(c.s1)},
            {"epsilon", to_string(c.epsilon)},
            {"gap", to_json(c.gap)},
            {"lower", to_json(c.lower)},
            {"upper", to_json(c.upper)},
            {"refutes_constructive", c.refutes_constructive},
            {"refutes_definitional", c.refutes_definitional},
            {"ladders", ladders},
            {"test_space", to_json(c.test_space)}};
}

Json to_json(const PatchResult& r) {
    return {{"t", to_json(r.t)},
            {"map", to_json(r.T)},
            {"base", to_json(r.base)},
            {"agrees_on_x", r.agrees_on_x},
            {"certificate", to_json(r.certificate)}};
}

Json to_json(const SplitResult& r) {
    return {{"u", to_json(r.u)},
            {"m_x", r.m_x},
            {"f_y", to_json(r.f_y)},
            {"certificate", to_json(r.certificate)}};
}

Json to_json(const PerturbationVerdict& v) {
    return {{"hypotheses_hold", v.hypotheses_hold},
            {"failed_index", v.failed_index ? Json(*v.failed_index) : Json(nullptr)},
            {"failure", v.failure},
            {"xs_level", to_json(v.xs_level)},
            {"norms_preserved", v.norms_preserved},
            {"zs_certificate", v.zs_certificate ? to_json(*v.zs_certificate) : Json(nullptr)},
            {"certified", v.certified}};
}

Json to_json(const EmbeddingResult& r) {
    return {{"map", to_json(r.map)},
            {"indices", indices(r.indices)},
            {"scales", scalars(r.scales)},
            {"certificate", to_json(r.certificate)}};
}

Json to_json(const DispositionResult& r) {
    Json j = {{"map", to_json(r.f)},
              {"split", to_json(r.split)},
              {"allocated", indices(r.allocated)},
              {"retraction_exact", r.retraction_exact},
              {"certificate", to_json(r.certificate)}};
    j["approximation"] = r.approximation ? to_json(*r.approximation) : Json(nullptr);
    j["approximation_distance"] = r.approximation_distance ? to_json(*r.approximation_distance) : Json(nullptr);
    j["patched"] = r.patched;
    return j;
}

Json to_json(const Fingerprint& f) {
    Json cs = Json::array();
    for (const auto& c : f.cosets) cs.push_back(to_json(c));
    return {{"dim", f.dim}, {"cosets", cs}};
}

Json to_json(const IsometricEqResult& r) {
    return {{"isometric", r.isometric},
            {"left", to_json(r.left)},
            {"right", to_json(r.right)},
            {"witness", r.witness ? to_json(*r.witness) : Json(nullptr)},
            {"certificate", r.certificate ? to_json(*r.certificate) : Json(nullptr)},
            {"obstruction", r.obstruction ? to_json(*r.obstruction) : Json(nullptr)},
            {"value_set_obstruction", r.value_set_obstruction},
            {"dimension_mismatch", r.dimension_mismatch}};
}

Json to_json(const CosetRegistry& r) {
    Json entries = Json::array();
    for (const auto& [c, e] : r.entries())
        entries.push_back({{"coset", to_json(c)}, {"representative", to_json(e.representative)}, {"indices", indices(e.indices)}});
    return {{"r", to_json(r.r())}, {"entries", entries}};
}

Json to_json(const ShrinkingBallsResult& r) {
    Json balls = Json::array();
    for (const auto& b : r.balls) balls.push_back({{"center", to_json(b.center)}, {"radius", to_json(b.radius)}});
    Json log = Json::array();
    for (const auto& l : r.log) log.push_back(l);
    return {{"stage", to_json(r.ambient.stage())},
            {"registry", to_json(r.ambient.registry())},
            {"stream", magnitudes(r.stream)},
            {"balls", balls},
            {"nesting_checks", r.nesting_checks},
            {"all_passed", r.all_passed},
            {"log", log}};
}

Json certificate(const std::string& kind, const FieldDescriptor& f, const Json& payload) {
    Json j = {{"tool", kToolName}, {"version", kToolVersion}, {"kind", kind}, {"field", to_json(f)}};
    for (auto it = payload.begin(); it != payload.end(); ++it) j[it.key()] = it.value();
    return j;
}

} // namespace nagur
