#pragma once

/*
 * JSON text I/O. Every magnitude and scalar is written as a string in its exact
 * grammar, so values round-trip bit for bit.
 *
 *   space     {"field":{"backend":"padic","prime":2}, "weights":["1","2^-1/2"]}
 *   vectors   [["1","0"],["1/2","3"]]
 *   subspace  {"span":[[...],[...]]}
 *   map       {"domain":<space>, "codomain":<space>, "vectors":[...], "images":[...]}
 */

#include "nagur/gurarii.hpp"
#include "nagur/magnitude.hpp"
#include "nagur/scalar.hpp"
#include "nagur/space.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nagur {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "nagur";
inline constexpr const char* kToolVersion = "1.0.0";

/// Throws ParseError on malformed text.
Json parse_json(std::string_view text);
Json read_json_file(const std::string& path);

Json to_json(const FieldDescriptor& f);
FieldDescriptor field_from_json(const Json& j);

Json to_json(const Magnitude& m);
Magnitude magnitude_from_json(const Json& j);
Json to_json(const Scalar& s);
Scalar scalar_from_json(const Json& j, const FieldDescriptor& f);

Json to_json(const Vector& v);
Vector vector_from_json(const Json& j, const WeightedSpace& space);
Json to_json(const std::vector<Vector>& vs);
/// Accepts a bare array of vectors or an object with a "vectors" member.
std::vector<Vector> vectors_from_json(const Json& j, const WeightedSpace& space);

Json to_json(const WeightedSpace& space);
/// `fallback` supplies the field when the file has none; a file field wins.
WeightedSpace space_from_json(const Json& j, const std::optional<FieldDescriptor>& fallback = std::nullopt);

Json to_json(const Subspace& D);
/// {"span": [...]} or a bare array of vectors.
Subspace subspace_from_json(const Json& j, const WeightedSpace& ambient);

Json to_json(const LinearMap& L);
LinearMap map_from_json(const Json& j, const std::optional<FieldDescriptor>& fallback = std::nullopt);

Json to_json(const Coset& c);
Json to_json(const Gap& g);

Json to_json(const Orthogonalization& o);
Json to_json(const DistanceResult& d);
Json to_json(const OrthoCertificate& c);
Json to_json(const OrthogonalityResult& r);
Json to_json(const ExtendedBase& b);
Json to_json(const IsometryCertificate& c);
Json to_json(const DensityResult& d);
Json to_json(const EpsIsometryReport& r);
Json to_json(const GapCertificate& c);
Json to_json(const PatchResult& r);
Json to_json(const SplitResult& r);
Json to_json(const PerturbationVerdict& v);
Json to_json(const EmbeddingResult& r);
Json to_json(const DispositionResult& r);
Json to_json(const Fingerprint& f);
Json to_json(const IsometricEqResult& r);
Json to_json(const CosetRegistry& r);
Json to_json(const ShrinkingBallsResult& r);

/// {"tool", "version", "kind", "field", ...payload}
Json certificate(const std::string& kind, const FieldDescriptor& f, const Json& payload);

} // namespace nagur
