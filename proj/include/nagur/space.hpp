#pragma once

/*
 * Finite-dimensional weighted sup-norm spaces  (K^n, max_i w_i |x_i|)  and their
 * subspaces, with exact orthogonalization.
 *
 * Orthogonal bases are kept in triangular pivot form: every base vector attains its
 * norm at its pivot coordinate and vanishes at the pivots of all earlier base
 * vectors. Such a set is orthogonal: in sum l_i b_i, the first index i* attaining
 * max ||l_i b_i|| contributes the only term of that size at pivot(i*), earlier
 * vectors being strictly smaller there and later ones zero.
 */

#include "nagur/magnitude.hpp"
#include "nagur/scalar.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace nagur {

using Vector = std::vector<Scalar>;

class WeightedSpace {
public:
    WeightedSpace() = default;
    WeightedSpace(FieldDescriptor field, std::vector<Magnitude> weights);
    static WeightedSpace standard(const FieldDescriptor& field, std::size_t dim);

    const FieldDescriptor& field() const { return field_; }
    std::size_t dim() const { return weights_.size(); }
    const std::vector<Magnitude>& weights() const { return weights_; }
    const Magnitude& weight(std::size_t i) const { return weights_.at(i); }

    /// max_i w_i |v_i|
    Magnitude norm(const Vector& v) const;
    Magnitude coordinate_size(const Vector& v, std::size_t i) const;

    Vector zero_vector() const;
    Vector unit(std::size_t i) const;
    /// Shape and backend check; throws InvalidArgument.
    void check(const Vector& v) const;

    WeightedSpace with_appended(const Magnitude& weight) const;
    /// True when `other` has this space's weights as a prefix (same field).
    bool is_prefix_of(const WeightedSpace& other) const;

    friend bool operator==(const WeightedSpace&, const WeightedSpace&) = default;

private:
    FieldDescriptor field_;
    std::vector<Magnitude> weights_;
};

// Vector arithmetic (same length, same backend).
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(const Scalar& s, const Vector& v);
bool is_zero(const Vector& v);
/// Zero-pads v to length n (embedding into a later stage).
Vector pad(const Vector& v, std::size_t n, const FieldDescriptor& f);
Vector linear_combination(const std::vector<Scalar>& coeffs, const std::vector<Vector>& vectors,
                          const WeightedSpace& space);

/// Result of ultrametric pivot elimination.
struct Orthogonalization {
    std::vector<Vector> base;                        ///< triangular orthogonal base
    std::vector<std::size_t> pivots;                 ///< pivot coordinate of each base vector
    std::vector<std::vector<Scalar>> combos;         ///< base[k] = sum_i combos[k][i] * input[i]
    std::vector<std::size_t> dependent;              ///< indices of dropped inputs
    std::vector<std::vector<Scalar>> dependencies;   ///< input[d] = sum_i dependencies[..][i] * input[i]
};

/// Processes inputs in order; pivot = coordinate maximizing w_j |v_j| (lowest index on ties).
/// Dependent inputs are dropped and reported.
Orthogonalization orthogonalize(const WeightedSpace& space, const std::vector<Vector>& vectors);

class Subspace {
public:
    Subspace() = default;
    Subspace(WeightedSpace ambient, std::vector<Vector> span);
    static Subspace whole(const WeightedSpace& ambient);
    static Subspace zero(const WeightedSpace& ambient) { return Subspace(ambient, {}); }

    const WeightedSpace& ambient() const { return ambient_; }
    const FieldDescriptor& field() const { return ambient_.field(); }
    const std::vector<Vector>& span() const { return span_; }
    const std::vector<Vector>& base() const { return ortho_.base; }
    const std::vector<std::size_t>& pivots() const { return ortho_.pivots; }
    const Orthogonalization& orthogonalization() const { return ortho_; }
    std::size_t dim() const { return ortho_.base.size(); }
    bool is_whole() const { return dim() == ambient_.dim(); }

    /// Coefficients of x in base(), or nothing when x is not in the subspace.
    std::optional<std::vector<Scalar>> coordinates(const Vector& x) const;
    bool contains(const Vector& x) const { return coordinates(x).has_value(); }
    bool contains(const Subspace& other) const;

    /// The same subspace viewed in a larger stage of the ambient.
    Subspace embedded_in(const WeightedSpace& larger) const;

private:
    WeightedSpace ambient_;
    std::vector<Vector> span_;
    Orthogonalization ortho_;
};

struct DistanceResult {
    Magnitude distance;
    Vector witness;                     ///< d* in D with ||v - d*|| = distance
    std::vector<Scalar> coefficients;   ///< d* in D.base() coordinates
};

/// dist(v, D), always attained.
DistanceResult distance(const Vector& v, const Subspace& D);

/// Exact t-orthogonality level of a finite set.
struct OrthoCertificate {
    std::vector<Vector> vectors;
    Magnitude level;                     ///< t* = min_i dist_i / ||x_i||
    std::vector<Magnitude> distances;    ///< dist(x_i, span(others))
    std::vector<Magnitude> ratios;       ///< dist_i / ||x_i||
    std::size_t worst = 0;               ///< first index attaining t*
    /// A tuple with ||sum l_i x_i|| = t* max ||l_i x_i|| (l_worst = 1).
    std::vector<Scalar> witness_coefficients;

    bool orthogonal() const { return level.is_one(); }
};

/// Throws InvalidArgument on a zero vector.
OrthoCertificate t_defect(const WeightedSpace& space, const std::vector<Vector>& vectors);

/// D0 = span{e_j : j not a pivot of D}; D + D0 = E and D is orthogonal to D0.
Subspace orthocomplement(const Subspace& D);

/// Vectors completing an orthogonalized copy of `prefix` to an orthogonal base of E,
/// vanishing on the prefix's pivots. For E the whole ambient these are unit vectors.
std::vector<Vector> complement_in(const Subspace& E, const std::vector<Vector>& prefix);

struct OrthogonalityResult {
    bool orthogonal = false;
    OrthoCertificate certificate;   ///< over base(D) followed by base(D0)
};

OrthogonalityResult subspaces_orthogonal(const Subspace& D, const Subspace& D0);

class DefectBelowRoot : public HypothesisViolation {
public:
    DefectBelowRoot(const Magnitude& defect, const Magnitude& t)
        : HypothesisViolation("t-orthogonality level " + defect.to_string() + " of the given base is below sqrt(" +
                              t.to_string() + ")"),
          defect(defect) {}
    Magnitude defect;
};

struct ExtendedBase {
    std::vector<Vector> vectors;   ///< the input list followed by the new vectors
    OrthoCertificate certificate;
};

/// Extends a sqrt(t)-orthogonal base of F inside E to a t-orthogonal base of E.
ExtendedBase extend_base(const std::vector<Vector>& f_base, const Subspace& E, const Magnitude& t);

// ---------------------------------------------------------------------------
// Linear maps

class LinearMap {
public:
    LinearMap() = default;
    /// The map sending domain_vectors[i] to images[i], orthogonalizing the domain.
    /// Throws InvalidArgument if dependent domain vectors have inconsistent images.
    static LinearMap from_images(const WeightedSpace& domain_space, const std::vector<Vector>& domain_vectors,
                                 const WeightedSpace& codomain, const std::vector<Vector>& images);
    /// The map on D that sends base(D)[k] to images[k].
    static LinearMap on_base(const Subspace& D, const WeightedSpace& codomain, std::vector<Vector> images);
    static LinearMap identity(const Subspace& D);
    static LinearMap inclusion(const Subspace& D, const WeightedSpace& codomain);

    const Subspace& domain() const { return domain_; }
    const WeightedSpace& codomain() const { return codomain_; }
    const std::vector<Vector>& base() const { return domain_.base(); }
    const std::vector<Vector>& images() const { return images_; }

    /// Throws InvalidArgument when x is outside the domain.
    Vector apply(const Vector& x) const;
    LinearMap restricted_to(const Subspace& X) const;
    /// this - other on this map's domain (other's domain must contain it).
    LinearMap minus(const LinearMap& other) const;
    LinearMap with_codomain(const WeightedSpace& larger) const;
    /// Compose: other after this.
    LinearMap then(const LinearMap& other) const;

private:
    Subspace domain_;
    WeightedSpace codomain_;
    std::vector<Vector> images_;
};

/// max_k ||L(b_k)|| / ||b_k|| over the orthogonal domain base; equals the operator norm.
Magnitude operator_norm(const LinearMap& L);

struct IsometryCertificate {
    bool isometric = false;
    std::vector<Magnitude> base_norms;
    std::vector<Magnitude> image_norms;
    std::optional<OrthoCertificate> image_defect;
    std::string failed_condition;     ///< empty when isometric
    std::optional<Vector> refutation; ///< x with ||L(x)|| != ||x||
};

/// Sound and complete for an orthogonal domain base: norms preserved on the base
/// and the images orthogonal.
IsometryCertificate certify_isometry(const LinearMap& L);

} // namespace nagur
