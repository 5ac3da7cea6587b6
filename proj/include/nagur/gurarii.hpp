#pragma once

/*
 * Universal-disposition constructions on finite stages.
 *
 * An Ambient is a growing weighted space: coordinates are only ever appended, so
 * every earlier stage is a prefix of every later one and vectors embed by zero
 * padding. When it models the universal space c0(I_u) with norm max s(i)|x_i|, the
 * weights come from a CosetRegistry that fixes one representative s_g in (r, 1]
 * for every coset g of the value group and records the coordinates I_g allocated
 * for it.
 */

#include "nagur/magnitude.hpp"
#include "nagur/scalar.hpp"
#include "nagur/space.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace nagur {

class CosetRegistry {
public:
    struct Entry {
        Magnitude representative;
        std::vector<std::size_t> indices;
    };

    CosetRegistry() = default;
    /// r must lie in (0, 1); a discrete group additionally needs r <= 1/p.
    CosetRegistry(ValueGroupDescriptor group, Magnitude r);
    /// r = 1/p for discrete groups, 3/4 for dense ones.
    static Magnitude default_r(const ValueGroupDescriptor& group);

    const ValueGroupDescriptor& group() const { return group_; }
    const Magnitude& r() const { return r_; }
    const std::map<Coset, Entry, CosetLess>& entries() const { return entries_; }

    const Entry* find(const Coset& c) const;
    /// s_g for the coset of m, registering the coset on first use.
    const Magnitude& representative_for(const Magnitude& m);
    void record_index(const Coset& c, std::size_t index);

private:
    ValueGroupDescriptor group_;
    Magnitude r_ = Magnitude::prime_power(2, -1);
    std::map<Coset, Entry, CosetLess> entries_;
};

class AllocatorExhausted : public Error {
public:
    using Error::Error;
};

class Ambient {
public:
    /// A stage that grows from `initial`. Coordinates whose weight is already the
    /// registry representative of its coset are recorded in the registry.
    Ambient(WeightedSpace initial, std::optional<Magnitude> r = std::nullopt, bool declared_dense = false,
            std::size_t max_dim = 4096);
    /// The universal space over f: empty stage, registry-driven, value set dense by construction.
    static Ambient universal(const FieldDescriptor& f, std::optional<Magnitude> r = std::nullopt,
                             std::size_t initial_dim = 0);

    Ambient(const Ambient& other);
    Ambient& operator=(const Ambient& other);

    const WeightedSpace& stage() const { return stage_; }
    const FieldDescriptor& field() const { return stage_.field(); }
    std::size_t dim() const { return stage_.dim(); }
    const CosetRegistry& registry() const { return registry_; }
    bool declared_dense() const { return declared_dense_; }
    std::size_t max_dim() const { return max_dim_; }

    /// Appends one coordinate of the given weight; returns its index.
    std::size_t allocate(const Magnitude& weight);
    struct Slot {
        std::size_t index;
        Magnitude weight;   ///< s_g
        Scalar scale;       ///< lambda with s_g |lambda| = the requested norm
    };
    /// Appends a coordinate in I_g for g the coset of `norm`, weighted s_g, and the
    /// scalar lambda making ||lambda e_index|| equal to `norm`.
    Slot allocate_for_norm(const Magnitude& norm);

private:
    WeightedSpace stage_;
    CosetRegistry registry_;
    bool declared_dense_ = false;
    std::size_t max_dim_ = 4096;
    std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

// ---------------------------------------------------------------------------
// Value sets

struct Gap {
    Magnitude lo;   ///< open interval (lo, hi) containing no norm value
    Magnitude hi;
};

struct DensityResult {
    bool dense = false;
    std::optional<Gap> gap;
    std::string reason;
};

/// Whether the norm values  U_i w_i |K*|  are dense in (0, inf).
DensityResult value_set_dense(const WeightedSpace& E);
DensityResult value_set_dense(const Ambient& A);

/// Smallest norm value >= m (strictly greater when `strict`).
Magnitude value_point_above(const WeightedSpace& E, const Magnitude& m, bool strict);
/// Largest norm value <= m (strictly smaller when `strict`).
Magnitude value_point_below(const WeightedSpace& E, const Magnitude& m, bool strict);
bool in_value_set(const WeightedSpace& E, const Magnitude& m);

// ---------------------------------------------------------------------------
// epsilon-isometries

class NotDenselyValued : public HypothesisViolation {
public:
    explicit NotDenselyValued(std::optional<Gap> gap)
        : HypothesisViolation("the norm values of the ambient are not dense"
                              " (use certify-gap for a nonexistence certificate)"),
          gap(std::move(gap)) {}
    std::optional<Gap> gap;
};

struct EpsIsometryReport {
    LinearMap f;                      ///< Y -> stage of A
    Rational epsilon;
    Magnitude t;
    std::vector<Vector> y_base;       ///< t-orthogonal base of Y, prefix i(x_k)
    std::vector<Vector> x_base;       ///< its images, prefix the base of X
    Magnitude y_level;                ///< t_defect of y_base
    Magnitude x_level;                ///< t_defect of x_base
    Magnitude min_ratio;              ///< min ||x_k|| / ||y_k||
    Magnitude max_ratio;
    Magnitude lower;                  ///< x_level * min_ratio <= ||f(y)|| / ||y||
    Magnitude upper;                  ///< ||f(y)|| / ||y|| <= max_ratio / y_level
    bool bounds_hold = false;         ///< 1 - eps <= lower and upper <= 1 + eps
    bool t_chain_holds = false;       ///< t^2 <= lower and upper <= t^-3
    bool strict_predicate = false;    ///< 1/(1+eps) < lower and upper < 1 + eps
    bool retraction_exact = false;    ///< f(i(x)) = x on the base of X
};

/// The deterministic t: first dyadic power of p in the open interval (cbrt(1/(1+eps)), 1).
Magnitude choose_t(const Rational& epsilon, Prime p);

/// An eps-isometry f: Y -> A with f(i(x)) = x, for i: X -> Y an isometric embedding
/// and X a subspace of the current stage of A. May allocate coordinates in A.
EpsIsometryReport epsilon_isometry(Ambient& A, const LinearMap& i, const Rational& epsilon);

/// Ratio check of ||f(y)|| against (1 -/+ eps) ||y||.
bool within_eps(const Magnitude& image_norm, const Magnitude& norm, const Rational& epsilon);

// ---------------------------------------------------------------------------
// Gap certificates

struct LadderCheck {
    Magnitude weight;
    Integer below;     ///< w p^below <= lo
    Integer above;     ///< hi <= w p^above, above = below + 1
};

struct GapCertificate {
    WeightedSpace space;
    Magnitude s1;
    Rational epsilon;
    Gap gap;
    Magnitude lower;                ///< (1 - eps) s1
    Magnitude upper;                ///< (1 + eps) s1
    bool refutes_constructive = false;  ///< [lower, upper] inside the gap: no f with (1-eps)||y|| <= ||f(y)|| <= (1+eps)||y||
    bool refutes_definitional = false;  ///< [s1/(1+eps), (1+eps)s1] inside the closed gap: no f with the strict two-sided bound
    std::vector<LadderCheck> ladders;
    WeightedSpace test_space;       ///< Y = (K^2, max(|a|, s1 |b|))
};

class NoGap : public Error {
public:
    NoGap(const std::string& what, Magnitude blocking) : Error(what), blocking(std::move(blocking)) {}
    Magnitude blocking;   ///< a norm value of E inside [lower, upper]
};

/// Certificate that no eps-isometry Y -> E exists; throws NoGap otherwise.
GapCertificate nonexistence_certificate(const WeightedSpace& E, const Magnitude& s1, const Rational& epsilon);

// ---------------------------------------------------------------------------
// Patching, splitting, perturbation

class OperatorNormNotBelowOne : public HypothesisViolation {
public:
    OperatorNormNotBelowOne(const Magnitude& norm, Vector witness)
        : HypothesisViolation("||j - f|_X|| = " + norm.to_string() + " is not below 1"), norm(norm),
          witness(std::move(witness)) {}
    Magnitude norm;
    Vector witness;   ///< base vector x of X with ||(j - f)(x)|| >= ||x||
};

struct PatchResult {
    LinearMap T;
    Magnitude t;                     ///< ||j - f|_X||
    std::vector<Vector> base;        ///< base of Y extending the base of X
    IsometryCertificate certificate;
    bool agrees_on_x = false;        ///< T|_X = j exactly
};

/// T: Y -> G isometric with T|_X = j, given isometries j: X -> G, f: Y -> G with ||j - f|_X|| < 1.
PatchResult patch_isometry(const LinearMap& j, const LinearMap& f);

struct SplitResult {
    std::vector<Vector> u;           ///< maximal orthogonal set of Y, first m_X in X
    std::size_t m_x = 0;
    Subspace f_y;                    ///< span of the remaining u
    OrthogonalityResult certificate; ///< F_Y orthogonal to X
};

SplitResult maximal_orthogonal_split(const Subspace& Y, const Subspace& X);

struct PerturbationVerdict {
    bool hypotheses_hold = false;
    std::optional<std::size_t> failed_index;   ///< 1-based position of the first ||x_i - z_i|| >= t ||x_i||
    std::string failure;
    Magnitude xs_level;
    bool norms_preserved = false;
    std::optional<OrthoCertificate> zs_certificate;
    bool certified = false;                    ///< both conclusions verified
};

PerturbationVerdict check_perturbation(const WeightedSpace& space, const std::vector<Vector>& xs,
                                       const std::vector<Vector>& zs, const Magnitude& t);

class NotImmediate : public HypothesisViolation {
public:
    explicit NotImmediate(Vector witness)
        : HypothesisViolation("the space is not an immediate extension of the subspace"), witness(std::move(witness)) {}
    Vector witness;   ///< nonzero vector orthogonal to the subspace
};

class Unsupported : public Error {
public:
    using Error::Error;
};

/// Extension of an isometry T: D -> F to E when E is an immediate extension of D.
LinearMap extend_isometry_immediate(const Subspace& E, const LinearMap& T);

// ---------------------------------------------------------------------------
// Universal space

struct EmbeddingResult {
    LinearMap map;                       ///< E -> stage of A
    std::vector<std::size_t> indices;    ///< l(n)
    std::vector<Scalar> scales;          ///< lambda_n
    IsometryCertificate certificate;
};

/// x_n -> lambda_n e_{l(n)} over an orthogonal base of E.
EmbeddingResult embed_into_Eu(const Subspace& E, Ambient& A);

enum class DispositionMode { Direct, ApproxThenPatch };

struct DispositionResult {
    LinearMap f;                         ///< Y -> stage of A
    SplitResult split;
    std::vector<std::size_t> allocated;
    IsometryCertificate certificate;
    bool retraction_exact = false;       ///< f(j(x)) = x on the base of X
    // approx-then-patch only
    std::optional<LinearMap> approximation;
    std::optional<Magnitude> approximation_distance;   ///< ||f - j^-1|| on j(X), must be < 1
    bool patched = false;
};

/// f: Y -> A isometric with f(j(x)) = x, for j: X -> Y isometric and X in the stage of A.
DispositionResult disposition_extend(Ambient& A, const LinearMap& j, DispositionMode mode = DispositionMode::Direct);

// ---------------------------------------------------------------------------
// Classification

struct Fingerprint {
    std::size_t dim = 0;
    std::vector<Coset> cosets;   ///< sorted

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

Fingerprint classify(const Subspace& E);

struct IsometricEqResult {
    bool isometric = false;
    Fingerprint left, right;
    std::optional<LinearMap> witness;            ///< E -> ambient of F
    std::optional<IsometryCertificate> certificate;
    std::optional<Coset> obstruction;            ///< coset with differing multiplicity
    bool value_set_obstruction = false;          ///< the coset occurs in one space only
    bool dimension_mismatch = false;
};

IsometricEqResult isometric_eq(const Subspace& E, const Subspace& F);

// ---------------------------------------------------------------------------
// Shrinking balls

struct Ball {
    Vector center;
    Magnitude radius;
};

struct ShrinkingBallsResult {
    Ambient ambient;
    std::vector<Magnitude> stream;      ///< m_1, ..., m_{N+1}
    std::vector<Ball> balls;            ///< B_n = B(x_n, m_{n+1}), centers in the final stage
    std::vector<std::string> log;
    std::size_t nesting_checks = 0;
    bool all_passed = false;
};

/// m_n = p^(-n / (2(n+1))).
std::vector<Magnitude> default_ball_stream(std::size_t count, Prime p = 2);

ShrinkingBallsResult shrinking_balls(std::size_t N, std::optional<std::vector<Magnitude>> stream = std::nullopt);

} // namespace nagur
