#pragma once

/*
 * Independent oracles, seeded instance generators and the property-suite runner.
 *
 * Every case draws from its own stream, seeded by SplitMix64 from (master seed,
 * case index), so a report depends only on (suite, seed, cases) and never on the
 * thread schedule. All draws go through `uniform` below rather than the standard
 * distributions, whose output is implementation-defined; generated instances are
 * therefore identical across standard libraries.
 */

#include "nagur/gurarii.hpp"
#include "nagur/serialize.hpp"
#include "nagur/space.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace nagur {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Seeds

std::uint64_t splitmix64(std::uint64_t x);

struct InstanceSeed {
    std::uint64_t master = 0;
    std::uint64_t index = 0;

    std::uint64_t derived() const;
    Rng engine() const { return Rng(derived()); }
};

/// Uniform integer in [lo, hi].
long uniform(Rng& rng, long lo, long hi);
bool coin(Rng& rng, long num = 1, long den = 2);

// ---------------------------------------------------------------------------
// Brute-force distance oracle

class CapsExceeded : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct OracleConfig {
    int window = 4;                    ///< M: coefficient valuations k in [-M, M]
    int digit_depth = 0;               ///< D: units are +-a with 0 < a < p^D; 0 picks the least D with p^D >= 8
    std::size_t max_ambient = 3;
    std::size_t max_subspace = 2;

    /// Throws InvalidArgument on negative or zero bounds.
    void validate() const;
    int depth_for(Prime p) const;
};

struct OracleResult {
    Magnitude distance;                 ///< the grid minimum, an upper bound for dist(v, D)
    std::vector<Scalar> coefficients;   ///< minimizing grid point, over the spanning vectors as given
    std::size_t grid_points = 0;        ///< per coefficient
    Magnitude resolution;               ///< p^-D ||v||
    /// The grid minimum equals dist(v, D): it is zero, or it exceeds the resolution and
    /// the window holds every valuation an optimal coefficient can take. Assumes the
    /// spanning vectors are orthogonal.
    bool resolved = false;
    std::string grid_bound;
};

/// min ||v - sum l_i d_i|| over the grid {0} U {a p^k : 0 < |a| < p^D, p prime to a, |k| <= M},
/// d_i the spanning vectors of D as given. p-adic backend only.
///
/// With orthogonal d_i an optimal l_i has |l_i| ||d_i|| <= ||v||, and truncating its unit
/// part to D digits moves the residual by at most p^-D ||v||; so a grid minimum above
/// that is exact.
OracleResult brute_force_distance(const Vector& v, const Subspace& D, const OracleConfig& cfg = {});

// ---------------------------------------------------------------------------
// Generators

struct GenParams {
    int exponent_range = 2;          ///< weight exponents of p in [-range, range]
    long entry_range = 4;            ///< numerators in [-range, range]
    bool fractional_weights = false; ///< p^(a/b) and foreign-prime cosets in weights
};

/// Nonzero p-adic unit a/b or Hahn constant.
Scalar gen_unit(Rng& rng, const FieldDescriptor& f);
/// u p^k (p-adic) or c t^q (Hahn), k or q in [-range, range].
Scalar gen_monomial(Rng& rng, const FieldDescriptor& f, int range);
WeightedSpace gen_space(Rng& rng, const FieldDescriptor& f, std::size_t dim, const GenParams& params = {});
/// Entries drawn as small rationals (p-adic) or monomials (Hahn); `zero_percent` of them zero.
Vector gen_vector(Rng& rng, const WeightedSpace& space, const GenParams& params = {}, int zero_percent = 30);
Subspace gen_subspace(Rng& rng, const WeightedSpace& space, std::size_t k, const GenParams& params = {});
/// Random element of D.
Vector gen_member(Rng& rng, const Subspace& D, int range = 2);

/// Vectors v_k = c_k e_{pi_k} + (strictly smaller monomials off the pivots): an
/// orthogonal triangular set whose pivots are monomials, so Hahn arithmetic on it
/// stays exact.
std::vector<Vector> gen_monomial_frame(Rng& rng, const WeightedSpace& space, std::size_t k);

struct GeneratedIsometry {
    LinearMap map;                       ///< whole space -> itself
    std::vector<std::string> steps;
    std::size_t rejected_shears = 0;
    IsometryCertificate certificate;
};

/// A composition of permutations among equal-weight coordinates, unit scalings and
/// shears e_k -> e_k + mu e_j with |mu| w_j <= w_k. Shears violating the bound are
/// rejected and redrawn. Throws Error if the product fails certify_isometry.
GeneratedIsometry gen_isometry(Rng& rng, const WeightedSpace& space, std::size_t steps = 4, bool allow_shears = true);

// ---------------------------------------------------------------------------
// Gap certificate re-check and adversary

struct GapRecheck {
    bool ok = false;
    std::string reason;
};

/// Recomputes every ladder w p^k around the gap by repeated multiplication by p.
GapRecheck recheck_gap_certificate(const GapCertificate& cert);

struct AdversaryResult {
    std::size_t candidates = 0;
    std::size_t refuted = 0;
    std::size_t refuted_by_value_set = 0;   ///< ||f(0,1)|| is a norm value of E or zero
};

/// Random linear maps Y -> E, some aimed at the gap endpoints; each is tested against
/// (1-eps)||y|| <= ||f(y)|| <= (1+eps)||y|| at y = (0,1).
AdversaryResult run_adversary(const GapCertificate& cert, Rng& rng, std::size_t candidates);

// ---------------------------------------------------------------------------
// Disposition chains

struct ChainStep {
    LinearMap j;
    DispositionResult result;
    DispositionMode mode = DispositionMode::Direct;
};

struct ChainReport {
    std::vector<ChainStep> steps;
    WeightedSpace final_stage;
    bool all_certified = false;
    bool all_retractions = false;
    bool approximations_below_one = false;
    bool coherent = false;   ///< every earlier f stays isometric into the final stage
    std::string failure;
};

/// `requests` disposition_extend calls on the universal ambient over f, starting from
/// a 1-dimensional stage; every `approx_every`-th request uses approx-then-patch.
ChainReport run_disposition_chain(const FieldDescriptor& f, std::uint64_t seed, std::size_t requests,
                                  std::size_t approx_every = 3);

// ---------------------------------------------------------------------------
// Suites

class UnknownSuite : public InvalidArgument {
public:
    explicit UnknownSuite(const std::string& name) : InvalidArgument("unknown suite: " + name) {}
};

struct CaseVerdict {
    std::size_t index = 0;
    bool pass = false;
    std::string detail;
    Json instance;
    Json certificate;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::size_t cases = 0;
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::vector<CaseVerdict> verdicts;
    std::vector<SuiteReport> children;   ///< for "all"
    double wall_seconds = 0;
};

const std::vector<std::string>& suite_names();

/// threads = 0 uses the hardware concurrency.
SuiteReport run_suite(const std::string& name, std::uint64_t seed, std::size_t cases, unsigned threads = 0);

Json to_json(const SuiteReport& r, bool timing = true);

} // namespace nagur
