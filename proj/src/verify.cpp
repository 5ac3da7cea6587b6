#include "nagur/verify.hpp"

#include "nagur/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <numeric>
#include <thread>

namespace nagur {

namespace {

Magnitude mag(const Rational& q) { return Magnitude::from_rational(q); }
bool lt(const Magnitude& a, const Magnitude& b) { return compare(a, b) < 0; }
bool le(const Magnitude& a, const Magnitude& b) { return compare(a, b) <= 0; }

Magnitude p_power(Prime p, const Rational& e) { return Magnitude::prime_power(p, e); }

const Prime kForeignPrimes[] = {3, 5, 7, 11};

} // namespace

// ---------------------------------------------------------------------------
// Seeds

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t InstanceSeed::derived() const { return splitmix64(splitmix64(master) ^ splitmix64(index + 1)); }

long uniform(Rng& rng, long lo, long hi) {
    if (hi < lo) throw InvalidArgument("empty range");
    auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long>(rng() % span);
}

bool coin(Rng& rng, long num, long den) { return uniform(rng, 0, den - 1) < num; }

// ---------------------------------------------------------------------------
// Oracle

void OracleConfig::validate() const {
    if (window < 1 || digit_depth < 0 || max_ambient < 1 || max_subspace < 1)
        throw InvalidArgument("oracle bounds must be positive");
}

int OracleConfig::depth_for(Prime p) const {
    if (digit_depth > 0) return digit_depth;
    int d = 1;
    for (Prime q = p; q < 8; q *= p) ++d;
    return d;
}

OracleResult brute_force_distance(const Vector& v, const Subspace& D, const OracleConfig& cfg) {
    cfg.validate();
    const WeightedSpace& E = D.ambient();
    const FieldDescriptor& f = E.field();
    if (f.backend != Backend::PadicRational) throw InvalidArgument("the oracle runs on the p-adic backend only");
    if (E.dim() > cfg.max_ambient) throw CapsExceeded("ambient dimension above the oracle cap");
    const auto& ds = D.span();
    if (ds.size() > cfg.max_subspace) throw CapsExceeded("subspace spanned by more vectors than the oracle cap");
    E.check(v);
    const Prime p = f.prime;
    const int depth = cfg.depth_for(p);
    const Integer pz(static_cast<unsigned long>(p));
    Integer pd = 1;
    for (int i = 0; i < depth; ++i) pd *= pz;

    std::vector<Rational> units;
    for (Integer a = 1; a < pd; ++a) {
        if (a % pz == 0) continue;
        units.push_back(Rational(a));
        units.push_back(Rational(-a));
    }
    std::vector<Rational> grid{Rational(0)};
    for (int k = -cfg.window; k <= cfg.window; ++k) {
        Rational pk = 1;
        for (int i = 0; i < std::abs(k); ++i) pk *= pz;
        if (k < 0) pk = 1 / pk;
        for (const auto& u : units) grid.push_back(u * pk);
    }

    OracleResult out;
    out.grid_points = grid.size();
    out.grid_bound = "coefficients in {0} U {a p^k : 0 < |a| < p^" + std::to_string(depth) + ", |k| <= " +
                     std::to_string(cfg.window) + "}; exact for orthogonal spanning vectors when the minimum is 0 or"
                     " exceeds p^-" + std::to_string(depth) + " ||v||";
    const Magnitude nv = E.norm(v);
    out.resolution = nv * p_power(p, -depth);
    out.distance = nv;
    out.coefficients.assign(ds.size(), Scalar(Rational(0)));

    const std::size_t n = ds.size();
    std::vector<std::size_t> at(n, 0);
    std::vector<Rational> raw(v.size());
    while (true) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            raw[i] = v[i].rational();
            for (std::size_t k = 0; k < n; ++k)
                if (at[k]) raw[i] -= grid[at[k]] * ds[k][i].rational();
        }
        Vector r;
        r.reserve(raw.size());
        for (const auto& x : raw) r.emplace_back(x);
        Magnitude nr = E.norm(r);
        if (lt(nr, out.distance)) {
            out.distance = nr;
            for (std::size_t k = 0; k < n; ++k) out.coefficients[k] = Scalar(grid[at[k]]);
            if (nr.is_zero()) break;
        }
        std::size_t k = 0;
        while (k < n && ++at[k] == grid.size()) at[k++] = 0;
        if (k == n) break;
    }

    // |l_i| = p^-k with p^-k ||d_i|| in (p^-D ||v||, ||v||] needs k in [k0, k0 + D - 1]
    bool window_ok = true;
    for (const auto& d : ds) {
        Magnitude nd = E.norm(d);
        if (nd.is_zero() || nv.is_zero()) continue;
        Integer k0 = -floor_log(nv / nd, p);
        window_ok = window_ok && k0 >= -cfg.window && k0 + depth - 1 <= cfg.window;
    }
    out.resolved = out.distance.is_zero() || (window_ok && lt(out.resolution, out.distance));
    return out;
}

// ---------------------------------------------------------------------------
// Generators

Scalar gen_unit(Rng& rng, const FieldDescriptor& f) {
    if (f.is_dense()) {
        long a = uniform(rng, 1, 5) * (coin(rng) ? 1 : -1);
        return Scalar::from_rational(make_rational(a, uniform(rng, 1, 3)), f);
    }
    const long p = static_cast<long>(f.prime);
    auto draw = [&] {
        long a;
        do a = uniform(rng, 1, std::max(4L, p - 1));
        while (a % p == 0);
        return a;
    };
    long a = draw(), b = draw();
    return Scalar(make_rational(coin(rng) ? a : -a, b));
}

Scalar gen_monomial(Rng& rng, const FieldDescriptor& f, int range) {
    if (f.is_dense()) {
        long d = uniform(rng, 1, 4);
        Rational e = make_rational(uniform(rng, -range * d, range * d), d);
        long c = uniform(rng, 1, 5) * (coin(rng) ? 1 : -1);
        return Scalar(HahnSeries::monomial(make_rational(c, uniform(rng, 1, 3)), e));
    }
    Scalar u = gen_unit(rng, f);
    long k = uniform(rng, -range, range);
    return u * scalar_with_abs(p_power(f.prime, k), f);
}

WeightedSpace gen_space(Rng& rng, const FieldDescriptor& f, std::size_t dim, const GenParams& params) {
    std::vector<Magnitude> ws;
    const int r = params.exponent_range;
    for (std::size_t i = 0; i < dim; ++i) {
        Magnitude w = p_power(f.prime, uniform(rng, -r, r));
        if (params.fractional_weights || f.is_dense()) {
            switch (uniform(rng, 0, 3)) {
            case 0: break;
            case 1: {
                long d = uniform(rng, 2, 3);
                w = p_power(f.prime, make_rational(uniform(rng, -r * d, r * d), d));
                break;
            }
            default:
                if (params.fractional_weights) {
                    Prime q = kForeignPrimes[uniform(rng, 0, 3)];
                    if (q == f.prime) q = 13;
                    w = w * p_power(q, make_rational(uniform(rng, 1, 2) * (coin(rng) ? 1 : -1), uniform(rng, 2, 3)));
                }
            }
        }
        ws.push_back(w);
    }
    return WeightedSpace(f, std::move(ws));
}

Vector gen_vector(Rng& rng, const WeightedSpace& space, const GenParams& params, int zero_percent) {
    const FieldDescriptor& f = space.field();
    Vector v;
    for (std::size_t i = 0; i < space.dim(); ++i) {
        if (uniform(rng, 0, 99) < zero_percent) {
            v.push_back(Scalar::zero(f));
        } else if (f.is_dense()) {
            v.push_back(gen_monomial(rng, f, 2));
        } else {
            long a;
            do a = uniform(rng, -params.entry_range, params.entry_range);
            while (a == 0);
            v.emplace_back(make_rational(a, uniform(rng, 1, 3)));
        }
    }
    return v;
}

Subspace gen_subspace(Rng& rng, const WeightedSpace& space, std::size_t k, const GenParams& params) {
    std::vector<Vector> vs;
    for (std::size_t i = 0; i < k; ++i) vs.push_back(gen_vector(rng, space, params));
    return Subspace(space, std::move(vs));
}

Vector gen_member(Rng& rng, const Subspace& D, int range) {
    const FieldDescriptor& f = D.field();
    std::vector<Scalar> cs;
    for (std::size_t k = 0; k < D.dim(); ++k) cs.push_back(coin(rng, 1, 4) ? Scalar::zero(f) : gen_monomial(rng, f, range));
    return linear_combination(cs, D.base(), D.ambient());
}

namespace {

// A scalar c with |c| < bound, |c| an integral power of p.
Scalar scalar_below(Rng& rng, const FieldDescriptor& f, const Magnitude& bound) {
    Integer k0 = floor_log(bound, f.prime);
    if (p_power(f.prime, Rational(k0)) == bound) k0 -= 1;
    k0 -= uniform(rng, 0, 1);
    return gen_unit(rng, f) * scalar_with_abs(p_power(f.prime, Rational(k0)), f);
}

std::vector<std::size_t> shuffled(Rng& rng, std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(i) - 1))]);
    return idx;
}

} // namespace

std::vector<Vector> gen_monomial_frame(Rng& rng, const WeightedSpace& space, std::size_t k) {
    const FieldDescriptor& f = space.field();
    if (k > space.dim()) throw InvalidArgument("frame larger than the space");
    auto order = shuffled(rng, space.dim());
    std::vector<std::size_t> pivots(order.begin(), order.begin() + static_cast<long>(k));
    std::vector<Vector> out;
    for (std::size_t m = 0; m < k; ++m) {
        Vector v = space.zero_vector();
        v[pivots[m]] = gen_monomial(rng, f, 2);
        Magnitude size = space.coordinate_size(v, pivots[m]);
        for (std::size_t j = 0; j < space.dim(); ++j) {
            if (std::find(pivots.begin(), pivots.end(), j) != pivots.end() || !coin(rng)) continue;
            v[j] = scalar_below(rng, f, size / space.weight(j));
        }
        out.push_back(std::move(v));
    }
    return out;
}

GeneratedIsometry gen_isometry(Rng& rng, const WeightedSpace& space, std::size_t steps, bool allow_shears) {
    const FieldDescriptor& f = space.field();
    const std::size_t n = space.dim();
    GeneratedIsometry g;
    std::vector<Vector> units, images;
    for (std::size_t i = 0; i < n; ++i) units.push_back(space.unit(i));
    images = units;
    if (n == 0) {
        g.map = LinearMap::from_images(space, units, space, images);
        g.certificate = certify_isometry(g.map);
        return g;
    }

    std::vector<std::pair<std::size_t, std::size_t>> equal;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (space.weight(i) == space.weight(j)) equal.emplace_back(i, j);

    for (std::size_t s = 0; s < steps; ++s) {
        long kind = uniform(rng, 0, allow_shears && n > 1 ? 2 : 1);
        if (kind == 0 && equal.empty()) kind = 1;
        if (kind == 0) {
            auto [i, j] = equal[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(equal.size()) - 1))];
            for (auto& v : images) std::swap(v[i], v[j]);
            g.steps.push_back("swap " + std::to_string(i) + " " + std::to_string(j));
        } else if (kind == 1) {
            auto i = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(n) - 1));
            Scalar u = gen_unit(rng, f);
            for (auto& v : images) v[i] = u * v[i];
            g.steps.push_back("scale " + std::to_string(i) + " by " + u.to_string());
        } else {
            auto k = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(n) - 1));
            auto j = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(n) - 2));
            if (j >= k) ++j;
            bool placed = false;
            for (int attempt = 0; attempt < 32 && !placed; ++attempt) {
                Scalar mu = gen_monomial(rng, f, 2);
                if (lt(space.weight(k), abs(mu, f) * space.weight(j))) {
                    ++g.rejected_shears;
                    continue;
                }
                for (auto& v : images) v[j] = v[j] + mu * v[k];
                g.steps.push_back("shear e" + std::to_string(k) + " += " + mu.to_string() + " e" + std::to_string(j));
                placed = true;
            }
        }
    }
    g.map = LinearMap::from_images(space, units, space, images);
    g.certificate = certify_isometry(g.map);
    if (!g.certificate.isometric) throw Error("generated map failed its isometry check: " + g.certificate.failed_condition);
    return g;
}

// ---------------------------------------------------------------------------
// Gap certificates

GapRecheck recheck_gap_certificate(const GapCertificate& cert) {
    const WeightedSpace& E = cert.space;
    const Prime p = E.field().prime;
    const Magnitude P = p_power(p, 1);
    auto fail = [](std::string why) { return GapRecheck{false, std::move(why)}; };

    if (E.field().is_dense()) return fail("dense value group");
    if (!(lt(cert.gap.lo, cert.s1) && lt(cert.s1, cert.gap.hi))) return fail("s1 outside the gap");
    if (cert.lower != mag(1 - cert.epsilon) * cert.s1 || cert.upper != mag(1 + cert.epsilon) * cert.s1)
        return fail("interval endpoints do not match (1 -+ eps) s1");
    if (!(lt(cert.gap.lo, cert.lower) && lt(cert.upper, cert.gap.hi))) return fail("interval not inside the gap");
    if (cert.ladders.size() != E.dim()) return fail("one ladder per weight expected");

    bool lo_attained = false, hi_attained = false;
    for (std::size_t i = 0; i < E.dim(); ++i) {
        const Magnitude& w = E.weight(i);
        Magnitude x = w;
        Integer k = 0;
        while (lt(cert.gap.lo, x)) {
            x = x / P;
            k -= 1;
        }
        while (le(x * P, cert.gap.lo)) {
            x = x * P;
            k += 1;
        }
        Magnitude next = x * P;
        if (lt(next, cert.gap.hi)) return fail("norm value " + next.to_string() + " inside the gap");
        lo_attained = lo_attained || x == cert.gap.lo;
        hi_attained = hi_attained || next == cert.gap.hi;
        const auto& l = cert.ladders[i];
        if (l.weight != w || l.below != k || l.above != k + 1) return fail("ladder of weight " + w.to_string() + " differs");
    }
    if (!lo_attained || !hi_attained) return fail("gap endpoints are not norm values");
    return {true, ""};
}

AdversaryResult run_adversary(const GapCertificate& cert, Rng& rng, std::size_t candidates) {
    const WeightedSpace& E = cert.space;
    const FieldDescriptor& f = E.field();
    const Prime p = f.prime;
    AdversaryResult r;
    for (std::size_t c = 0; c < candidates; ++c) {
        Vector b;
        switch (c % 4) {
        case 0: b = gen_vector(rng, E); break;
        case 1:
        case 2: {
            // aim at a gap endpoint through a weight's ladder
            const auto& l = cert.ladders[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(E.dim()) - 1))];
            std::size_t i = 0;
            while (E.weight(i) != l.weight) ++i;
            Integer k = c % 4 == 1 ? l.below : l.above;
            b = E.zero_vector();
            b[i] = gen_unit(rng, f) * scalar_with_abs(p_power(p, Rational(k)), f);
            if (coin(rng)) b = b + scalar_with_abs(p_power(p, Rational(k - 1)), f) * gen_vector(rng, E, {}, 50);
            break;
        }
        default: b = scalar_with_abs(p_power(p, uniform(rng, -3, 3)), f) * gen_vector(rng, E);
        }
        Magnitude nb = E.norm(b);
        bool holds = le(cert.lower, nb) && le(nb, cert.upper);
        ++r.candidates;
        if (!holds) ++r.refuted;
        if (nb.is_zero() || in_value_set(E, nb)) ++r.refuted_by_value_set;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Disposition requests

namespace {

// Sparse random vectors spanning a subspace of the stage, exact on the Hahn backend.
std::vector<Vector> gen_stage_vectors(Rng& rng, const WeightedSpace& stage, std::size_t k) {
    if (stage.field().is_dense()) return gen_monomial_frame(rng, stage, k);
    std::vector<Vector> out;
    for (std::size_t m = 0; m < k; ++m) {
        Vector v = stage.zero_vector();
        auto order = shuffled(rng, stage.dim());
        std::size_t support = std::min<std::size_t>(stage.dim(), static_cast<std::size_t>(uniform(rng, 1, 3)));
        for (std::size_t s = 0; s < support; ++s) v[order[s]] = gen_monomial(rng, stage.field(), 2);
        out.push_back(std::move(v));
    }
    return out;
}

// An isometric j: X -> Y with Y a fresh weighted space of mixed cosets.
LinearMap gen_request(Rng& rng, const Subspace& X) {
    const FieldDescriptor& f = X.field();
    const Prime p = f.prime;
    const WeightedSpace& S = X.ambient();
    std::size_t extra = static_cast<std::size_t>(uniform(rng, 0, 2));
    std::size_t ny = X.dim() + extra;
    auto order = shuffled(rng, ny);

    std::vector<Magnitude> ws(ny);
    std::vector<Scalar> mus(X.dim());
    for (std::size_t k = 0; k < X.dim(); ++k) {
        Rational a = f.is_dense() ? make_rational(uniform(rng, -4, 4), uniform(rng, 1, 2)) : Rational(uniform(rng, -2, 2));
        ws[order[k]] = S.norm(X.base()[k]) * p_power(p, a);
        mus[k] = gen_unit(rng, f) * scalar_with_abs(p_power(p, -a), f);
    }
    GenParams mixed;
    mixed.fractional_weights = true;
    WeightedSpace extra_ws = gen_space(rng, f, extra, mixed);
    for (std::size_t e = 0; e < extra; ++e) ws[order[X.dim() + e]] = extra_ws.weight(e);
    WeightedSpace Y(f, ws);

    std::vector<Vector> images;
    for (std::size_t k = 0; k < X.dim(); ++k) {
        Vector y = Y.zero_vector();
        y[order[k]] = mus[k];
        if (extra > 0 && coin(rng)) {
            std::size_t d = order[X.dim() + static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(extra) - 1))];
            y[d] = scalar_below(rng, f, S.norm(X.base()[k]) / Y.weight(d));
        }
        images.push_back(std::move(y));
    }
    return LinearMap::on_base(X, Y, std::move(images));
}

Subspace gen_stage_subspace(Rng& rng, const WeightedSpace& stage) {
    for (int attempt = 0; attempt < 16; ++attempt) {
        std::size_t k = static_cast<std::size_t>(uniform(rng, 1, static_cast<long>(std::min<std::size_t>(2, stage.dim()))));
        Subspace X(stage, gen_stage_vectors(rng, stage, k));
        if (X.dim() > 0) return X;
    }
    return Subspace(stage, {stage.unit(0)});
}

} // namespace

ChainReport run_disposition_chain(const FieldDescriptor& f, std::uint64_t seed, std::size_t requests,
                                  std::size_t approx_every) {
    Rng rng(splitmix64(seed));
    Ambient A = Ambient::universal(f, std::nullopt, 1);
    ChainReport rep;
    rep.all_certified = rep.all_retractions = rep.approximations_below_one = true;
    for (std::size_t s = 0; s < requests; ++s) {
        Subspace X = gen_stage_subspace(rng, A.stage());
        ChainStep step;
        step.j = gen_request(rng, X);
        step.mode = approx_every && s % approx_every == approx_every - 1 ? DispositionMode::ApproxThenPatch
                                                                         : DispositionMode::Direct;
        step.result = disposition_extend(A, step.j, step.mode);
        auto note = [&](const std::string& what) {
            if (rep.failure.empty()) rep.failure = "request " + std::to_string(s) + ": " + what;
        };
        if (!step.result.certificate.isometric) {
            rep.all_certified = false;
            note(step.result.certificate.failed_condition);
        }
        if (!step.result.retraction_exact) {
            rep.all_retractions = false;
            note("retraction is not exact");
        }
        if (step.mode == DispositionMode::ApproxThenPatch &&
            !(step.result.approximation_distance && lt(*step.result.approximation_distance, Magnitude::one()))) {
            rep.approximations_below_one = false;
            note("approximation not within distance 1");
        }
        rep.steps.push_back(std::move(step));
    }
    rep.final_stage = A.stage();
    rep.coherent = true;
    for (std::size_t s = 0; s < rep.steps.size(); ++s) {
        auto c = certify_isometry(rep.steps[s].result.f.with_codomain(rep.final_stage));
        if (!c.isometric) {
            rep.coherent = false;
            if (rep.failure.empty()) rep.failure = "request " + std::to_string(s) + " lost isometry in the final stage";
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Suites

namespace {

struct CaseContext {
    Rng rng;
    std::size_t index = 0;
    Json instance = Json::object();
    Json certificate = nullptr;
    std::string detail;

    bool fail(std::string why) {
        detail = std::move(why);
        return false;
    }
};

using CaseFn = std::function<bool(CaseContext&)>;

FieldDescriptor pick_padic(Rng& rng) {
    static const Prime ps[] = {2, 3, 5};
    return FieldDescriptor::padic(ps[uniform(rng, 0, 2)]);
}

FieldDescriptor pick_field(Rng& rng) {
    switch (uniform(rng, 0, 3)) {
    case 0: return FieldDescriptor::padic(2);
    case 1: return FieldDescriptor::padic(3);
    case 2: return FieldDescriptor::padic(5);
    default: return FieldDescriptor::hahn(2);
    }
}

Rational pick_epsilon(Rng& rng) {
    static const Rational es[] = {Rational(1, 2), Rational(1, 4), Rational(1, 10)};
    return es[uniform(rng, 0, 2)];
}

std::size_t dim_in(Rng& rng, std::size_t lo, std::size_t hi) {
    return static_cast<std::size_t>(uniform(rng, static_cast<long>(lo), static_cast<long>(hi)));
}

// Largest eps = 2^-k with lo < (1 - eps) s and (1 + eps) s < hi.
std::optional<Rational> fitting_epsilon(const Gap& g, const Magnitude& s) {
    for (int k = 1; k <= 24; ++k) {
        Rational e(1, 1UL << k);
        if (lt(g.lo, mag(1 - e) * s) && lt(mag(1 + e) * s, g.hi)) return e;
    }
    return std::nullopt;
}

bool case_orth(CaseContext& c) {
    auto f = pick_padic(c.rng);
    GenParams gp;
    gp.fractional_weights = coin(c.rng);
    WeightedSpace E = gen_space(c.rng, f, dim_in(c.rng, 1, 6), gp);
    std::vector<Vector> vs;
    for (std::size_t k = dim_in(c.rng, 1, E.dim() + 1); k > 0; --k) vs.push_back(gen_vector(c.rng, E, gp));
    c.instance = {{"space", to_json(E)}, {"vectors", to_json(vs)}};
    auto o = orthogonalize(E, vs);
    c.certificate = to_json(o);
    if (o.base.size() + o.dependent.size() != vs.size()) return c.fail("inputs not accounted for");
    for (std::size_t k = 0; k < o.base.size(); ++k)
        if (linear_combination(o.combos[k], vs, E) != o.base[k]) return c.fail("base vector is not its stated combination");
    for (std::size_t d = 0; d < o.dependent.size(); ++d)
        if (linear_combination(o.dependencies[d], vs, E) != vs[o.dependent[d]]) return c.fail("wrong dependency");
    if (!o.base.empty()) {
        auto t = t_defect(E, o.base);
        if (!t.orthogonal()) return c.fail("t_defect of the base is " + t.level.to_string());
    }
    return true;
}

bool case_oracle(CaseContext& c) {
    auto f = pick_padic(c.rng);
    GenParams gp;
    gp.exponent_range = 1;
    OracleConfig cfg;
    const Integer pz(static_cast<unsigned long>(f.prime));
    Integer pd = 1;
    for (int i = 0; i < cfg.depth_for(f.prime); ++i) pd *= pz;

    // An orthogonal spanning set, as the oracle's soundness argument requires, and
    // v = (grid combination of it) + residual, with no residual when D = E. Draws the
    // oracle cannot resolve are redrawn; the decision uses the oracle alone.
    WeightedSpace E;
    std::vector<Vector> ds;
    Vector v;
    OracleResult oracle;
    for (int attempt = 0; attempt < 8; ++attempt) {
        E = gen_space(c.rng, f, dim_in(c.rng, 1, 3), gp);
        ds = gen_monomial_frame(c.rng, E, dim_in(c.rng, 1, std::min<std::size_t>(2, E.dim())));
        v = E.zero_vector();
        for (const auto& d : ds) {
            if (coin(c.rng, 1, 3)) continue;
            long a;
            do a = uniform(c.rng, 1, pd.get_si() - 1);
            while (a % static_cast<long>(f.prime) == 0);
            v = v + (Scalar(Rational(coin(c.rng) ? a : -a)) * scalar_with_abs(p_power(f.prime, uniform(c.rng, -1, 1)), f)) * d;
        }
        if (ds.size() < E.dim() && !coin(c.rng, 1, 8)) v = v + gen_vector(c.rng, E, gp, 20);
        oracle = brute_force_distance(v, Subspace(E, ds), cfg);
        if (oracle.resolved) break;
    }
    Subspace D(E, ds);
    c.instance = {{"space", to_json(E)}, {"span", to_json(ds)}, {"v", to_json(v)}};
    auto ours = distance(v, D);
    c.certificate = {{"distance", to_json(ours)},
                     {"oracle", to_json(oracle.distance)},
                     {"oracle_coefficients", to_json(oracle.coefficients)},
                     {"resolved", oracle.resolved},
                     {"grid_bound", oracle.grid_bound}};
    if (E.norm(v - ours.witness) != ours.distance || !D.contains(ours.witness)) return c.fail("witness does not attain");
    if (!oracle.resolved) return c.fail("instance outside the oracle's resolution");
    if (ours.distance != oracle.distance)
        return c.fail("distance " + ours.distance.to_string() + " but oracle " + oracle.distance.to_string());
    return true;
}

bool case_lem1(CaseContext& c) {
    auto f = pick_field(c.rng);
    WeightedSpace E = gen_space(c.rng, f, dim_in(c.rng, 2, 5));
    std::vector<Vector> fs;
    Magnitude t;
    if (f.is_dense()) {
        fs = gen_monomial_frame(c.rng, E, dim_in(c.rng, 1, std::min<std::size_t>(2, E.dim() - 1)));
        t = p_power(f.prime, make_rational(-uniform(c.rng, 0, 4), uniform(c.rng, 1, 4)));
    } else {
        for (int attempt = 0; attempt < 32; ++attempt) {
            fs.clear();
            for (std::size_t k = dim_in(c.rng, 1, E.dim() - 1); k > 0; --k) fs.push_back(gen_vector(c.rng, E));
            if (std::any_of(fs.begin(), fs.end(), [](const Vector& v) { return is_zero(v); })) continue;
            auto level = t_defect(E, fs).level;
            if (level.is_zero()) continue;
            t = level * level;
            if (coin(c.rng)) t = t * p_power(f.prime, -1);
            break;
        }
        if (fs.empty() || t.is_zero()) return c.fail("no independent draw");
    }
    Subspace target = Subspace::whole(E);
    if (!f.is_dense() && coin(c.rng)) {
        auto span = fs;
        span.push_back(gen_vector(c.rng, E));
        target = Subspace(E, span);
    }
    c.instance = {{"space", to_json(E)}, {"f_base", to_json(fs)}, {"t", to_json(t)}, {"target", to_json(target)}};
    auto ext = extend_base(fs, target, t);
    c.certificate = to_json(ext);
    if (!std::equal(fs.begin(), fs.end(), ext.vectors.begin())) return c.fail("input is not a prefix");
    if (ext.vectors.size() != target.dim()) return c.fail("wrong number of vectors");
    for (const auto& v : ext.vectors)
        if (!target.contains(v)) return c.fail("vector outside the target");
    if (Subspace(E, ext.vectors).dim() != target.dim()) return c.fail("does not span");
    auto level = t_defect(E, ext.vectors).level;
    if (lt(level, t)) return c.fail("level " + level.to_string() + " below t");
    return true;
}

bool case_lort(CaseContext& c) {
    auto f = pick_field(c.rng);
    WeightedSpace E = gen_space(c.rng, f, dim_in(c.rng, 1, 5));
    std::vector<Vector> xs;
    Magnitude t;
    std::vector<std::size_t> pivots;
    if (f.is_dense()) {
        xs = gen_monomial_frame(c.rng, E, dim_in(c.rng, 1, E.dim()));
        pivots = orthogonalize(E, xs).pivots;
        t = p_power(f.prime, make_rational(-uniform(c.rng, 0, 4), uniform(c.rng, 1, 4)));
    } else {
        for (int attempt = 0; attempt < 32; ++attempt) {
            xs.clear();
            for (std::size_t k = dim_in(c.rng, 1, E.dim()); k > 0; --k) xs.push_back(gen_vector(c.rng, E));
            if (std::any_of(xs.begin(), xs.end(), [](const Vector& v) { return is_zero(v); })) continue;
            t = t_defect(E, xs).level;
            if (!t.is_zero()) break;
        }
        if (t.is_zero()) return c.fail("no independent draw");
    }
    std::vector<Vector> zs;
    for (const auto& x : xs) {
        Vector d = E.zero_vector();
        if (!coin(c.rng, 1, 4)) {
            Magnitude bound = t * E.norm(x);
            if (f.is_dense()) {
                std::vector<std::size_t> free;
                for (std::size_t j = 0; j < E.dim(); ++j)
                    if (std::find(pivots.begin(), pivots.end(), j) == pivots.end()) free.push_back(j);
                if (!free.empty()) {
                    std::size_t j = free[static_cast<std::size_t>(uniform(c.rng, 0, static_cast<long>(free.size()) - 1))];
                    d[j] = scalar_below(c.rng, f, bound / E.weight(j));
                }
            } else {
                Vector r = gen_vector(c.rng, E);
                if (!is_zero(r)) d = scalar_below(c.rng, f, bound / E.norm(r)) * r;
            }
        }
        zs.push_back(x + d);
    }
    c.instance = {{"space", to_json(E)}, {"xs", to_json(xs)}, {"zs", to_json(zs)}, {"t", to_json(t)}};
    auto v = check_perturbation(E, xs, zs, t);
    c.certificate = to_json(v);
    if (!v.hypotheses_hold) return c.fail("hypotheses rejected: " + v.failure);
    if (!v.certified) return c.fail("conclusions not certified");
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (E.norm(xs[i]) != E.norm(zs[i])) return c.fail("norm changed");
    if (lt(t_defect(E, zs).level, t)) return c.fail("defect of zs below t");
    return true;
}

bool case_nowy(CaseContext& c) {
    static const FieldDescriptor fields[] = {FieldDescriptor::padic(2), FieldDescriptor::padic(3), FieldDescriptor::hahn(2)};
    auto f = fields[uniform(c.rng, 0, 2)];
    WeightedSpace E = gen_space(c.rng, f, dim_in(c.rng, 2, 5));
    Subspace Y = Subspace::whole(E);
    Subspace X;
    if (f.is_dense()) {
        X = Subspace(E, gen_monomial_frame(c.rng, E, dim_in(c.rng, 0, E.dim())));
    } else {
        if (coin(c.rng)) Y = gen_subspace(c.rng, E, dim_in(c.rng, 1, E.dim()));
        std::vector<Vector> xs;
        for (std::size_t k = dim_in(c.rng, 0, Y.dim()); k > 0; --k) xs.push_back(gen_member(c.rng, Y));
        X = Subspace(E, xs);
    }
    c.instance = {{"space", to_json(E)}, {"Y", to_json(Y)}, {"X", to_json(X)}};
    auto r = maximal_orthogonal_split(Y, X);
    c.certificate = to_json(r);
    if (r.u.size() != Y.dim() || r.m_x != X.dim()) return c.fail("wrong sizes");
    for (const auto& u : r.u)
        if (!Y.contains(u)) return c.fail("u outside Y");
    std::vector<Vector> head(r.u.begin(), r.u.begin() + static_cast<long>(r.m_x));
    Subspace H(E, head);
    if (H.dim() != X.dim() || !H.contains(X) || !X.contains(H)) return c.fail("first m_X vectors do not span X");
    if (!r.u.empty() && !t_defect(E, r.u).orthogonal()) return c.fail("u is not orthogonal");
    if (!r.certificate.orthogonal) return c.fail("F_Y not orthogonal to X");
    return true;
}

bool case_thaud_pos(CaseContext& c) {
    auto f = FieldDescriptor::hahn(coin(c.rng) ? 2 : 3);
    WeightedSpace stage = gen_space(c.rng, f, dim_in(c.rng, 1, 3));
    Ambient A(stage);
    Subspace X(stage, gen_monomial_frame(c.rng, stage, dim_in(c.rng, 1, std::min<std::size_t>(2, stage.dim()))));
    LinearMap i = gen_request(c.rng, X);
    if (i.codomain().dim() == X.dim()) {
        // make sure Y is a proper extension most of the time
        WeightedSpace Y = i.codomain().with_appended(gen_space(c.rng, f, 1).weight(0));
        std::vector<Vector> imgs;
        for (const auto& y : i.images()) imgs.push_back(pad(y, Y.dim(), f));
        i = LinearMap::on_base(X, Y, imgs);
    }
    Rational eps = pick_epsilon(c.rng);
    c.instance = {{"stage", to_json(stage)}, {"i", to_json(i)}, {"epsilon", to_string(eps)}};
    auto r = epsilon_isometry(A, i, eps);
    const WeightedSpace& Y = i.codomain();
    const WeightedSpace& S = A.stage();

    std::size_t samples = 0, strict_ok = 0;
    bool sound = true, retract = r.retraction_exact;
    for (int s = 0; s < 100 && retract; ++s) {
        Vector x = gen_member(c.rng, X);
        retract = r.f.apply(i.apply(x)) == pad(x, S.dim(), f);
    }
    Magnitude inv = mag(1 / (1 + eps)), hi = mag(1 + eps);
    std::vector<Vector> probes = r.y_base;
    while (probes.size() < r.y_base.size() + 500) probes.push_back(gen_vector(c.rng, Y, {}, 20));
    for (const auto& y : probes) {
        Magnitude ny = Y.norm(y);
        if (ny.is_zero()) continue;
        Magnitude nf = S.norm(r.f.apply(y));
        ++samples;
        sound = sound && within_eps(nf, ny, eps);
        Magnitude ratio = nf / ny;
        if (lt(inv, ratio) && lt(ratio, hi)) ++strict_ok;
    }
    c.certificate = to_json(r);
    c.certificate["samples"] = samples;
    c.certificate["strict_predicate_samples"] = strict_ok;
    if (!r.bounds_hold) return c.fail("stated bounds exceed 1 -+ eps");
    if (!retract) return c.fail("f(i(x)) != x");
    if (!sound) return c.fail("a sample violates the eps bound");
    return true;
}

bool check_gap_instance(CaseContext& c, const WeightedSpace& E, const Magnitude& s1, const Rational& eps,
                        std::size_t adversaries, std::optional<Gap> expected) {
    auto cert = nonexistence_certificate(E, s1, eps);
    auto recheck = recheck_gap_certificate(cert);
    auto adv = run_adversary(cert, c.rng, adversaries);
    c.certificate = to_json(cert);
    c.certificate["recheck"] = recheck.ok;
    c.certificate["adversary"] = {{"candidates", adv.candidates}, {"refuted", adv.refuted},
                                  {"refuted_by_value_set", adv.refuted_by_value_set}};
    if (!cert.refutes_constructive) return c.fail("certificate does not refute");
    if (!recheck.ok) return c.fail("re-check failed: " + recheck.reason);
    if (expected && (cert.gap.lo != expected->lo || cert.gap.hi != expected->hi)) return c.fail("unexpected gap");
    if (adv.refuted != adv.candidates || adv.refuted_by_value_set != adv.candidates)
        return c.fail("an adversary candidate was not refuted");
    return true;
}

bool case_thaud_neg(CaseContext& c) {
    auto f = pick_padic(c.rng);
    GenParams gp;
    gp.fractional_weights = coin(c.rng);
    WeightedSpace E = gen_space(c.rng, f, dim_in(c.rng, 1, 3), gp);
    long d = uniform(c.rng, 2, 5);
    Magnitude m = p_power(f.prime, make_rational(uniform(c.rng, -4 * d, 4 * d), d));
    Gap g{Magnitude::one(), Magnitude::one()};
    g.hi = value_point_above(E, m, true);
    g.lo = value_point_below(E, g.hi, true);
    Magnitude s1 = root(g.lo * g.hi, 2);
    auto eps = fitting_epsilon(g, s1);
    c.instance = {{"space", to_json(E)}, {"s", to_json(s1)}};
    if (!eps) return c.fail("gap too narrow for the epsilon ladder");
    c.instance["epsilon"] = to_string(*eps);
    return check_gap_instance(c, E, s1, *eps, 25, g);
}

bool case_tchar(CaseContext& c) {
    static const Prime ps[] = {2, 3, 5, 7};
    Prime p = c.index == 0 ? 2 : ps[uniform(c.rng, 0, 3)];
    std::size_t dim = c.index == 0 ? 1 : dim_in(c.rng, 1, 3);
    Magnitude s1 = c.index == 0 ? mag(Rational(3, 4)) : mag(make_rational(static_cast<long>(p) + 1, 2 * static_cast<long>(p)));
    Gap expected{p_power(p, -1), Magnitude::one()};
    auto eps = c.index == 0 ? std::optional<Rational>(Rational(1, 4)) : fitting_epsilon(expected, s1);
    WeightedSpace E = WeightedSpace::standard(FieldDescriptor::padic(p), dim);
    c.instance = {{"space", to_json(E)}, {"s", to_json(s1)}, {"epsilon", eps ? Json(to_string(*eps)) : Json(nullptr)}};
    if (!eps) return c.fail("no epsilon fits");
    if (!check_gap_instance(c, E, s1, *eps, 20, expected)) return false;
    if (c.index == 0 && (magnitude_from_json(c.certificate["lower"]) != mag(Rational(9, 16)) ||
                         magnitude_from_json(c.certificate["upper"]) != mag(Rational(15, 16))))
        return c.fail("interval is not [9/16, 15/16]");

    // the same request over the Hahn field succeeds
    auto h = FieldDescriptor::hahn(p);
    Ambient A(WeightedSpace::standard(h, 2));
    Subspace X(A.stage(), {A.stage().unit(0)});
    WeightedSpace Y(h, {Magnitude::one(), s1});
    auto i = LinearMap::on_base(X, Y, {Y.unit(0)});
    auto r = epsilon_isometry(A, i, *eps);
    c.certificate["dense_counterpart"] = to_json(r);
    if (!r.bounds_hold || !r.retraction_exact) return c.fail("Hahn counterpart failed");
    return true;
}

bool case_proiso(CaseContext& c) {
    if (c.index == 0) {
        auto Q2 = FieldDescriptor::padic(2);
        auto G = WeightedSpace::standard(Q2, 3);
        auto Ys = WeightedSpace::standard(Q2, 2);
        Subspace X(Ys, {Ys.unit(0)});
        auto q = [](long n) { return Scalar(Rational(n)); };
        auto j = LinearMap::on_base(X, G, {Vector{q(1), q(0), q(0)}});
        auto f = LinearMap::from_images(Ys, {Ys.unit(0), Ys.unit(1)}, G, {Vector{q(1), q(2), q(0)}, Vector{q(0), q(0), q(1)}});
        c.instance = {{"j", to_json(j)}, {"f", to_json(f)}};
        auto r = patch_isometry(j, f);
        c.certificate = to_json(r);
        if (r.t != p_power(2, -1)) return c.fail("worked example: t != 2^-1");
        if (r.T.apply(Ys.unit(0)) != Vector{q(1), q(0), q(0)} || r.T.apply(Ys.unit(1)) != Vector{q(0), q(0), q(1)})
            return c.fail("worked example: T differs");
        if (!r.certificate.isometric || !r.agrees_on_x) return c.fail("worked example not certified");
        return true;
    }
    static const FieldDescriptor fields[] = {FieldDescriptor::padic(2), FieldDescriptor::padic(3), FieldDescriptor::hahn(2)};
    auto fd = fields[uniform(c.rng, 0, 2)];
    WeightedSpace Ys = gen_space(c.rng, fd, dim_in(c.rng, 2, 4));
    WeightedSpace G = Ys;
    for (std::size_t e = dim_in(c.rng, 0, 2); e > 0; --e) G = G.with_appended(gen_space(c.rng, fd, 1).weight(0));
    auto g = gen_isometry(c.rng, G, 4, !fd.is_dense());
    std::vector<Vector> fimgs;
    for (std::size_t i = 0; i < Ys.dim(); ++i) fimgs.push_back(g.map.apply(G.unit(i)));
    std::vector<Vector> units;
    for (std::size_t i = 0; i < Ys.dim(); ++i) units.push_back(Ys.unit(i));
    auto f = LinearMap::from_images(Ys, units, G, fimgs);

    Subspace X;
    if (fd.is_dense()) {
        X = Subspace(Ys, gen_monomial_frame(c.rng, Ys, dim_in(c.rng, 1, Ys.dim() - 1)));
    } else {
        for (int attempt = 0; attempt < 16 && X.dim() == 0; ++attempt) {
            std::vector<Vector> xs;
            for (std::size_t k = dim_in(c.rng, 1, Ys.dim() - 1); k > 0; --k) xs.push_back(gen_vector(c.rng, Ys));
            X = Subspace(Ys, xs);
        }
        if (X.dim() == 0) return c.fail("no subspace drawn");
    }
    // coordinates of G not carrying a pivot of f(X); Hahn perturbations go there
    std::vector<std::size_t> quiet;
    if (fd.is_dense()) {
        Subspace fX(G, [&] {
            std::vector<Vector> v;
            for (const auto& x : X.base()) v.push_back(f.apply(x));
            return v;
        }());
        for (std::size_t i = 0; i < G.dim(); ++i)
            if (std::find(fX.pivots().begin(), fX.pivots().end(), i) == fX.pivots().end()) quiet.push_back(i);
    }
    std::vector<Vector> jimgs;
    for (const auto& x : X.base()) {
        Vector y = f.apply(x);
        Magnitude nx = Ys.norm(x);
        if (!coin(c.rng, 1, 4)) {
            if (fd.is_dense()) {
                if (!quiet.empty()) {
                    std::size_t d = quiet[static_cast<std::size_t>(uniform(c.rng, 0, static_cast<long>(quiet.size()) - 1))];
                    y[d] = y[d] + scalar_below(c.rng, fd, nx / G.weight(d));
                }
            } else {
                Vector r = gen_vector(c.rng, G);
                if (!is_zero(r)) y = y + scalar_below(c.rng, fd, nx / G.norm(r)) * r;
            }
        }
        jimgs.push_back(std::move(y));
    }
    auto j = LinearMap::on_base(X, G, jimgs);
    c.instance = {{"j", to_json(j)}, {"f", to_json(f)}, {"isometry_steps", g.steps}};
    auto r = patch_isometry(j, f);
    c.certificate = to_json(r);
    if (!lt(r.t, Magnitude::one())) return c.fail("||j - f|| not below 1");
    if (!r.certificate.isometric) return c.fail("T not isometric: " + r.certificate.failed_condition);
    if (!r.agrees_on_x) return c.fail("T|_X != j");
    for (int s = 0; s < 10; ++s) {
        Vector x = gen_member(c.rng, X);
        if (r.T.apply(x) != j.apply(x)) return c.fail("T|_X != j on a sample");
        Vector y = gen_vector(c.rng, Ys);
        if (G.norm(r.T.apply(y)) != Ys.norm(y)) return c.fail("T changes a norm");
    }
    return true;
}

bool case_puniv(CaseContext& c) {
    static const FieldDescriptor fields[] = {FieldDescriptor::padic(2), FieldDescriptor::padic(3), FieldDescriptor::hahn(2),
                                             FieldDescriptor::hahn(3)};
    auto f = fields[uniform(c.rng, 0, 3)];
    GenParams gp;
    gp.fractional_weights = true;
    WeightedSpace E = gen_space(c.rng, f, dim_in(c.rng, 1, 4), gp);
    Subspace D = Subspace::whole(E);
    if (coin(c.rng))
        D = f.is_dense() ? Subspace(E, gen_monomial_frame(c.rng, E, dim_in(c.rng, 1, E.dim())))
                         : gen_subspace(c.rng, E, dim_in(c.rng, 1, E.dim()), gp);
    c.instance = {{"space", to_json(E)}, {"D", to_json(D)}};
    Ambient A = Ambient::universal(f);
    auto r = embed_into_Eu(D, A);
    auto again = embed_into_Eu(D, A);
    c.certificate = to_json(r);
    c.certificate["registry"] = to_json(A.registry());
    if (!r.certificate.isometric || !again.certificate.isometric) return c.fail("embedding not isometric");
    if (r.indices.size() != D.dim()) return c.fail("one coordinate per base vector expected");
    const auto& reg = A.registry();
    for (const auto& [g, entry] : reg.entries()) {
        if (!(coset_of(entry.representative, reg.group()) == g)) return c.fail("representative outside its coset");
        if (!(lt(reg.r(), entry.representative) && le(entry.representative, Magnitude::one())))
            return c.fail("representative outside (r, 1]");
        for (auto idx : entry.indices)
            if (A.stage().weight(idx) != entry.representative) return c.fail("coordinate weight is not s_g");
    }
    for (std::size_t k = 0; k < r.indices.size(); ++k)
        if (A.stage().weight(r.indices[k]) != A.stage().weight(again.indices[k])) return c.fail("representatives changed");
    return true;
}

bool case_propud(CaseContext& c) {
    auto f = c.index % 2 ? FieldDescriptor::hahn(2) : FieldDescriptor::padic(c.index % 4 ? 3 : 2);
    std::uint64_t seed = c.rng();
    auto rep = run_disposition_chain(f, seed, 4);
    c.instance = {{"field", to_json(f)}, {"chain_seed", seed}, {"requests", 4}};
    Json steps = Json::array();
    for (const auto& s : rep.steps) steps.push_back({{"j", to_json(s.j)}, {"result", to_json(s.result)}});
    c.certificate = {{"steps", steps}, {"final_stage", to_json(rep.final_stage)}, {"coherent", rep.coherent}};
    if (!(rep.all_certified && rep.all_retractions && rep.approximations_below_one && rep.coherent))
        return c.fail(rep.failure);
    return true;
}

bool case_ehapprox(CaseContext& c) {
    static const FieldDescriptor fields[] = {FieldDescriptor::padic(2), FieldDescriptor::padic(3), FieldDescriptor::hahn(2)};
    auto f = fields[uniform(c.rng, 0, 2)];
    GenParams gp;
    gp.fractional_weights = coin(c.rng);
    Ambient A(gen_space(c.rng, f, dim_in(c.rng, 1, 4), gp));
    Subspace X = gen_stage_subspace(c.rng, A.stage());
    LinearMap j = gen_request(c.rng, X);
    c.instance = {{"stage", to_json(A.stage())}, {"j", to_json(j)}};
    auto r = disposition_extend(A, j, DispositionMode::ApproxThenPatch);
    c.certificate = to_json(r);
    if (!r.approximation_distance || !lt(*r.approximation_distance, Magnitude::one()))
        return c.fail("approximation not within distance 1");
    if (!r.certificate.isometric) return c.fail("not isometric: " + r.certificate.failed_condition);
    if (!r.retraction_exact) return c.fail("retraction not exact");
    return true;
}

bool case_ehhballs(CaseContext& c) {
    std::size_t N = 2 + c.index % 49;
    Prime p = coin(c.rng, 1, 3) ? 3 : 2;
    auto stream = default_ball_stream(N + 1, p);
    c.instance = {{"N", N}, {"prime", p}};
    auto r = shrinking_balls(N, stream);
    c.certificate = to_json(r);
    if (!r.all_passed || r.nesting_checks != N - 1) return c.fail("nesting checks failed");
    Magnitude floor = p_power(p, Rational(-1, 2));
    for (std::size_t n = 0; n < r.balls.size(); ++n) {
        const auto& rad = r.balls[n].radius;
        if (!(lt(floor, rad) && le(rad, Magnitude::one()))) return c.fail("radius out of range");
        if (n > 0 && !lt(rad, r.balls[n - 1].radius)) return c.fail("radii not strictly decreasing");
    }
    return true;
}

bool case_izo(CaseContext& c) {
    std::size_t n = 2 + c.index % 5;
    auto Q2 = FieldDescriptor::padic(2);
    std::vector<Magnitude> ws(n, Magnitude::one());
    ws[dim_in(c.rng, 0, n - 1)] = p_power(2, Rational(1, 2));
    auto standard = Subspace::whole(WeightedSpace::standard(Q2, n));
    auto twisted = Subspace::whole(WeightedSpace(Q2, ws));
    auto neg = isometric_eq(standard, twisted);
    if (neg.isometric || !neg.obstruction || !neg.value_set_obstruction) return c.fail("2^(1/2) weight not detected");

    static const FieldDescriptor fields[] = {FieldDescriptor::padic(2), FieldDescriptor::padic(3), FieldDescriptor::hahn(2)};
    auto f = fields[uniform(c.rng, 0, 2)];
    GenParams gp;
    gp.fractional_weights = true;
    WeightedSpace E = gen_space(c.rng, f, n, gp);
    Subspace D = Subspace::whole(E);
    if (coin(c.rng))
        D = f.is_dense() ? Subspace(E, gen_monomial_frame(c.rng, E, dim_in(c.rng, 1, n)))
                         : gen_subspace(c.rng, E, dim_in(c.rng, 1, n), gp);

    // G: E's weights permuted and rescaled by value-group elements, plus spare coordinates
    std::size_t spare = dim_in(c.rng, 0, 2);
    auto sigma = shuffled(c.rng, n + spare);
    std::vector<Magnitude> gw(n + spare);
    std::vector<Scalar> lambdas(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational a = f.is_dense() ? make_rational(uniform(c.rng, -3, 3), uniform(c.rng, 1, 2)) : Rational(uniform(c.rng, -2, 2));
        gw[sigma[i]] = E.weight(i) * p_power(f.prime, a);
        lambdas[i] = gen_unit(c.rng, f) * scalar_with_abs(p_power(f.prime, -a), f);
    }
    WeightedSpace extra = gen_space(c.rng, f, spare, gp);
    for (std::size_t e = 0; e < spare; ++e) gw[sigma[n + e]] = extra.weight(e);
    WeightedSpace G(f, gw);
    auto g = gen_isometry(c.rng, G, 4, !f.is_dense());
    auto embed = [&](const Vector& x) {
        Vector y = G.zero_vector();
        for (std::size_t i = 0; i < n; ++i) y[sigma[i]] = lambdas[i] * x[i];
        return g.map.apply(y);
    };
    std::vector<Vector> fspan;
    for (const auto& b : D.base()) fspan.push_back(embed(b));
    Subspace F(G, fspan);
    c.instance = {{"E", to_json(E)}, {"D", to_json(D)}, {"G", to_json(G)}, {"F", to_json(F)}};
    auto eq = isometric_eq(D, F);
    c.certificate = to_json(eq);
    if (!(classify(D) == classify(F))) return c.fail("fingerprint not invariant");
    if (!eq.isometric || !eq.certificate || !eq.certificate->isometric) return c.fail("no certified witness");
    return true;
}

const std::vector<std::pair<std::string, CaseFn>>& suite_table() {
    static const std::vector<std::pair<std::string, CaseFn>> table = {
        {"orth", case_orth},           {"oracle", case_oracle},         {"lem1", case_lem1},
        {"l-ort", case_lort},          {"nowy", case_nowy},             {"th-aud-pos", case_thaud_pos},
        {"th-aud-neg", case_thaud_neg}, {"t-char", case_tchar},         {"pro-iso", case_proiso},
        {"p-univers", case_puniv},     {"prop-ud", case_propud},        {"eh-approx", case_ehapprox},
        {"ehh-balls", case_ehhballs},  {"izo-classify", case_izo},
    };
    return table;
}

std::uint64_t name_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) h = (h ^ ch) * 1099511628211ULL;
    return h;
}

} // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [n, fn] : suite_table()) v.push_back(n);
        v.push_back("all");
        return v;
    }();
    return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed, std::size_t cases, unsigned threads) {
    auto start = std::chrono::steady_clock::now();
    SuiteReport rep;
    rep.suite = name;
    rep.seed = seed;
    rep.cases = cases;
    if (name == "all") {
        for (const auto& [n, fn] : suite_table()) {
            rep.children.push_back(run_suite(n, seed, cases, threads));
            rep.passed += rep.children.back().passed;
            rep.failed += rep.children.back().failed;
        }
    } else {
        const auto& table = suite_table();
        auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == name; });
        if (it == table.end()) throw UnknownSuite(name);
        const CaseFn& fn = it->second;
        const std::uint64_t master = seed ^ name_hash(name);

        rep.verdicts.resize(cases);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < cases; i = next++) {
                CaseContext ctx;
                ctx.rng = InstanceSeed{master, i}.engine();
                ctx.index = i;
                bool pass = false;
                try {
                    pass = fn(ctx);
                } catch (const std::exception& e) {
                    ctx.detail = std::string("exception: ") + e.what();
                }
                rep.verdicts[i] = CaseVerdict{i, pass, ctx.detail, std::move(ctx.instance), std::move(ctx.certificate)};
            }
        };
        unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
        n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(cases, 1)));
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        for (const auto& v : rep.verdicts) (v.pass ? rep.passed : rep.failed) += 1;
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

Json to_json(const SuiteReport& r, bool timing) {
    Json j = {{"tool", kToolName}, {"version", kToolVersion}, {"suite", r.suite}, {"seed", r.seed},
              {"cases", r.cases}, {"passed", r.passed}, {"failed", r.failed}};
    if (r.children.empty()) {
        std::string verdicts;
        for (const auto& v : r.verdicts) verdicts += v.pass ? 'P' : 'F';
        j["verdicts"] = verdicts;
        Json failures = Json::array();
        for (const auto& v : r.verdicts)
            if (!v.pass)
                failures.push_back({{"index", v.index}, {"detail", v.detail}, {"instance", v.instance}, {"certificate", v.certificate}});
        j["failures"] = failures;
    } else {
        Json children = Json::array();
        for (const auto& c : r.children) children.push_back(to_json(c, timing));
        j["suites"] = children;
    }
    if (timing) j["wall_seconds"] = r.wall_seconds;
    return j;
}

} // namespace nagur
