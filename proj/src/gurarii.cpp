#include "nagur/gurarii.hpp"

#include <algorithm>

namespace nagur {

namespace {

Magnitude mag(const Rational& q) { return Magnitude::from_rational(q); }

bool lt(const Magnitude& a, const Magnitude& b) { return compare(a, b) < 0; }
bool le(const Magnitude& a, const Magnitude& b) { return compare(a, b) <= 0; }

Magnitude power(Prime p, const Integer& k) {
    return Magnitude::prime_power(p, Rational(k));
}

void require_epsilon(const Rational& epsilon) {
    if (sgn(epsilon) <= 0 || epsilon >= 1) throw InvalidArgument("epsilon must lie in (0, 1)");
}

std::vector<Vector> padded(const std::vector<Vector>& vs, std::size_t n, const FieldDescriptor& f) {
    std::vector<Vector> out;
    out.reserve(vs.size());
    for (const auto& v : vs) out.push_back(pad(v, n, f));
    return out;
}

// The subspace re-expressed in the current stage of A.
Subspace in_stage(const Subspace& X, const Ambient& A) {
    if (X.ambient() == A.stage()) return X;
    if (!X.ambient().is_prefix_of(A.stage())) throw InvalidArgument("subspace does not live in a stage of the ambient");
    return X.embedded_in(A.stage());
}

} // namespace

// ---------------------------------------------------------------------------
// CosetRegistry

CosetRegistry::CosetRegistry(ValueGroupDescriptor group, Magnitude r) : group_(group), r_(std::move(r)) {
    if (r_.is_zero() || !lt(r_, Magnitude::one())) throw InvalidArgument("r must lie in (0, 1)");
    if (!group_.is_dense() && lt(group_.uniformizer_magnitude(), r_))
        throw InvalidArgument("r must not exceed 1/p for a discrete value group");
}

Magnitude CosetRegistry::default_r(const ValueGroupDescriptor& group) {
    return group.is_dense() ? mag(Rational(3, 4)) : group.uniformizer_magnitude();
}

const CosetRegistry::Entry* CosetRegistry::find(const Coset& c) const {
    auto it = entries_.find(c);
    return it == entries_.end() ? nullptr : &it->second;
}

const Magnitude& CosetRegistry::representative_for(const Magnitude& m) {
    Coset c = coset_of(m, group_);
    auto it = entries_.find(c);
    if (it == entries_.end()) {
        Magnitude s = representative_in(c, r_, Magnitude::one(), group_);
        it = entries_.emplace(std::move(c), Entry{std::move(s), {}}).first;
    }
    return it->second.representative;
}

void CosetRegistry::record_index(const Coset& c, std::size_t index) {
    auto it = entries_.find(c);
    if (it == entries_.end()) throw InvalidArgument("coset not registered: " + c.to_string());
    it->second.indices.push_back(index);
}

// ---------------------------------------------------------------------------
// Ambient

Ambient::Ambient(WeightedSpace initial, std::optional<Magnitude> r, bool declared_dense, std::size_t max_dim)
    : stage_(std::move(initial)), declared_dense_(declared_dense), max_dim_(max_dim) {
    ValueGroupDescriptor g = stage_.field().value_group();
    registry_ = CosetRegistry(g, r ? *r : CosetRegistry::default_r(g));
    for (std::size_t i = 0; i < stage_.dim(); ++i) {
        const Magnitude& w = stage_.weight(i);
        if (registry_.representative_for(w) == w) registry_.record_index(coset_of(w, g), i);
    }
}

Ambient Ambient::universal(const FieldDescriptor& f, std::optional<Magnitude> r, std::size_t initial_dim) {
    return Ambient(WeightedSpace::standard(f, initial_dim), std::move(r), true);
}

Ambient::Ambient(const Ambient& other)
    : stage_(other.stage_), registry_(other.registry_), declared_dense_(other.declared_dense_),
      max_dim_(other.max_dim_) {}

Ambient& Ambient::operator=(const Ambient& other) {
    if (this != &other) {
        stage_ = other.stage_;
        registry_ = other.registry_;
        declared_dense_ = other.declared_dense_;
        max_dim_ = other.max_dim_;
    }
    return *this;
}

std::size_t Ambient::allocate(const Magnitude& weight) {
    std::lock_guard lock(*mutex_);
    if (stage_.dim() >= max_dim_) throw AllocatorExhausted("ambient is full (" + std::to_string(max_dim_) + " coordinates)");
    stage_ = stage_.with_appended(weight);
    return stage_.dim() - 1;
}

Ambient::Slot Ambient::allocate_for_norm(const Magnitude& norm) {
    if (norm.is_zero()) throw InvalidArgument("cannot allocate a coordinate for the zero norm");
    Magnitude s;
    {
        std::lock_guard lock(*mutex_);
        s = registry_.representative_for(norm);
    }
    std::size_t index = allocate(s);
    {
        std::lock_guard lock(*mutex_);
        registry_.record_index(coset_of(norm, registry_.group()), index);
    }
    Scalar lambda = scalar_with_abs(norm / s, stage_.field());
    return Slot{index, std::move(s), std::move(lambda)};
}

// ---------------------------------------------------------------------------
// Value sets

namespace {

void require_discrete(const WeightedSpace& E) {
    if (E.field().is_dense()) throw InvalidArgument("value-set ladders need a discretely valued field");
    if (E.dim() == 0) throw InvalidArgument("the zero space has no norm values");
}

} // namespace

Magnitude value_point_above(const WeightedSpace& E, const Magnitude& m, bool strict) {
    require_discrete(E);
    const Prime p = E.field().prime;
    std::optional<Magnitude> best;
    for (const auto& w : E.weights()) {
        Magnitude q = m / w;
        Integer k = floor_log(q, p);
        if (power(p, k) != q || strict) k += 1;
        Magnitude point = w * power(p, k);
        if (!best || lt(point, *best)) best = std::move(point);
    }
    return *best;
}

Magnitude value_point_below(const WeightedSpace& E, const Magnitude& m, bool strict) {
    require_discrete(E);
    const Prime p = E.field().prime;
    std::optional<Magnitude> best;
    for (const auto& w : E.weights()) {
        Magnitude q = m / w;
        Integer k = floor_log(q, p);
        if (strict && power(p, k) == q) k -= 1;
        Magnitude point = w * power(p, k);
        if (!best || lt(*best, point)) best = std::move(point);
    }
    return *best;
}

bool in_value_set(const WeightedSpace& E, const Magnitude& m) {
    if (m.is_zero()) return false;
    ValueGroupDescriptor g = E.field().value_group();
    return std::any_of(E.weights().begin(), E.weights().end(), [&](const Magnitude& w) { return g.contains(m / w); });
}

DensityResult value_set_dense(const WeightedSpace& E) {
    DensityResult r;
    if (E.dim() == 0) {
        r.reason = "zero-dimensional space: the only norm value is 0";
        return r;
    }
    if (E.field().is_dense()) {
        r.dense = true;
        r.reason = "value group p^Q is dense";
        return r;
    }
    Magnitude hi = value_point_above(E, Magnitude::one(), false);
    Magnitude lo = value_point_below(E, hi, true);
    r.gap = Gap{std::move(lo), std::move(hi)};
    r.reason = "finitely many weight cosets of the discrete group p^Z";
    return r;
}

DensityResult value_set_dense(const Ambient& A) {
    if (A.declared_dense()) return {true, std::nullopt, "registry ambient: every coset is available"};
    return value_set_dense(A.stage());
}

// ---------------------------------------------------------------------------
// epsilon-isometries

Magnitude choose_t(const Rational& epsilon, Prime p) {
    require_epsilon(epsilon);
    Magnitude lo = root(mag(1 / (1 + epsilon)), 3);
    auto t = search_in_interval(Magnitude::one(), lo, true, Magnitude::one(), true, {p, ValueGroupKind::Dense});
    if (!t) throw Error("internal: no dyadic magnitude below 1 above " + lo.to_string());
    return *t;
}

bool within_eps(const Magnitude& image_norm, const Magnitude& norm, const Rational& epsilon) {
    if (norm.is_zero()) return image_norm.is_zero();
    return le(mag(1 - epsilon) * norm, image_norm) && le(image_norm, mag(1 + epsilon) * norm);
}

namespace {

// A scalar lambda with ||lambda y|| = target when possible, else in (lo_factor*target, target].
std::optional<Scalar> scale_towards(const Magnitude& current, const Magnitude& target, const Magnitude& lo_factor,
                                    const FieldDescriptor& f) {
    Magnitude want = target / current;
    if (f.value_group().contains(want)) return scalar_with_abs(want, f);
    try {
        return scalar_with_abs_in(lo_factor * want, want, f);
    } catch (const EmptyIntersection&) {
        return std::nullopt;
    }
}

} // namespace

EpsIsometryReport epsilon_isometry(Ambient& A, const LinearMap& i_in, const Rational& epsilon) {
    require_epsilon(epsilon);
    const FieldDescriptor& f = A.field();
    if (i_in.codomain().field() != f) throw InvalidArgument("Y and the ambient use different fields");
    auto ic = certify_isometry(i_in);
    if (!ic.isometric) throw HypothesisViolation("i is not an isometry: " + ic.failed_condition);
    DensityResult density = value_set_dense(A);
    if (!density.dense) throw NotDenselyValued(density.gap);

    const Subspace X = in_stage(i_in.domain(), A);
    const WeightedSpace& Y = i_in.codomain();
    const Magnitude t = choose_t(epsilon, f.prime);

    std::vector<Vector> xs = X.base();
    std::vector<Vector> ys = i_in.images();
    const std::size_t m0 = xs.size();

    auto ext = extend_base(ys, Subspace::whole(Y), t);
    std::vector<Vector> free = complement_in(Subspace::whole(A.stage()), xs);
    std::size_t next_free = 0;

    for (std::size_t k = m0; k < ext.vectors.size(); ++k) {
        Vector y = ext.vectors[k];
        Magnitude ny = Y.norm(y);
        if (auto lambda = scale_towards(ny, Magnitude::one(), t, f)) {
            y = *lambda * y;
            ny = Y.norm(y);
        }
        std::optional<Vector> x;
        while (!x && next_free < free.size()) {
            const Vector& e = free[next_free++];
            Vector ep = pad(e, A.dim(), f);
            if (auto mu = scale_towards(A.stage().norm(ep), ny, t, f)) x = *mu * ep;
        }
        if (!x) {
            auto slot = A.allocate_for_norm(ny);
            x = slot.scale * A.stage().unit(slot.index);
        }
        ys.push_back(std::move(y));
        xs.push_back(std::move(*x));
    }
    xs = padded(xs, A.dim(), f);

    EpsIsometryReport r;
    r.epsilon = epsilon;
    r.t = t;
    r.f = LinearMap::from_images(Y, ys, A.stage(), xs);
    r.y_level = t_defect(Y, ys).level;
    r.x_level = t_defect(A.stage(), xs).level;
    r.min_ratio = Magnitude::one();
    r.max_ratio = Magnitude::one();
    for (std::size_t k = 0; k < ys.size(); ++k) {
        Magnitude ratio = A.stage().norm(xs[k]) / Y.norm(ys[k]);
        if (k == 0 || lt(ratio, r.min_ratio)) r.min_ratio = ratio;
        if (k == 0 || lt(r.max_ratio, ratio)) r.max_ratio = ratio;
    }
    if (ys.empty()) {
        r.lower = r.upper = Magnitude::one();
    } else {
        r.lower = r.x_level * r.min_ratio;
        r.upper = r.max_ratio / r.y_level;
    }
    r.bounds_hold = le(mag(1 - epsilon), r.lower) && le(r.upper, mag(1 + epsilon));
    r.t_chain_holds = le(t * t, r.lower) && le(r.upper, Magnitude::one() / (t * t * t));
    r.strict_predicate = lt(mag(1 / (1 + epsilon)), r.lower) && lt(r.upper, mag(1 + epsilon));
    r.retraction_exact = true;
    for (std::size_t k = 0; k < m0; ++k)
        r.retraction_exact = r.retraction_exact && r.f.apply(i_in.images()[k]) == xs[k];
    r.y_base = std::move(ys);
    r.x_base = std::move(xs);
    return r;
}

// ---------------------------------------------------------------------------
// Gap certificates

GapCertificate nonexistence_certificate(const WeightedSpace& E, const Magnitude& s1, const Rational& epsilon) {
    require_epsilon(epsilon);
    if (s1.is_zero()) throw InvalidArgument("s1 must be positive");
    if (E.dim() == 0) throw InvalidArgument("E must be nonzero");
    const FieldDescriptor& f = E.field();
    const Prime p = f.prime;
    Magnitude lower = mag(1 - epsilon) * s1;
    Magnitude upper = mag(1 + epsilon) * s1;

    if (f.is_dense()) {
        auto point = search_in_interval(E.weight(0), lower, false, upper, false, f.value_group());
        throw NoGap("the value set is dense (value group p^Q)", point.value_or(s1));
    }
    if (in_value_set(E, s1)) throw NoGap("s1 is itself a norm value", s1);

    GapCertificate c;
    c.space = E;
    c.s1 = s1;
    c.epsilon = epsilon;
    c.gap = Gap{value_point_below(E, s1, true), value_point_above(E, s1, true)};
    c.lower = lower;
    c.upper = upper;
    if (!lt(c.gap.lo, lower))
        throw NoGap("norm value " + c.gap.lo.to_string() + " lies in [(1-eps)s1, (1+eps)s1]", c.gap.lo);
    if (!lt(upper, c.gap.hi))
        throw NoGap("norm value " + c.gap.hi.to_string() + " lies in [(1-eps)s1, (1+eps)s1]", c.gap.hi);
    c.refutes_constructive = true;
    c.refutes_definitional = le(c.gap.lo, s1 / mag(1 + epsilon)) && le(upper, c.gap.hi);
    for (const auto& w : E.weights()) {
        LadderCheck l{w, floor_log(c.gap.lo / w, p), 0};
        l.above = l.below + 1;
        if (!le(c.gap.hi, w * power(p, l.above))) throw Error("internal: ladder check failed");
        c.ladders.push_back(std::move(l));
    }
    c.test_space = WeightedSpace(f, {Magnitude::one(), s1});
    return c;
}

// ---------------------------------------------------------------------------
// Patching, splitting, perturbation

PatchResult patch_isometry(const LinearMap& j, const LinearMap& f) {
    const Subspace& X = j.domain();
    const Subspace& Y = f.domain();
    if (X.ambient().dim() != Y.ambient().dim() || !Y.contains(X)) throw InvalidArgument("X must be a subspace of Y");
    if (j.codomain().dim() != f.codomain().dim()) throw InvalidArgument("j and f have different codomains");
    auto cj = certify_isometry(j);
    if (!cj.isometric) throw HypothesisViolation("j is not an isometry: " + cj.failed_condition);
    auto cf = certify_isometry(f);
    if (!cf.isometric) throw HypothesisViolation("f is not an isometry: " + cf.failed_condition);

    LinearMap diff = j.minus(f);
    PatchResult r;
    r.t = operator_norm(diff);
    if (!lt(r.t, Magnitude::one())) {
        const auto& dom = X.ambient();
        for (std::size_t k = 0; k < X.dim(); ++k)
            if (le(dom.norm(X.base()[k]), f.codomain().norm(diff.images()[k])))
                throw OperatorNormNotBelowOne(r.t, X.base()[k]);
        throw OperatorNormNotBelowOne(r.t, {});
    }

    r.base = X.base();
    for (auto& v : complement_in(Y, X.base())) r.base.push_back(std::move(v));
    if (r.t.is_zero()) {
        r.T = f;
    } else {
        std::vector<Vector> images;
        for (std::size_t k = 0; k < r.base.size(); ++k)
            images.push_back(k < X.dim() ? j.images()[k] : f.apply(r.base[k]));
        r.T = LinearMap::from_images(Y.ambient(), r.base, f.codomain(), images);
    }
    r.certificate = certify_isometry(r.T);
    r.agrees_on_x = std::all_of(X.base().begin(), X.base().end(),
                                [&](const Vector& x) { return r.T.apply(x) == j.apply(x); });
    return r;
}

SplitResult maximal_orthogonal_split(const Subspace& Y, const Subspace& X) {
    if (X.ambient().dim() != Y.ambient().dim() || !Y.contains(X)) throw InvalidArgument("X must be a subspace of Y");
    SplitResult r;
    r.u = X.base();
    r.m_x = r.u.size();
    auto rest = complement_in(Y, X.base());
    r.f_y = Subspace(Y.ambient(), rest);
    r.u.insert(r.u.end(), rest.begin(), rest.end());
    r.certificate = subspaces_orthogonal(X, r.f_y);
    return r;
}

PerturbationVerdict check_perturbation(const WeightedSpace& space, const std::vector<Vector>& xs,
                                       const std::vector<Vector>& zs, const Magnitude& t) {
    if (xs.size() != zs.size()) throw InvalidArgument("xs and zs differ in length");
    if (t.is_zero() || lt(Magnitude::one(), t)) throw InvalidArgument("t must lie in (0, 1]");
    PerturbationVerdict v;
    v.xs_level = xs.empty() ? Magnitude::one() : t_defect(space, xs).level;
    if (lt(v.xs_level, t)) {
        v.failure = "xs is only " + v.xs_level.to_string() + "-orthogonal";
        return v;
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!lt(space.norm(xs[i] - zs[i]), t * space.norm(xs[i]))) {
            v.failed_index = i + 1;
            v.failure = "||x_" + std::to_string(i + 1) + " - z_" + std::to_string(i + 1) + "|| is not below t ||x_" +
                        std::to_string(i + 1) + "||";
            return v;
        }
    }
    v.hypotheses_hold = true;
    v.norms_preserved = true;
    for (std::size_t i = 0; i < xs.size(); ++i) v.norms_preserved = v.norms_preserved && space.norm(xs[i]) == space.norm(zs[i]);
    if (!v.norms_preserved) return v;
    v.zs_certificate = t_defect(space, zs);
    v.certified = le(t, v.zs_certificate->level);
    return v;
}

LinearMap extend_isometry_immediate(const Subspace& E, const LinearMap& T) {
    const Subspace& D = T.domain();
    if (D.ambient().dim() != E.ambient().dim() || !E.contains(D)) throw InvalidArgument("D must be a subspace of E");
    auto comp = complement_in(E, D.base());
    if (!comp.empty()) throw NotImmediate(comp.front());
    if (D.dim() != E.dim()) throw Unsupported("proper immediate extension cannot be represented");
    return T;
}

// ---------------------------------------------------------------------------
// Universal space

EmbeddingResult embed_into_Eu(const Subspace& E, Ambient& A) {
    if (E.field() != A.field()) throw InvalidArgument("E and the ambient use different fields");
    EmbeddingResult r;
    std::vector<Vector> images;
    for (const auto& x : E.base()) {
        auto slot = A.allocate_for_norm(E.ambient().norm(x));
        images.push_back(slot.scale * A.stage().unit(slot.index));
        r.indices.push_back(slot.index);
        r.scales.push_back(slot.scale);
    }
    r.map = LinearMap::on_base(E, A.stage(), padded(images, A.dim(), A.field()));
    r.certificate = certify_isometry(r.map);
    return r;
}

namespace {

// Drops coordinates below half the norm: ||w - z|| < ||z|| / 2.
Vector truncate_small(const WeightedSpace& S, const Vector& z) {
    Magnitude half = S.norm(z) * mag(Rational(1, 2));
    Vector w = z;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (!w[i].is_zero() && lt(S.coordinate_size(w, i), half)) w[i] = Scalar::zero(S.field());
    return w;
}

} // namespace

DispositionResult disposition_extend(Ambient& A, const LinearMap& j, DispositionMode mode) {
    const FieldDescriptor& f = A.field();
    if (j.codomain().field() != f) throw InvalidArgument("Y and the ambient use different fields");
    auto cj = certify_isometry(j);
    if (!cj.isometric) throw HypothesisViolation("j is not an isometry: " + cj.failed_condition);

    const Subspace X = in_stage(j.domain(), A);
    const WeightedSpace& Y = j.codomain();
    const Subspace jX(Y, j.images());

    DispositionResult r;
    r.split = maximal_orthogonal_split(Subspace::whole(Y), jX);

    // z_k = j^-1(u_k) for the part inside j(X)
    std::vector<Vector> zs;
    const auto& combos = jX.orthogonalization().combos;
    for (std::size_t k = 0; k < r.split.m_x; ++k) zs.push_back(linear_combination(combos[k], X.base(), X.ambient()));

    std::vector<Vector> images = zs;
    if (mode == DispositionMode::ApproxThenPatch)
        for (auto& z : images) z = truncate_small(A.stage(), z);
    for (std::size_t k = r.split.m_x; k < r.split.u.size(); ++k) {
        auto slot = A.allocate_for_norm(Y.norm(r.split.u[k]));
        r.allocated.push_back(slot.index);
        images.push_back(slot.scale * A.stage().unit(slot.index));
    }
    images = padded(images, A.dim(), f);
    zs = padded(zs, A.dim(), f);

    LinearMap f0 = LinearMap::from_images(Y, r.split.u, A.stage(), images);
    if (mode == DispositionMode::Direct) {
        r.f = f0;
    } else {
        LinearMap jinv = LinearMap::on_base(jX, A.stage(), zs);
        r.approximation = f0.restricted_to(jX);
        r.approximation_distance = operator_norm(r.approximation->minus(jinv));
        if (!lt(*r.approximation_distance, Magnitude::one()))
            throw Error("internal: approximation is not within distance 1");
        auto patch = patch_isometry(jinv, f0);
        r.f = patch.T;
        r.patched = !patch.t.is_zero();
    }
    r.certificate = certify_isometry(r.f);
    r.retraction_exact = true;
    for (const auto& x : X.base())
        r.retraction_exact = r.retraction_exact && r.f.apply(j.apply(x)) == pad(x, A.dim(), f);
    return r;
}

// ---------------------------------------------------------------------------
// Classification

Fingerprint classify(const Subspace& E) {
    Fingerprint fp;
    fp.dim = E.dim();
    ValueGroupDescriptor g = E.field().value_group();
    for (const auto& b : E.base()) fp.cosets.push_back(coset_of(E.ambient().norm(b), g));
    std::sort(fp.cosets.begin(), fp.cosets.end(), CosetLess{});
    return fp;
}

IsometricEqResult isometric_eq(const Subspace& E, const Subspace& F) {
    if (E.field() != F.field()) throw InvalidArgument("spaces over different fields");
    IsometricEqResult r;
    r.left = classify(E);
    r.right = classify(F);
    if (r.left.dim != r.right.dim) {
        r.dimension_mismatch = true;
        return r;
    }
    if (!(r.left == r.right)) {
        std::map<Coset, int, CosetLess> count;
        for (const auto& c : r.left.cosets) ++count[c];
        for (const auto& c : r.right.cosets) --count[c];
        for (const auto& [c, n] : count) {
            if (n == 0) continue;
            r.obstruction = c;
            bool in_left = std::find(r.left.cosets.begin(), r.left.cosets.end(), c) != r.left.cosets.end();
            bool in_right = std::find(r.right.cosets.begin(), r.right.cosets.end(), c) != r.right.cosets.end();
            r.value_set_obstruction = in_left != in_right;
            if (r.value_set_obstruction) break;
        }
        return r;
    }
    ValueGroupDescriptor g = E.field().value_group();
    std::map<Coset, std::vector<std::size_t>, CosetLess> pool;
    for (std::size_t k = F.dim(); k-- > 0;) pool[coset_of(F.ambient().norm(F.base()[k]), g)].push_back(k);
    std::vector<Vector> images;
    for (const auto& b : E.base()) {
        Magnitude nb = E.ambient().norm(b);
        auto& slots = pool[coset_of(nb, g)];
        std::size_t k = slots.back();
        slots.pop_back();
        const Vector& v = F.base()[k];
        images.push_back(scalar_with_abs(nb / F.ambient().norm(v), E.field()) * v);
    }
    r.witness = LinearMap::on_base(E, F.ambient(), std::move(images));
    r.certificate = certify_isometry(*r.witness);
    r.isometric = r.certificate->isometric;
    return r;
}

// ---------------------------------------------------------------------------
// Shrinking balls

std::vector<Magnitude> default_ball_stream(std::size_t count, Prime p) {
    std::vector<Magnitude> out;
    for (std::size_t n = 1; n <= count; ++n) {
        long nn = static_cast<long>(n);
        out.push_back(Magnitude::prime_power(p, Rational(-nn, 2 * (nn + 1))));
    }
    return out;
}

ShrinkingBallsResult shrinking_balls(std::size_t N, std::optional<std::vector<Magnitude>> stream) {
    if (N < 2) throw InvalidArgument("need at least two balls");
    const FieldDescriptor f = FieldDescriptor::padic(2);
    std::vector<Magnitude> m = stream ? std::move(*stream) : default_ball_stream(N + 1);
    if (m.size() < N + 1) throw InvalidArgument("stream needs N + 1 magnitudes");
    m.resize(N + 1);
    const Magnitude half = mag(Rational(1, 2));
    if (lt(Magnitude::one(), m[0])) throw InvalidArgument("stream must start at most 1");
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (!lt(half, m[k])) throw InvalidArgument("stream must stay above 1/2");
        if (k > 0 && !lt(m[k], m[k - 1]))
            throw InvalidArgument("stream is not strictly decreasing at position " + std::to_string(k + 1));
    }

    ShrinkingBallsResult r{Ambient::universal(f), m, {}, {}, 0, false};
    std::vector<std::size_t> idx;
    std::vector<Scalar> scale;
    for (const auto& mk : m) {
        auto slot = r.ambient.allocate_for_norm(mk);
        idx.push_back(slot.index);
        scale.push_back(slot.scale);
    }
    const WeightedSpace& S = r.ambient.stage();
    bool ok = true;
    for (std::size_t k = 0; k < m.size(); ++k) {
        bool exact = S.norm(scale[k] * S.unit(idx[k])) == m[k];
        ok = ok && exact;
        if (!exact) r.log.push_back("coordinate " + std::to_string(k + 1) + " has the wrong norm");
    }
    Vector x = S.zero_vector();
    for (std::size_t n = 0; n < N; ++n) {
        x = x + scale[n] * S.unit(idx[n]);
        r.balls.push_back(Ball{x, m[n + 1]});
    }
    for (std::size_t n = 0; n + 1 < N; ++n) {
        const Ball& B = r.balls[n];
        const Ball& C = r.balls[n + 1];
        Magnitude d = S.norm(C.center - B.center);
        bool center_inside = le(d, B.radius);
        bool shrinks = lt(C.radius, B.radius);
        bool nested = center_inside && le(C.radius, B.radius);
        ++r.nesting_checks;
        ok = ok && center_inside && shrinks && nested;
        r.log.push_back("n=" + std::to_string(n + 1) + ": ||x_" + std::to_string(n + 2) + " - x_" +
                        std::to_string(n + 1) + "|| = " + d.to_string() + (center_inside ? " <= " : " > ") +
                        B.radius.to_string() + ", radius " + C.radius.to_string() + (shrinks ? " < " : " >= ") +
                        B.radius.to_string() + (nested ? ", nested" : ", NOT nested"));
    }
    r.log.push_back("empty intersection of all balls: an infinite statement, not checked on finite stages");
    r.all_passed = ok;
    return r;
}

} // namespace nagur
