#include "nagur/space.hpp"

#include <algorithm>

namespace nagur {

WeightedSpace::WeightedSpace(FieldDescriptor field, std::vector<Magnitude> weights)
    : field_(std::move(field)), weights_(std::move(weights)) {
    for (const auto& w : weights_)
        if (w.is_zero()) throw InvalidArgument("space weights must be nonzero");
}

WeightedSpace WeightedSpace::standard(const FieldDescriptor& field, std::size_t dim) {
    return WeightedSpace(field, std::vector<Magnitude>(dim, Magnitude::one()));
}

void WeightedSpace::check(const Vector& v) const {
    if (v.size() != dim())
        throw InvalidArgument("vector of length " + std::to_string(v.size()) + " in a space of dimension " +
                              std::to_string(dim()));
    for (const auto& x : v)
        if (x.backend() != field_.backend) throw InvalidArgument("vector coordinate from another backend");
}

Magnitude WeightedSpace::coordinate_size(const Vector& v, std::size_t i) const {
    return weights_[i] * abs(v[i], field_);
}

Magnitude WeightedSpace::norm(const Vector& v) const {
    check(v);
    Magnitude best = Magnitude::zero();
    for (std::size_t i = 0; i < dim(); ++i) {
        if (v[i].is_zero()) continue;
        Magnitude s = coordinate_size(v, i);
        if (compare(s, best) > 0) best = std::move(s);
    }
    return best;
}

Vector WeightedSpace::zero_vector() const {
    return Vector(dim(), Scalar::zero(field_));
}

Vector WeightedSpace::unit(std::size_t i) const {
    Vector v = zero_vector();
    v.at(i) = Scalar::one(field_);
    return v;
}

WeightedSpace WeightedSpace::with_appended(const Magnitude& weight) const {
    std::vector<Magnitude> w = weights_;
    w.push_back(weight);
    return WeightedSpace(field_, std::move(w));
}

bool WeightedSpace::is_prefix_of(const WeightedSpace& other) const {
    if (field_ != other.field_ || dim() > other.dim()) return false;
    return std::equal(weights_.begin(), weights_.end(), other.weights_.begin());
}

// ---------------------------------------------------------------------------

Vector operator+(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw InvalidArgument("vector length mismatch");
    Vector r;
    r.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r.push_back(a[i] + b[i]);
    return r;
}

Vector operator-(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw InvalidArgument("vector length mismatch");
    Vector r;
    r.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r.push_back(a[i] - b[i]);
    return r;
}

Vector operator*(const Scalar& s, const Vector& v) {
    Vector r;
    r.reserve(v.size());
    for (const auto& x : v) r.push_back(s * x);
    return r;
}

bool is_zero(const Vector& v) {
    return std::all_of(v.begin(), v.end(), [](const Scalar& x) { return x.is_zero(); });
}

Vector pad(const Vector& v, std::size_t n, const FieldDescriptor& f) {
    if (v.size() > n) throw InvalidArgument("cannot pad a vector to a shorter length");
    Vector r = v;
    r.resize(n, Scalar::zero(f));
    return r;
}

Vector linear_combination(const std::vector<Scalar>& coeffs, const std::vector<Vector>& vectors,
                          const WeightedSpace& space) {
    if (coeffs.size() != vectors.size()) throw InvalidArgument("coefficient count mismatch");
    Vector r = space.zero_vector();
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        if (!coeffs[i].is_zero()) r = r + coeffs[i] * vectors[i];
    return r;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t pivot_of(const WeightedSpace& space, const Vector& v) {
    std::size_t best = 0;
    Magnitude best_size = Magnitude::zero();
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j].is_zero()) continue;
        Magnitude s = space.coordinate_size(v, j);
        if (compare(s, best_size) > 0) {
            best_size = std::move(s);
            best = j;
        }
    }
    return best;
}

// Subtracts base vectors in order so that r vanishes at every pivot.
std::vector<Scalar> reduce(const WeightedSpace& space, const std::vector<Vector>& base,
                           const std::vector<std::size_t>& pivots, Vector& r) {
    const auto& f = space.field();
    std::vector<Scalar> coeffs;
    coeffs.reserve(base.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
        const Scalar& x = r[pivots[k]];
        if (x.is_zero()) {
            coeffs.push_back(Scalar::zero(f));
            continue;
        }
        Scalar c = divide(x, base[k][pivots[k]], f);
        r = r - c * base[k];
        r[pivots[k]] = Scalar::zero(f);  // exact, even when c carries a truncation tail
        coeffs.push_back(std::move(c));
    }
    return coeffs;
}

} // namespace

Orthogonalization orthogonalize(const WeightedSpace& space, const std::vector<Vector>& vectors) {
    const auto& f = space.field();
    const std::size_t n = vectors.size();
    Orthogonalization out;
    for (std::size_t idx = 0; idx < n; ++idx) {
        space.check(vectors[idx]);
        Vector w = vectors[idx];
        std::vector<Scalar> combo(n, Scalar::zero(f));
        combo[idx] = Scalar::one(f);
        for (std::size_t k = 0; k < out.base.size(); ++k) {
            const Scalar& x = w[out.pivots[k]];
            if (x.is_zero()) continue;
            Scalar c = divide(x, out.base[k][out.pivots[k]], f);
            w = w - c * out.base[k];
            w[out.pivots[k]] = Scalar::zero(f);
            for (std::size_t i = 0; i < n; ++i)
                if (!out.combos[k][i].is_zero()) combo[i] = combo[i] - c * out.combos[k][i];
        }
        if (is_zero(w)) {
            std::vector<Scalar> dep(n, Scalar::zero(f));
            for (std::size_t i = 0; i < n; ++i)
                if (i != idx) dep[i] = -combo[i];
            out.dependent.push_back(idx);
            out.dependencies.push_back(std::move(dep));
            continue;
        }
        out.pivots.push_back(pivot_of(space, w));
        out.base.push_back(std::move(w));
        out.combos.push_back(std::move(combo));
    }
    return out;
}

// ---------------------------------------------------------------------------

Subspace::Subspace(WeightedSpace ambient, std::vector<Vector> span)
    : ambient_(std::move(ambient)), span_(std::move(span)), ortho_(orthogonalize(ambient_, span_)) {}

Subspace Subspace::whole(const WeightedSpace& ambient) {
    std::vector<Vector> units;
    for (std::size_t i = 0; i < ambient.dim(); ++i) units.push_back(ambient.unit(i));
    return Subspace(ambient, std::move(units));
}

std::optional<std::vector<Scalar>> Subspace::coordinates(const Vector& x) const {
    ambient_.check(x);
    Vector r = x;
    auto coeffs = reduce(ambient_, ortho_.base, ortho_.pivots, r);
    if (!is_zero(r)) return std::nullopt;
    return coeffs;
}

bool Subspace::contains(const Subspace& other) const {
    if (other.ambient_.dim() != ambient_.dim()) return false;
    return std::all_of(other.base().begin(), other.base().end(), [&](const Vector& v) { return contains(v); });
}

Subspace Subspace::embedded_in(const WeightedSpace& larger) const {
    if (!ambient_.is_prefix_of(larger)) throw InvalidArgument("target stage does not extend the ambient");
    std::vector<Vector> padded;
    for (const auto& v : span_) padded.push_back(pad(v, larger.dim(), field()));
    return Subspace(larger, std::move(padded));
}

DistanceResult distance(const Vector& v, const Subspace& D) {
    const auto& space = D.ambient();
    space.check(v);
    Vector r = v;
    auto coeffs = reduce(space, D.base(), D.pivots(), r);
    DistanceResult out;
    out.distance = space.norm(r);
    out.witness = v - r;
    out.coefficients = std::move(coeffs);
    return out;
}

OrthoCertificate t_defect(const WeightedSpace& space, const std::vector<Vector>& vectors) {
    const auto& f = space.field();
    OrthoCertificate cert;
    cert.vectors = vectors;
    cert.level = Magnitude::one();
    std::optional<std::vector<Scalar>> worst_coeffs;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        Magnitude n = space.norm(vectors[i]);
        if (n.is_zero()) throw InvalidArgument("t_defect of a set containing the zero vector");
        std::vector<Vector> others;
        std::vector<std::size_t> other_idx;
        for (std::size_t j = 0; j < vectors.size(); ++j)
            if (j != i) {
                others.push_back(vectors[j]);
                other_idx.push_back(j);
            }
        Subspace D(space, others);
        DistanceResult dr = distance(vectors[i], D);
        Magnitude ratio = dr.distance / n;
        bool new_worst = i == 0 || compare(ratio, cert.level) < 0;
        cert.distances.push_back(dr.distance);
        cert.ratios.push_back(ratio);
        if (new_worst) {
            cert.level = ratio;
            cert.worst = i;
            // d* = sum_k c_k base_k, base_k = sum_j combos[k][j] others_j
            std::vector<Scalar> lambda(vectors.size(), Scalar::zero(f));
            lambda[i] = Scalar::one(f);
            const auto& combos = D.orthogonalization().combos;
            for (std::size_t k = 0; k < dr.coefficients.size(); ++k) {
                if (dr.coefficients[k].is_zero()) continue;
                for (std::size_t j = 0; j < others.size(); ++j)
                    if (!combos[k][j].is_zero())
                        lambda[other_idx[j]] = lambda[other_idx[j]] - dr.coefficients[k] * combos[k][j];
            }
            worst_coeffs = std::move(lambda);
        }
    }
    if (worst_coeffs) cert.witness_coefficients = std::move(*worst_coeffs);
    return cert;
}

Subspace orthocomplement(const Subspace& D) {
    const auto& space = D.ambient();
    std::vector<bool> is_pivot(space.dim(), false);
    for (auto p : D.pivots()) is_pivot[p] = true;
    std::vector<Vector> units;
    for (std::size_t j = 0; j < space.dim(); ++j)
        if (!is_pivot[j]) units.push_back(space.unit(j));
    return Subspace(space, std::move(units));
}

std::vector<Vector> complement_in(const Subspace& E, const std::vector<Vector>& prefix) {
    const auto& space = E.ambient();
    Subspace F(space, prefix);
    if (E.is_whole()) return orthocomplement(F).span();

    std::vector<Vector> base = F.base();
    std::vector<std::size_t> pivots = F.pivots();
    std::vector<Vector> added;
    for (const auto& e : E.base()) {
        Vector r = e;
        reduce(space, base, pivots, r);
        if (is_zero(r)) continue;
        pivots.push_back(pivot_of(space, r));
        base.push_back(r);
        added.push_back(std::move(r));
    }
    return added;
}

OrthogonalityResult subspaces_orthogonal(const Subspace& D, const Subspace& D0) {
    if (D.ambient().dim() != D0.ambient().dim()) throw InvalidArgument("subspaces of different ambients");
    std::vector<Vector> all = D.base();
    all.insert(all.end(), D0.base().begin(), D0.base().end());
    OrthogonalityResult out;
    out.certificate = t_defect(D.ambient(), all);
    out.orthogonal = out.certificate.orthogonal();
    return out;
}

ExtendedBase extend_base(const std::vector<Vector>& f_base, const Subspace& E, const Magnitude& t) {
    const auto& space = E.ambient();
    if (compare(t, Magnitude::zero()) <= 0 || compare(t, Magnitude::one()) > 0)
        throw InvalidArgument("t must lie in (0, 1]");
    for (const auto& v : f_base)
        if (!E.contains(v)) throw InvalidArgument("base vector outside the target space");
    if (!f_base.empty()) {
        OrthoCertificate fc = t_defect(space, f_base);
        if (compare(fc.level * fc.level, t) < 0) throw DefectBelowRoot(fc.level, t);
        if (Subspace(space, f_base).dim() != f_base.size()) throw InvalidArgument("base vectors are dependent");
    }
    ExtendedBase out;
    out.vectors = f_base;
    for (auto& v : complement_in(E, f_base)) out.vectors.push_back(std::move(v));
    out.certificate = t_defect(space, out.vectors);
    if (compare(out.certificate.level, t) < 0) throw Error("internal: extended base below requested level");
    return out;
}

// ---------------------------------------------------------------------------

LinearMap LinearMap::from_images(const WeightedSpace& domain_space, const std::vector<Vector>& domain_vectors,
                                 const WeightedSpace& codomain, const std::vector<Vector>& images) {
    if (domain_vectors.size() != images.size()) throw InvalidArgument("image count mismatch");
    for (const auto& w : images) codomain.check(w);
    LinearMap L;
    L.domain_ = Subspace(domain_space, domain_vectors);
    L.codomain_ = codomain;
    const auto& o = L.domain_.orthogonalization();
    for (const auto& combo : o.combos) L.images_.push_back(linear_combination(combo, images, codomain));
    for (std::size_t k = 0; k < o.dependent.size(); ++k) {
        Vector expected = linear_combination(o.dependencies[k], images, codomain);
        if (!is_zero(expected - images[o.dependent[k]]))
            throw InvalidArgument("dependent domain vector " + std::to_string(o.dependent[k]) +
                                  " has an inconsistent image");
    }
    return L;
}

LinearMap LinearMap::on_base(const Subspace& D, const WeightedSpace& codomain, std::vector<Vector> images) {
    if (images.size() != D.dim()) throw InvalidArgument("image count does not match the base");
    for (const auto& w : images) codomain.check(w);
    LinearMap L;
    L.domain_ = D;
    L.codomain_ = codomain;
    L.images_ = std::move(images);
    return L;
}

LinearMap LinearMap::identity(const Subspace& D) {
    return on_base(D, D.ambient(), D.base());
}

LinearMap LinearMap::inclusion(const Subspace& D, const WeightedSpace& codomain) {
    if (!D.ambient().is_prefix_of(codomain)) throw InvalidArgument("codomain does not extend the ambient");
    std::vector<Vector> images;
    for (const auto& b : D.base()) images.push_back(pad(b, codomain.dim(), D.field()));
    return on_base(D, codomain, std::move(images));
}

Vector LinearMap::apply(const Vector& x) const {
    auto c = domain_.coordinates(x);
    if (!c) throw InvalidArgument("vector outside the map's domain");
    return linear_combination(*c, images_, codomain_);
}

LinearMap LinearMap::restricted_to(const Subspace& X) const {
    std::vector<Vector> images;
    for (const auto& b : X.base()) images.push_back(apply(b));
    return on_base(X, codomain_, std::move(images));
}

LinearMap LinearMap::minus(const LinearMap& other) const {
    if (other.codomain_.dim() != codomain_.dim()) throw InvalidArgument("codomain mismatch");
    std::vector<Vector> images;
    for (std::size_t k = 0; k < images_.size(); ++k) images.push_back(images_[k] - other.apply(base()[k]));
    return on_base(domain_, codomain_, std::move(images));
}

LinearMap LinearMap::with_codomain(const WeightedSpace& larger) const {
    if (!codomain_.is_prefix_of(larger)) throw InvalidArgument("codomain does not extend");
    std::vector<Vector> images;
    for (const auto& w : images_) images.push_back(pad(w, larger.dim(), codomain_.field()));
    return on_base(domain_, larger, std::move(images));
}

LinearMap LinearMap::then(const LinearMap& other) const {
    std::vector<Vector> images;
    for (const auto& w : images_) images.push_back(other.apply(w));
    return on_base(domain_, other.codomain_, std::move(images));
}

Magnitude operator_norm(const LinearMap& L) {
    Magnitude best = Magnitude::zero();
    const auto& dom = L.domain().ambient();
    for (std::size_t k = 0; k < L.base().size(); ++k) {
        Magnitude r = L.codomain().norm(L.images()[k]) / dom.norm(L.base()[k]);
        if (compare(r, best) > 0) best = std::move(r);
    }
    return best;
}

IsometryCertificate certify_isometry(const LinearMap& L) {
    IsometryCertificate cert;
    const auto& dom = L.domain().ambient();
    for (std::size_t k = 0; k < L.base().size(); ++k) {
        cert.base_norms.push_back(dom.norm(L.base()[k]));
        cert.image_norms.push_back(L.codomain().norm(L.images()[k]));
        if (cert.failed_condition.empty() && cert.base_norms.back() != cert.image_norms.back()) {
            cert.failed_condition = "norm of base vector " + std::to_string(k) + " not preserved";
            cert.refutation = L.base()[k];
        }
    }
    if (!cert.failed_condition.empty()) return cert;
    cert.image_defect = t_defect(L.codomain(), L.images());
    if (!cert.image_defect->orthogonal()) {
        cert.failed_condition = "images of the orthogonal base are not orthogonal (level " +
                                cert.image_defect->level.to_string() + ")";
        cert.refutation = linear_combination(cert.image_defect->witness_coefficients, L.base(), dom);
        return cert;
    }
    cert.isometric = true;
    return cert;
}

} // namespace nagur
