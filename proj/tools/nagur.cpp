// nagur: command-line front end. Inputs are JSON files in the formats of
// nagur/serialize.hpp; output is human text, or a certificate with --json.
//
// exit codes: 0 computed, 1 internal error or failing verify cases,
//             2 invalid input, 3 precision exhausted, 4 hypothesis violation

#include "nagur/gurarii.hpp"
#include "nagur/serialize.hpp"
#include "nagur/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using namespace nagur;

namespace {

struct Options {
    std::optional<long> prime;
    std::optional<std::string> backend;
    std::optional<std::string> tail_order;
    std::optional<std::string> epsilon;
    std::optional<std::string> t;
    std::optional<std::string> r;
    std::optional<std::string> s;
    std::uint64_t seed = 42;
    std::size_t cases = 100;
    unsigned threads = 0;
    bool json = false;

    std::optional<std::string> space, vectors, subspace, map, j, f, x, zs, other, other_space, report;
    std::optional<std::size_t> dim;
    std::string suite = "all";
    std::string mode = "direct";
    std::size_t balls = 50;
};

// ---------------------------------------------------------------------------
// Flag validation

Rational rational_flag(const std::optional<std::string>& text, const char* name) {
    if (!text) throw InvalidArgument(std::string("missing --") + name);
    return parse_rational(*text);
}

Rational epsilon_flag(const Options& o) {
    Rational e = rational_flag(o.epsilon, "epsilon");
    if (e <= 0 || e >= 1) throw InvalidArgument("--epsilon must lie in (0, 1)");
    return e;
}

Magnitude magnitude_flag(const std::optional<std::string>& text, const char* name) {
    if (!text) throw InvalidArgument(std::string("missing --") + name);
    return Magnitude::parse(*text);
}

Magnitude t_flag(const Options& o) {
    Magnitude t = magnitude_flag(o.t, "t");
    if (t.is_zero() || t > Magnitude::one()) throw InvalidArgument("--t must lie in (0, 1]");
    return t;
}

std::optional<Magnitude> r_flag(const Options& o) {
    if (!o.r) return std::nullopt;
    Magnitude r = Magnitude::parse(*o.r);
    if (r.is_zero() || r >= Magnitude::one()) throw InvalidArgument("--r must lie in (0, 1)");
    return r;
}

bool field_flags_given(const Options& o) { return o.prime || o.backend || o.tail_order; }

FieldDescriptor field_flag(const Options& o) {
    long p = o.prime.value_or(2);
    if (p < 2 || !is_prime(Integer(p))) throw InvalidArgument("--prime must be a prime");
    std::string b = o.backend.value_or("padic");
    if (b == "padic") {
        if (o.tail_order) throw InvalidArgument("--tail-order applies to the hahn backend only");
        return FieldDescriptor::padic(p);
    }
    if (b == "hahn") {
        Rational tail = o.tail_order ? parse_rational(*o.tail_order) : Rational(8);
        if (tail <= 0) throw InvalidArgument("--tail-order must be positive");
        return FieldDescriptor::hahn(p, tail);
    }
    throw InvalidArgument("--backend must be padic or hahn");
}

void validate(const Options& o) {
    field_flag(o);
    if (o.epsilon) epsilon_flag(o);
    if (o.t) t_flag(o);
    r_flag(o);
    if (o.s && Magnitude::parse(*o.s).is_zero()) throw InvalidArgument("--s must be positive");
    if (o.cases == 0) throw InvalidArgument("--cases must be positive");
    if (o.mode != "direct" && o.mode != "approx-then-patch")
        throw InvalidArgument("--mode must be direct or approx-then-patch");
}

// ---------------------------------------------------------------------------
// Inputs

Json load(const std::optional<std::string>& path, const char* name) {
    if (!path) throw InvalidArgument(std::string("missing --") + name);
    return read_json_file(*path);
}

WeightedSpace space_input(const Options& o, const std::optional<std::string>& path, const char* name) {
    FieldDescriptor flag = field_flag(o);
    if (!path) {
        if (o.dim) return WeightedSpace::standard(flag, *o.dim);
        throw InvalidArgument(std::string("missing --") + name + " (or --dim for a standard space)");
    }
    WeightedSpace E = space_from_json(read_json_file(*path), flag);
    if (field_flags_given(o) && !(E.field() == flag))
        throw InvalidArgument("field flags disagree with the field of " + *path);
    return E;
}

WeightedSpace space_input(const Options& o) { return space_input(o, o.space, "space"); }

Subspace subspace_input(const std::optional<std::string>& path, const WeightedSpace& E) {
    if (!path) return Subspace::whole(E);
    return subspace_from_json(read_json_file(*path), E);
}

LinearMap map_input(const Options& o, const std::optional<std::string>& path, const char* name) {
    LinearMap L = map_from_json(load(path, name), field_flag(o));
    if (field_flags_given(o) && !(L.codomain().field() == field_flag(o)))
        throw InvalidArgument("field flags disagree with the field of " + *path);
    return L;
}

// ---------------------------------------------------------------------------
// Text output

std::string show(const Vector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].to_string();
    return s + ")";
}

std::string show(const Magnitude& m) { return m.to_string(); }

std::string yes(bool b) { return b ? "yes" : "no"; }

struct Output {
    std::string kind;
    FieldDescriptor field;
    Json payload;
    std::ostringstream text;
};

// ---------------------------------------------------------------------------
// Subcommands

void cmd_norm(const Options& o, Output& out) {
    auto E = space_input(o);
    auto vs = vectors_from_json(load(o.vectors, "vectors"), E);
    Json norms = Json::array();
    for (const auto& v : vs) {
        norms.push_back(to_json(E.norm(v)));
        out.text << "||" << show(v) << "|| = " << show(E.norm(v)) << "\n";
    }
    out.kind = "norm";
    out.field = E.field();
    out.payload = {{"space", to_json(E)}, {"vectors", to_json(vs)}, {"norms", norms}};
}

void cmd_orth(const Options& o, Output& out) {
    auto E = space_input(o);
    auto vs = vectors_from_json(load(o.vectors, "vectors"), E);
    auto res = orthogonalize(E, vs);
    out.kind = "orthogonalization";
    out.field = E.field();
    out.payload = to_json(res);
    out.text << "orthogonal base (" << res.base.size() << " vectors):\n";
    for (std::size_t k = 0; k < res.base.size(); ++k)
        out.text << "  " << show(res.base[k]) << "  pivot " << res.pivots[k] << "\n";
    out.text << "t_defect = " << show(t_defect(E, res.base).level) << "\n";
}

void cmd_dist(const Options& o, Output& out) {
    auto E = space_input(o);
    auto D = subspace_input(o.subspace, E);
    if (!o.subspace) throw InvalidArgument("missing --subspace");
    auto vs = vectors_from_json(load(o.vectors, "vectors"), E);
    Json results = Json::array();
    out.text << "dim D = " << D.dim() << "\n";
    for (const auto& v : vs) {
        auto d = distance(v, D);
        results.push_back(to_json(d));
        out.text << "dist(" << show(v) << ", D) = " << show(d.distance) << "\n";
    }
    out.kind = "distance";
    out.field = E.field();
    out.payload = {{"space", to_json(E)}, {"subspace", to_json(D)}, {"results", results}};
}

void cmd_defect(const Options& o, Output& out) {
    auto E = space_input(o);
    auto vs = vectors_from_json(load(o.vectors, "vectors"), E);
    auto c = t_defect(E, vs);
    out.kind = "defect";
    out.field = E.field();
    out.payload = to_json(c);
    out.text << "t* = " << show(c.level) << (c.orthogonal() ? "  (orthogonal)" : "") << "\n";
}

void cmd_extend_base(const Options& o, Output& out) {
    auto E = space_input(o);
    auto D = subspace_input(o.subspace, E);
    auto fs = vectors_from_json(load(o.vectors, "vectors"), E);
    auto b = extend_base(fs, D, t_flag(o));
    out.kind = "extended-base";
    out.field = E.field();
    out.payload = to_json(b);
    out.text << "base of E (" << b.vectors.size() << " vectors, first " << fs.size() << " given):\n";
    for (const auto& v : b.vectors) out.text << "  " << show(v) << "\n";
    out.text << "t_defect = " << show(b.certificate.level) << "\n";
}

void cmd_opnorm(const Options& o, Output& out) {
    auto L = map_input(o, o.map, "map");
    Magnitude n = operator_norm(L);
    out.kind = "operator-norm";
    out.field = L.codomain().field();
    out.payload = {{"map", to_json(L)}, {"operator_norm", to_json(n)}};
    out.text << "||L|| = " << show(n) << "\n";
}

void cmd_certify_isometry(const Options& o, Output& out) {
    auto L = map_input(o, o.map, "map");
    auto c = certify_isometry(L);
    out.kind = "isometry";
    out.field = L.codomain().field();
    out.payload = {{"map", to_json(L)}, {"certificate", to_json(c)}};
    out.text << "isometric: " << yes(c.isometric) << "\n";
}

void cmd_eps_iso(const Options& o, Output& out) {
    Ambient A(space_input(o), r_flag(o));
    auto i = map_input(o, o.map, "map");
    auto r = epsilon_isometry(A, i, epsilon_flag(o));
    out.kind = "eps-isometry";
    out.field = A.field();
    out.payload = to_json(r);
    out.payload["stage"] = to_json(A.stage());
    out.text << "t = " << show(r.t) << "\n"
             << "ratio bounds [" << show(r.lower) << ", " << show(r.upper) << "]\n"
             << "(1 -/+ eps) bounds hold: " << yes(r.bounds_hold) << "\n"
             << "f(i(x)) = x on X: " << yes(r.retraction_exact) << "\n"
             << "images of the Y base:\n";
    for (const auto& y : r.y_base) out.text << "  " << show(y) << " -> " << show(r.f.apply(y)) << "\n";
}

void cmd_certify_gap(const Options& o, Output& out) {
    auto E = space_input(o);
    Magnitude s = magnitude_flag(o.s, "s");
    Rational eps = epsilon_flag(o);
    out.kind = "gap";
    out.field = E.field();
    try {
        auto c = nonexistence_certificate(E, s, eps);
        out.payload = to_json(c);
        out.text << "gap (" << show(c.gap.lo) << ", " << show(c.gap.hi) << ") contains [" << show(c.lower) << ", "
                 << show(c.upper) << "]\n"
                 << "no eps-isometry (constructive bound): " << yes(c.refutes_constructive) << "\n"
                 << "no eps-isometry (strict bound): " << yes(c.refutes_definitional) << "\n";
    } catch (const NoGap& e) {
        out.payload = {{"space", to_json(E)},        {"s", to_json(s)},
                       {"epsilon", to_string(eps)}, {"gap", nullptr},
                       {"blocking", to_json(e.blocking)}, {"refutes_constructive", false},
                       {"reason", e.what()}};
        out.text << "no certificate: norm value " << show(e.blocking) << " lies in the target interval\n";
    }
}

void cmd_patch(const Options& o, Output& out) {
    auto j = map_input(o, o.j, "j");
    auto f = map_input(o, o.f, "f");
    auto r = patch_isometry(j, f);
    out.kind = "patch";
    out.field = f.codomain().field();
    out.payload = to_json(r);
    out.text << "||j - f|X|| = " << show(r.t) << "\n"
             << "T isometric: " << yes(r.certificate.isometric) << "\n"
             << "T|X = j: " << yes(r.agrees_on_x) << "\n";
    for (const auto& y : r.base) out.text << "  " << show(y) << " -> " << show(r.T.apply(y)) << "\n";
}

void cmd_split(const Options& o, Output& out) {
    auto E = space_input(o);
    auto Y = subspace_input(o.subspace, E);
    if (!o.x) throw InvalidArgument("missing --x");
    auto X = subspace_input(o.x, E);
    auto r = maximal_orthogonal_split(Y, X);
    out.kind = "split";
    out.field = E.field();
    out.payload = to_json(r);
    out.text << "m_X = " << r.m_x << "\n";
    for (std::size_t k = 0; k < r.u.size(); ++k)
        out.text << "  u" << k + 1 << " = " << show(r.u[k]) << (k < r.m_x ? "  (in X)" : "") << "\n";
    out.text << "F_Y orthogonal to X: " << yes(r.certificate.orthogonal) << "\n";
}

void cmd_perturb_check(const Options& o, Output& out) {
    auto E = space_input(o);
    auto xs = vectors_from_json(load(o.vectors, "vectors"), E);
    auto zs = vectors_from_json(load(o.zs, "zs"), E);
    auto v = check_perturbation(E, xs, zs, t_flag(o));
    out.kind = "perturbation";
    out.field = E.field();
    out.payload = to_json(v);
    out.text << "hypotheses hold: " << yes(v.hypotheses_hold) << "\n";
    if (v.failed_index) out.text << "first failure at position " << *v.failed_index << ": " << v.failure << "\n";
    out.text << "certified: " << yes(v.certified) << "\n";
}

void cmd_embed_eu(const Options& o, Output& out) {
    auto E = space_input(o);
    auto D = subspace_input(o.subspace, E);
    Ambient A = Ambient::universal(E.field(), r_flag(o));
    auto r = embed_into_Eu(D, A);
    out.kind = "embedding";
    out.field = E.field();
    out.payload = to_json(r);
    out.payload["stage"] = to_json(A.stage());
    out.payload["registry"] = to_json(A.registry());
    out.text << "stage weights:";
    for (const auto& w : A.stage().weights()) out.text << " " << show(w);
    out.text << "\n";
    for (std::size_t n = 0; n < r.indices.size(); ++n)
        out.text << "  x" << n + 1 << " -> " << r.scales[n].to_string() << " e" << r.indices[n] << "\n";
    out.text << "isometric: " << yes(r.certificate.isometric) << "\n";
}

void cmd_extend(const Options& o, Output& out) {
    Ambient A(space_input(o), r_flag(o));
    auto j = map_input(o, o.map, "map");
    auto mode = o.mode == "direct" ? DispositionMode::Direct : DispositionMode::ApproxThenPatch;
    auto r = disposition_extend(A, j, mode);
    out.kind = "disposition";
    out.field = A.field();
    out.payload = to_json(r);
    out.payload["stage"] = to_json(A.stage());
    out.text << "allocated " << r.allocated.size() << " coordinates, stage dim " << A.dim() << "\n"
             << "f isometric: " << yes(r.certificate.isometric) << "\n"
             << "f(j(x)) = x on X: " << yes(r.retraction_exact) << "\n";
    if (r.approximation_distance)
        out.text << "||f - j^-1|| = " << show(*r.approximation_distance) << ", patched: " << yes(r.patched) << "\n";
}

std::string show(const Fingerprint& f) {
    std::string s = "dim " + std::to_string(f.dim) + ", cosets [";
    for (std::size_t i = 0; i < f.cosets.size(); ++i) s += (i ? ", " : "") + f.cosets[i].to_string();
    return s + "]";
}

void cmd_classify(const Options& o, Output& out) {
    auto E = space_input(o);
    auto D = subspace_input(o.subspace, E);
    out.kind = "classification";
    out.field = E.field();
    if (!o.other_space && !o.other) {
        auto fp = classify(D);
        out.payload = {{"fingerprint", to_json(fp)}};
        out.text << show(fp) << "\n";
        return;
    }
    auto F_space = space_input(o, o.other_space ? o.other_space : o.space, "other-space");
    auto F = subspace_input(o.other, F_space);
    auto r = isometric_eq(D, F);
    out.payload = to_json(r);
    out.text << "left:  " << show(r.left) << "\nright: " << show(r.right) << "\n"
             << "isometric: " << yes(r.isometric) << "\n";
    if (r.obstruction) out.text << "obstruction: coset " << r.obstruction->to_string() << "\n";
    if (r.witness)
        for (const auto& x : r.witness->base()) out.text << "  " << show(x) << " -> " << show(r.witness->apply(x)) << "\n";
}

void cmd_balls(const Options& o, Output& out) {
    auto r = shrinking_balls(o.balls, default_ball_stream(o.balls + 1, static_cast<Prime>(o.prime.value_or(2))));
    out.kind = "shrinking-balls";
    out.field = r.ambient.field();
    out.payload = to_json(r);
    for (std::size_t n = 0; n < r.balls.size(); ++n)
        out.text << "B" << n + 1 << ": radius " << show(r.balls[n].radius) << "\n";
    out.text << r.nesting_checks << " nesting checks, all passed: " << yes(r.all_passed) << "\n";
}

int cmd_verify(const Options& o) {
    auto rep = run_suite(o.suite, o.seed, o.cases, o.threads);
    Json j = {{"tool", kToolName}, {"version", kToolVersion}, {"kind", "verify-report"}};
    Json body = to_json(rep);
    for (auto& [k, v] : body.items()) j[k] = v;
    if (o.report) {
        std::ofstream f(*o.report);
        if (!f) throw InvalidArgument("cannot write " + *o.report);
        f << j.dump(2) << "\n";
    }
    if (o.json) {
        std::cout << j.dump(2) << "\n";
    } else {
        auto line = [](const SuiteReport& r) {
            std::cout << r.suite << ": " << r.passed << "/" << r.passed + r.failed << " passed\n";
        };
        for (const auto& c : rep.children) line(c);
        line(rep);
    }
    return rep.failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact computations in non-archimedean normed spaces"};
    app.require_subcommand(1);
    Options o;

    app.add_option("--prime", o.prime, "residue prime p");
    app.add_option("--backend", o.backend, "padic or hahn");
    app.add_option("--tail-order", o.tail_order, "relative truncation order of Hahn series");
    app.add_option("--epsilon", o.epsilon, "rational in (0, 1)");
    app.add_option("--t", o.t, "magnitude in (0, 1]");
    app.add_option("--r", o.r, "coset representatives lie in (r, 1]");
    app.add_option("--s", o.s, "second weight of the test space (K^2, max(|a|, s|b|))");
    app.add_option("--seed", o.seed);
    app.add_option("--cases", o.cases);
    app.add_option("--threads", o.threads, "0 uses every core");
    app.add_flag("--json", o.json, "print a machine-readable certificate");
    app.add_option("--space", o.space, "space file");
    app.add_option("--dim", o.dim, "standard space of this dimension instead of --space");
    app.add_option("--vectors", o.vectors, "vectors file");
    app.add_option("--subspace", o.subspace, "subspace file");
    app.add_option("--map", o.map, "linear map file");
    app.add_option("--j", o.j, "map X -> G");
    app.add_option("--f", o.f, "map Y -> G");
    app.add_option("--x", o.x, "subspace X");
    app.add_option("--zs", o.zs, "perturbed vectors file");
    app.add_option("--other", o.other, "second subspace for classify");
    app.add_option("--other-space", o.other_space, "ambient of --other");
    app.add_option("--mode", o.mode, "direct or approx-then-patch");
    app.add_option("--suite", o.suite);
    app.add_option("--report", o.report, "write the verify report here");
    app.add_option("--n", o.balls, "number of balls");

    using Handler = std::function<void(const Options&, Output&)>;
    Handler handler;
    bool verify = false;
    auto sub = [&](CLI::App* parent, const char* name, const char* help, Handler h) {
        auto* s = parent->add_subcommand(name, help);
        s->fallthrough();
        s->callback([&handler, h] { handler = h; });
        return s;
    };
    sub(&app, "norm", "norms of vectors", cmd_norm);
    sub(&app, "orth", "orthogonal base of a span", cmd_orth);
    sub(&app, "dist", "distance of vectors to a subspace", cmd_dist);
    sub(&app, "defect", "orthogonality level t* of a set", cmd_defect);
    sub(&app, "extend-base", "extend a t-orthogonal set to a base", cmd_extend_base);
    sub(&app, "opnorm", "operator norm of a map", cmd_opnorm);
    sub(&app, "certify-isometry", "exact isometry check", cmd_certify_isometry);
    sub(&app, "eps-iso", "eps-isometry extending back over an embedding", cmd_eps_iso);
    sub(&app, "certify-gap", "nonexistence certificate for eps-isometries", cmd_certify_gap);
    sub(&app, "patch", "isometry agreeing with j from a close isometry f", cmd_patch);
    sub(&app, "split", "maximal orthogonal split of Y over X", cmd_split);
    sub(&app, "perturb-check", "orthogonality under small perturbations", cmd_perturb_check);
    sub(&app, "embed-eu", "embedding into the universal space", cmd_embed_eu);
    sub(&app, "extend", "isometric extension back into the stage", cmd_extend);
    sub(&app, "classify", "isometry class fingerprint or comparison", cmd_classify);
    auto* demo = app.add_subcommand("demo", "demonstrations");
    demo->fallthrough();
    demo->require_subcommand(1);
    sub(demo, "shrinking-balls", "nested balls with empty intersection", cmd_balls);
    auto* ver = app.add_subcommand("verify", "run property suites");
    ver->fallthrough();
    ver->callback([&] { verify = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        validate(o);
        if (verify) return cmd_verify(o);
        Output out;
        handler(o, out);
        if (o.json)
            std::cout << certificate(out.kind, out.field, out.payload).dump(2) << "\n";
        else
            std::cout << out.text.str();
        return 0;
    } catch (const ParseError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const DivisionByZero& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const PrecisionExhausted& e) {
        std::cerr << "precision exhausted: " << e.what() << "\n";
        return 3;
    } catch (const HypothesisViolation& e) {
        std::cerr << "hypothesis violated: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
