// Acceptance gate: one PASS/FAIL line per criterion, each under its time limit.

#include "nagur/gurarii.hpp"
#include "nagur/verify.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using namespace nagur;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool ok = false;
    std::string detail;
};

Outcome suite(const std::string& name, std::size_t cases, std::uint64_t seed = kSeed) {
    auto r = run_suite(name, seed, cases);
    std::string detail = name + " " + std::to_string(r.passed) + "/" + std::to_string(r.cases);
    if (r.failed) {
        for (const auto& v : r.verdicts)
            if (!v.pass) {
                detail += ", first failure #" + std::to_string(v.index) + ": " + v.detail;
                break;
            }
    }
    return {r.failed == 0 && r.passed == cases, detail};
}

Magnitude mag(const Rational& q) { return Magnitude::from_rational(q); }

Outcome gap_dichotomy() {
    auto E = WeightedSpace::standard(FieldDescriptor::padic(2), 1);
    auto cert = nonexistence_certificate(E, mag(Rational(3, 4)), Rational(1, 4));
    if (cert.gap.lo != Magnitude::prime_power(2, -1) || cert.gap.hi != Magnitude::one())
        return {false, "gap is (" + cert.gap.lo.to_string() + ", " + cert.gap.hi.to_string() + ")"};
    if (cert.lower != mag(Rational(9, 16)) || cert.upper != mag(Rational(15, 16)))
        return {false, "interval is not [9/16, 15/16]"};
    if (!(cert.gap.lo < cert.lower && cert.upper < cert.gap.hi) || !cert.refutes_constructive)
        return {false, "interval not inside the gap"};
    auto recheck = recheck_gap_certificate(cert);
    if (!recheck.ok) return {false, "re-check: " + recheck.reason};
    Rng rng = InstanceSeed{kSeed, 0}.engine();
    auto adv = run_adversary(cert, rng, 1000);
    if (adv.refuted != 1000) return {false, std::to_string(adv.refuted) + "/1000 adversaries refuted"};

    auto h = FieldDescriptor::hahn(2);
    Ambient A(WeightedSpace::standard(h, 2));
    Subspace X(A.stage(), {A.stage().unit(0)});
    WeightedSpace Y(h, {Magnitude::one(), mag(Rational(3, 4))});
    auto r = epsilon_isometry(A, LinearMap::on_base(X, Y, {Y.unit(0)}), Rational(1, 4));
    if (!r.bounds_hold || !r.retraction_exact || !certify_isometry(LinearMap::identity(X)).isometric)
        return {false, "Hahn request did not succeed"};
    return {true, "gap (2^-1, 1) contains [9/16, 15/16], 1000/1000 refuted, Hahn request succeeds"};
}

Outcome chains() {
    std::size_t requests = 0;
    for (auto f : {FieldDescriptor::padic(2), FieldDescriptor::hahn(2)}) {
        auto rep = run_disposition_chain(f, kSeed, 50);
        requests += rep.steps.size();
        if (!rep.all_certified || !rep.all_retractions || !rep.approximations_below_one || !rep.coherent)
            return {false, f.backend_name() + ": " + rep.failure};
        std::size_t approx = 0;
        for (const auto& s : rep.steps) approx += s.mode == DispositionMode::ApproxThenPatch;
        if (approx == 0) return {false, "no approx-then-patch request"};
    }
    return {requests == 100, std::to_string(requests) + " requests certified, earlier embeddings isometric"};
}

Outcome classification() {
    auto Q2 = FieldDescriptor::padic(2);
    for (std::size_t n = 2; n <= 6; ++n) {
        std::vector<Magnitude> ws(n, Magnitude::one());
        ws.back() = Magnitude::prime_power(2, Rational(1, 2));
        auto r = isometric_eq(Subspace::whole(WeightedSpace::standard(Q2, n)), Subspace::whole(WeightedSpace(Q2, ws)));
        if (r.isometric || !r.obstruction || !r.value_set_obstruction)
            return {false, "n = " + std::to_string(n) + " not distinguished"};
    }
    auto s = suite("izo-classify", 200);
    return {s.ok, "n = 2..6 distinguished, " + s.detail};
}

Outcome balls() {
    auto r = shrinking_balls(50);
    if (r.nesting_checks != 49 || !r.all_passed) return {false, std::to_string(r.nesting_checks) + " nesting checks"};
    Magnitude floor = Magnitude::prime_power(2, Rational(-1, 2));
    for (std::size_t n = 0; n < r.balls.size(); ++n) {
        const auto& rad = r.balls[n].radius;
        if (!(floor < rad) || Magnitude::one() < rad) return {false, "radius out of (2^-1/2, 1]"};
        if (n && !(rad < r.balls[n - 1].radius)) return {false, "radii not strictly decreasing"};
    }
    return {true, "49 nesting checks, radii strictly decreasing in (2^-1/2, 1]"};
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const Criterion criteria[] = {
        {1, "orthogonalization soundness", 60, [] { return suite("orth", 1000); }},
        {2, "oracle equivalence", 120, [] { return suite("oracle", 300); }},
        {3, "perturbation lemma", 30, [] { return suite("l-ort", 1000); }},
        {4, "eps-isometries on the Hahn backend", 300, [] { return suite("th-aud-pos", 200); }},
        {5, "gap certificate and dense counterpart", 60, gap_dichotomy},
        {6, "isometry patching", 120, [] { return suite("pro-iso", 200); }},
        {7, "disposition chains", 300, chains},
        {8, "isometry classification", 60, classification},
        {9, "shrinking balls", 10, balls},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = o.ok && secs < c.limit_seconds;
        if (o.ok && !pass) o.detail += ", over the time limit";
        failed += !pass;
        std::printf("%s [%d] %s: %s (%.1f s, limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.limit_seconds);
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
