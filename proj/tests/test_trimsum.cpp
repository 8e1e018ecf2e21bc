#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "trimbirk/angle.hpp"
#include "trimbirk/error.hpp"
#include "trimbirk/trimsum.hpp"

using namespace trimbirk;
using namespace trimbirk::trimsum;
using observables::PowerObservable;
using orbit::RotationContext;

namespace {

Rational Q(long n, long d) { return Rational(n, d); }

struct Term {
    Rational value;
    u64 j;
};

// Exact values c1/y + c2/(1-y) at every orbit point, for rational c1, c2.
std::vector<Term> exact_terms(const RotationContext& ctx, const Rational& x, u64 N, const Rational& c1,
                              const Rational& c2) {
    std::vector<Term> out;
    const Rational a = ctx.alpha_proxy();
    for (u64 j = 0; j < N; ++j) {
        Rational y = x + Rational(Integer(static_cast<unsigned long>(j))) * a;
        y -= Rational(floor_of(y));
        y.canonicalize();
        Rational v(0);
        if (y != 0) {
            v = c1 / y;
            if (c2 != 0) v += c2 / (1 - y);
        }
        v.canonicalize();
        out.push_back({v, j});
    }
    return out;
}

// Brute force: sort every value and drop the k largest.
Rational oracle_trimmed(std::vector<Term> terms, u64 k, std::vector<u64>* removed) {
    std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.value > b.value; });
    Rational s(0);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i < k) {
            if (removed) removed->push_back(terms[i].j);
        } else {
            s += terms[i].value;
        }
    }
    return s;
}

contfrac::CoefficientStream pick_angle(std::mt19937_64& rng) {
    static const char* specs[] = {"golden", "silver", "digits:[1;2]", "digits:[3,1,4,1,5,9,2,6;7]",
                                  "rule:bounded(max=9;seed=5)", "surd:(-2+sqrt(7))/3"};
    return parse_angle(specs[rng() % 6]);
}

Rational random_x(std::mt19937_64& rng) {
    const long den = 1 + static_cast<long>(rng() % 5000);
    return Q(static_cast<long>(rng() % den), den);
}

bool close(double a, double b, double rel = 1e-12) { return std::fabs(a - b) <= rel * std::max(1.0, std::fabs(b)); }

}  // namespace

TEST_CASE("birkhoff and trimmed sums on the 3/5 proxy") {
    const auto ctx = RotationContext::rational(3, 5);
    const PowerObservable f(1.0, 1.0, 0.0);
    const double expect = 10.0 + 10.0 / 7 + 10.0 / 3 + 10.0 / 9 + 2.0;
    CHECK(birkhoff_sum(ctx, f, Q(1, 10), 5) == doctest::Approx(expect).epsilon(1e-15));
    CHECK(expect == doctest::Approx(17.873).epsilon(1e-4));

    const auto r = trimmed_sum(ctx, f, Q(1, 10), 5, 1);
    CHECK(r.trimmed == doctest::Approx(expect - 10.0).epsilon(1e-15));
    REQUIRE(r.removed.size() == 1);
    CHECK(r.removed[0].j == 0);
    CHECK(r.removed[0].value == 10.0);
    CHECK(r.total == doctest::Approx(expect).epsilon(1e-15));

    CHECK(birkhoff_sum(ctx, f, Q(1, 10), 1) == 10.0);
    CHECK(birkhoff_sum(ctx, f, Q(0, 1), 5) == doctest::Approx(5.0 / 3 + 5.0 / 1 + 5.0 / 4 + 5.0 / 2));
}

TEST_CASE("trimming endpoints") {
    const auto ctx = RotationContext::make(parse_angle("golden"), 1000);
    const PowerObservable f(1.0, 1.0, 0.0);
    const Rational x = Q(1, 7);
    const auto r0 = trimmed_sum(ctx, f, x, 500, 0);
    CHECK(r0.trimmed == r0.total);
    CHECK(r0.trimmed == birkhoff_sum(ctx, f, x, 500));
    CHECK(trimmed_sum(ctx, f, x, 500, 500).trimmed == 0.0);
    const auto over = trimmed_sum(ctx, f, x, 20, 30);
    CHECK(over.trimmed == 0.0);
    CHECK(over.removed.size() == 20);
    CHECK_THROWS_AS(trimmed_sum(ctx, f, x, 2000000000ULL, 1), RangeError);
}

TEST_CASE("trimmed sum equals brute-force removal on 1000 instances") {
    std::mt19937_64 rng(20261019);
    int checked = 0;
    for (int inst = 0; inst < 1000; ++inst) {
        const auto ctx = RotationContext::make(pick_angle(rng), 200);
        const u64 N = 1 + rng() % 200;
        const u64 k = rng() % (N + 2);
        const Rational x = random_x(rng);
        const bool two_sided = inst % 3 == 0;
        const Rational c1 = Q(1 + static_cast<long>(rng() % 4), 1 + static_cast<long>(rng() % 3));
        const Rational c2 = two_sided ? Q(1 + static_cast<long>(rng() % 4), 2) : Q(0, 1);
        const PowerObservable f(1.0, to_double(c1), to_double(c2));

        std::vector<u64> removed;
        const Rational exact = oracle_trimmed(exact_terms(ctx, x, N, c1, c2), k, &removed);
        const auto r = trimmed_sum(ctx, f, x, N, k);
        INFO("instance " << inst << " N=" << N << " k=" << k << " x=" << to_string(x));
        CHECK(close(r.trimmed, to_double(exact)));
        std::vector<u64> got;
        for (const auto& t : r.removed) got.push_back(t.j);
        if (k >= N) {
            std::sort(got.begin(), got.end());
            std::sort(removed.begin(), removed.end());
        }
        if (!two_sided) CHECK(got == removed);
        // two-sided values may coincide, only the removed values must agree
        CHECK(close(r.removed_sum(), r.total - r.trimmed, 1e-11));
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("removed values are the k smallest positive positions, descending") {
    const auto ctx = RotationContext::make(parse_angle("digits:[1;2]"), 5000);
    const PowerObservable f(1.5, 2.0, 0.0);
    const Rational x = Q(13, 997);
    const auto r = trimmed_sum(ctx, f, x, 4000, 25);
    const auto pts = orbit::k_smallest_positive(ctx, x, 4000, 25);
    REQUIRE(r.removed.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(r.removed[i].j == pts[i].index);
        if (i > 0) CHECK(r.removed[i].value <= r.removed[i - 1].value);
    }
}

TEST_CASE("monotone in k") {
    std::mt19937_64 rng(7);
    for (int inst = 0; inst < 100; ++inst) {
        const auto ctx = RotationContext::make(pick_angle(rng), 3000);
        const u64 N = 1 + rng() % 3000;
        const Rational x = random_x(rng);
        const PowerObservable f(inst % 2 ? 2.0 : 1.0, 1.0, inst % 4 == 0 ? 0.5 : 0.0);
        double prev = trimmed_sum(ctx, f, x, N, 0).trimmed;
        for (u64 k = 1; k <= std::min<u64>(N, 12); ++k) {
            const double cur = trimmed_sum(ctx, f, x, N, k).trimmed;
            CHECK(cur <= prev);
            prev = cur;
        }
    }
}

TEST_CASE("shift coupling with the mirrored angle") {
    std::mt19937_64 rng(99);
    for (int inst = 0; inst < 200; ++inst) {
        const auto ctx = RotationContext::make(pick_angle(rng), 400);
        const auto mir = ctx.mirrored();
        const u64 N = 1 + rng() % 400;
        const u64 k = rng() % (N + 1);
        const Rational x = random_x(rng);
        const PowerObservable f(1.0, 1.0, inst % 2 ? 0.0 : 1.0);
        const Rational y = orbit::position(ctx, x, Integer(static_cast<unsigned long>(N - 1))).position();
        const auto a = trimmed_sum(ctx, f, x, N, k);
        const auto b = trimmed_sum(mir, f, y, N, k);
        CHECK(close(a.trimmed, b.trimmed, 1e-13));
        REQUIRE(a.removed.size() == b.removed.size());
        for (std::size_t i = 0; i < a.removed.size(); ++i) CHECK(a.removed[i].value == b.removed[i].value);

        // exact form of the same statement for 1/x
        if (inst % 2) {
            const Rational ea = oracle_trimmed(exact_terms(ctx, x, N, Q(1, 1), Q(0, 1)), k, nullptr);
            const Rational eb = oracle_trimmed(exact_terms(mir, y, N, Q(1, 1), Q(0, 1)), k, nullptr);
            CHECK(ea == eb);
        }
    }
}

TEST_CASE("streaming profile agrees with per-N sums") {
    std::mt19937_64 rng(3);
    const auto ctx = RotationContext::make(parse_angle("golden"), 200000);
    const PowerObservable f(1.0, 1.0, 0.0);
    const auto k = diophantine::TrimmingSequence::parse("log");
    const observables::Normalizer d;
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<u64> grid;
        for (int i = 0; i < 20; ++i) grid.push_back(1 + rng() % 200000);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        const Rational x = random_x(rng);
        const auto prof = trimmed_profile(ctx, f, x, grid, k, d);
        REQUIRE(prof.size() == grid.size());
        for (const auto& p : prof) {
            const auto r = trimmed_sum(ctx, f, x, p.N, p.k);
            CHECK(p.k == std::min(k.raw(p.N), p.N));
            CHECK(close(p.trimmed, r.trimmed, 1e-13));
            CHECK(p.total == r.total);
            if (p.N > 1) CHECK(p.ratio == doctest::Approx(p.trimmed / (p.N * std::log(double(p.N)))));
        }
    }
    const observables::Normalizer self{observables::Normalizer::Kind::constant, 1.0, 1.0};
    CHECK_THROWS_AS(trimmed_profile(ctx, f, Q(1, 3), {10, 5}, k, self), ValidationError);
}

TEST_CASE("Denjoy-Koksma with a negative control") {
    std::mt19937_64 rng(11);
    const auto ctx = RotationContext::make(parse_angle("golden"), 1000);
    const auto& t = ctx.table();
    const auto ft = observables::truncate(PowerObservable(1.0, 1.0, 0.0), Rational(Integer(1), t.q(10) + t.q(9)));
    int half_failed = 0;
    int quarter_failed = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Rational x = random_x(rng);
        const auto c = denjoy_koksma_check(ctx, ft, x, 10);
        CHECK(c.pass);
        worst = std::max(worst, c.lhs / c.bound);
        if (!denjoy_koksma_check(ctx, ft, x, 10, 0.5).pass) ++half_failed;
        if (!denjoy_koksma_check(ctx, ft, x, 10, 0.25).pass) ++quarter_failed;
    }
    // the worst case over x sits near 0.377 Var, so Var/2 is never violated
    CHECK(half_failed == 0);
    CHECK(worst < 0.38);
    CHECK(quarter_failed > 0);

    const auto trivial = observables::truncate(PowerObservable(1.0, 1.0, 0.0), Q(99, 100));
    CHECK(denjoy_koksma_check(ctx, trivial, Q(1, 2), 10).pass);
}

TEST_CASE("errlem sandwich and the strong1/x digit bound") {
    std::mt19937_64 rng(5);
    for (const char* spec : {"golden", "silver", "digits:[1,3,1,7,2;1,4]"}) {
        const auto ctx = RotationContext::make(parse_angle(spec), 100000);
        const auto& t = ctx.table();
        for (int i = 0; i < 40; ++i) {
            const Rational x = random_x(rng);
            const u64 N = 1 + rng() % 100000;
            const auto s = sandwich_errlem(ctx, x, N);
            INFO(spec << " N=" << N << " x=" << to_string(x));
            CHECK(s.pass());
            CHECK(strong1xlembn_check(ctx, x, N).pass);
        }
        const u64 q8 = t.q(8).get_ui();
        const u64 q9 = t.q(9).get_ui();
        for (int i = 0; i < 20; ++i) CHECK(sandwich_errlem(ctx, random_x(rng), q8 + rng() % (q9 - q8)).pass());
        CHECK(sandwich_errlem(ctx, Q(1, 3), 1).pass());
    }
}

TEST_CASE("q_n bound and its negative control") {
    std::mt19937_64 rng(17);
    const auto ctx = RotationContext::make(parse_angle("silver"), 100000);
    int control_failures = 0;
    for (std::size_t n = 2; ctx.table().q(n) <= 100000; ++n) {
        for (int i = 0; i < 10; ++i) {
            const Rational x = random_x(rng);
            CHECK(qn_bound_check(ctx, x, n).pass);
            if (!qn_bound_check(ctx, x, n, 0.5 / 7.0).pass) ++control_failures;
        }
    }
    CHECK(control_failures > 0);
}

TEST_CASE("cluster gap bound") {
    // q_3 = 1009 with a window digit after it, so alpha - p_3/q_3 > 0
    const auto ctx = RotationContext::make(parse_angle("rule:window(lower=q^2;upper=inf;seed=[2,504])"), 1018082);
    const auto& t = ctx.table();
    const std::size_t n = 3;
    REQUIRE(t.q(n) == 1009);
    const u64 qn = 1009;
    const u64 qn1 = t.q(n + 1).get_ui();
    CHECK(qn1 >= qn * qn);

    std::mt19937_64 rng(23);
    int verdicts = 0;
    for (int i = 0; i < 30; ++i) {
        // x below delta_{n+1} makes x itself the first-q_n minimum
        const Rational x(Integer(1 + static_cast<long>(rng() % 9)), Integer(10 * qn1));
        const u64 N = 3 * qn + rng() % (qn1 - 3 * qn);
        const u64 k = 1 + rng() % 5;
        const auto rep = cluster_gap_bound(ctx, x, n, N, k);
        INFO("N=" << N << " k=" << k << " note=" << rep.note);
        CHECK(rep.cluster_size == (N % qn != 0 ? rep.b + 1 : rep.b));
        REQUIRE(rep.verdict.has_value());
        CHECK(*rep.verdict);
        CHECK(rep.measured >= rep.harmonic_bound);
        CHECK(rep.harmonic_bound > 0.0);
        ++verdicts;
    }
    CHECK(verdicts == 30);

    // x = alpha puts x_min at index q_n - 1, so only b_n cluster points fit
    const auto at_alpha = cluster_gap_bound(ctx, ctx.alpha_proxy(), n, 7 * qn + 5, 1);
    CHECK(at_alpha.cluster_size == at_alpha.b);
    REQUIRE(at_alpha.verdict.has_value());
    CHECK(*at_alpha.verdict);

    const auto golden = RotationContext::make(parse_angle("golden"), 10000);
    const auto g = cluster_gap_bound(golden, Q(1, 3), 15, 700, 1);
    CHECK(!g.verdict);
    CHECK(g.note.find("degenerate") != std::string::npos);
    CHECK_THROWS_AS(cluster_gap_bound(golden, Q(1, 3), 15, 5000, 1), PreconditionError);
}
