#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "trimbirk/angle.hpp"
#include "trimbirk/diophantine.hpp"
#include "trimbirk/error.hpp"
#include "trimbirk/orbit.hpp"

using namespace trimbirk;
using namespace trimbirk::orbit;

namespace {

// Direct enumeration: positions (x + j p/q) mod 1 as exact rationals.
std::vector<std::pair<Rational, u64>> enumerate(const RotationContext& ctx, const Rational& x, u64 N) {
    std::vector<std::pair<Rational, u64>> out;
    const Rational a = ctx.alpha_proxy();
    for (u64 j = 0; j < N; ++j) {
        Rational y = x + Rational(Integer(static_cast<unsigned long>(j))) * a;
        y -= Rational(floor_of(y));
        y.canonicalize();
        out.emplace_back(y, j);
    }
    return out;
}

std::vector<u64> oracle_smallest(const RotationContext& ctx, const Rational& x, u64 N, u64 k) {
    auto pts = enumerate(ctx, x, N);
    pts.erase(std::remove_if(pts.begin(), pts.end(), [](const auto& p) { return p.first == 0; }), pts.end());
    std::sort(pts.begin(), pts.end());
    std::vector<u64> out;
    for (std::size_t i = 0; i < k && i < pts.size(); ++i) out.push_back(pts[i].second);
    return out;
}

std::vector<u64> indices(const std::vector<OrbitPoint>& pts) {
    std::vector<u64> out;
    for (const auto& p : pts) out.push_back(p.index);
    return out;
}

Rational random_grid_x(const RotationContext& ctx, std::mt19937_64& rng) {
    std::uniform_int_distribution<unsigned long> d(0, ~0UL);
    Integer a = Integer(d(rng)) * Integer(d(rng));
    return grid_point(ctx, a);
}

contfrac::CoefficientStream random_angle(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> kind(0, 2);
    switch (kind(rng)) {
        case 0: return parse_angle("golden");
        case 1: return parse_angle("rule:bounded(max=7;seed=" + std::to_string(rng() % 1000) + ")");
        default: {
            std::uniform_int_distribution<int> dd(1, 40);
            std::vector<Integer> head;
            for (int i = 0; i < 6; ++i) head.push_back(dd(rng));
            return contfrac::CoefficientStream::periodic(head, {Integer(1), Integer(2)});
        }
    }
}

}  // namespace

TEST_CASE("positions on the proxy 3/5") {
    const auto ctx = RotationContext::rational(3, 5);
    CHECK(position(ctx, Rational(1, 10), 2).position() == Rational(3, 10));
    CHECK(position(ctx, Rational(1, 10), 0).position() == Rational(1, 10));
    CHECK(position(ctx, Rational(0), 3).position() == Rational(4, 5));
    CHECK(position(ctx, Rational(3, 5), 1).signed_position() == Rational(1, 5));
    CHECK(position(ctx, Rational(0), 1).signed_position() == Rational(-2, 5));
}

TEST_CASE("k smallest positive points for the proxy 3/5") {
    const auto ctx = RotationContext::rational(3, 5);
    const Rational x(1, 10);
    auto one = k_smallest_positive(ctx, x, 5, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].position() == Rational(1, 10));
    CHECK(one[0].index == 0);

    auto two = k_smallest_positive(ctx, x, 5, 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0].position() == Rational(1, 10));
    CHECK(two[1].position() == Rational(3, 10));

    auto all = k_smallest_positive(ctx, x, 5, 5);
    REQUIRE(all.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(all[i].position() == Rational(2 * static_cast<long>(i) + 1, 10));
    CHECK(k_smallest_positive(ctx, x, 5, 0).empty());
    CHECK(x_min(ctx, x, 5).index == 0);
    CHECK(x_max(ctx, x, 5).position() == Rational(9, 10));
}

TEST_CASE("counting in intervals") {
    const auto ctx = RotationContext::rational(3, 5);
    const Rational x(1, 10);
    CHECK(count_in_interval(ctx, x, 5, Interval::left_open(0, Rational(1, 2))) == 3);
    CHECK(count_in_interval(ctx, x, 5, Interval::left_open(0, 1)) == 5);
    CHECK(count_in_interval(ctx, x, 5, Interval::open(Rational(1, 10), Rational(1, 2))) == 1);

    std::mt19937_64 rng(7);
    const auto golden = RotationContext::make(parse_angle("golden"), 5000);
    for (int trial = 0; trial < 200; ++trial) {
        const Rational y = random_grid_x(golden, rng);
        std::uniform_int_distribution<int> nd(1, 3000);
        const u64 N = nd(rng);
        Rational u(static_cast<long>(rng() % 1000), 1000), v(static_cast<long>(rng() % 1000), 1000);
        if (v < u) std::swap(u, v);
        const auto I = (rng() % 2) ? Interval::left_open(u, v) : Interval::right_open(u, v);
        Integer brute = 0;
        for (const auto& [pos, j] : enumerate(golden, y, N)) brute += I.contains(pos) ? 1 : 0;
        REQUIRE(count_in_interval(golden, y, N, I) == brute);
    }
}

TEST_CASE("golden orbit of 0 drops the zero point") {
    const auto ctx = RotationContext::make(parse_angle("golden"), 100);
    const auto pts = k_smallest_positive(ctx, Rational(0), 5, 1);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].index == 2);
    const auto fast = k_smallest_fast(ctx, Rational(0), 5, 1);
    CHECK(indices(fast.points) == indices(pts));
    CHECK(to_double(pts[0].position()) == doctest::Approx(0.2360679775).epsilon(1e-9));
}

TEST_CASE("fast selection agrees with the heap scan") {
    std::mt19937_64 rng(2024);
    int fallbacks = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto stream = random_angle(rng);
        const auto ctx = RotationContext::make(stream, 10000);
        std::uniform_int_distribution<u64> nd(1, 10000);
        const u64 N = nd(rng);
        const u64 k = std::min<u64>(N, rng() % 51);
        Rational x = random_grid_x(ctx, rng);
        if (trial % 10 == 0) x = Rational(0);
        if (trial % 10 == 1) x = Rational(static_cast<long>(rng() % 97), 97);
        const auto heap = indices(k_smallest_positive(ctx, x, N, k));
        const auto fast = k_smallest_fast(ctx, x, N, k);
        fallbacks += fast.used_fallback ? 1 : 0;
        REQUIRE(indices(fast.points) == heap);
        if (trial % 50 == 0) REQUIRE(heap == oracle_smallest(ctx, x, N, k));
    }
    MESSAGE("fast path fallbacks: " << fallbacks);
}

TEST_CASE("guard levels") {
    const auto golden = RotationContext::make(parse_angle("golden"), 10000);
    // F_49 = 7778742049 < 2^20 * 10^4 <= F_50 = 12586269025.
    CHECK(golden.guard_level() == 50);
    CHECK(golden.q() == Integer("12586269025"));
    CHECK(golden.max_valid_N() >= 10000);
    CHECK(golden.table().q(golden.guard_level() - 2) >= 10000);
    CHECK(golden.p() * golden.table().q(49) - golden.q() * golden.table().p(49) != 0);
    CHECK_THROWS_AS(golden.require_valid(golden.max_valid_N() + 1), RangeError);

    CHECK_THROWS_AS(RotationContext::make(parse_angle("digits:[1,2,2]"), 10), LengthError);

    // Superquadratic growth: N_budget = q_{n+1} needs only M = n + 3.
    const auto window = diophantine::GrowthWindow::parse("q^(1+g)", "inf", {{"g", Rational(1)}});
    const auto liouville = diophantine::construct_alpha_in_window(window, {Integer(1), Integer(1008)});
    const auto t = contfrac::convergents(liouville, 7);
    REQUIRE(t.q(3) == 1009);
    const auto ctx = RotationContext::make(liouville, t.q(4));
    CHECK(ctx.guard_level() == 6);
    CHECK(t.q(6) >= default_safety() * t.q(4));
}

TEST_CASE("mirrored context") {
    for (const char* spec : {"golden", "silver", "digits:[3,1,4;1,5]"}) {
        const auto ctx = RotationContext::make(parse_angle(spec), 2000);
        const auto m = ctx.mirrored();
        CHECK(m.alpha_proxy() == 1 - ctx.alpha_proxy());
        CHECK(m.max_valid_N() >= 2000);
    }
}

TEST_CASE("at most one orbit point near 0 in a window of length q_n") {
    std::mt19937_64 rng(11);
    for (const char* spec : {"golden", "silver", "rule:bounded(max=9;seed=3)", "rule:e_minus_2()"}) {
        const auto ctx = RotationContext::make(parse_angle(spec), 20000);
        const auto& t = ctx.table();
        for (int trial = 0; trial < 250; ++trial) {
            const Rational x = random_grid_x(ctx, rng);
            const Rational shifted = x + ctx.alpha_proxy() - Rational(floor_of(x + ctx.alpha_proxy()));
            for (std::size_t n = 2; t.q(n) <= 20000; ++n) {
                const auto I = Interval::right_open(0, Rational(Integer(1), t.q(n) + t.q(n - 1)));
                REQUIRE(count_in_interval(ctx, shifted, t.q(n).get_ui(), I) <= 1);
            }
        }
    }
}

TEST_CASE("distinct positions, minimum gap and three distances") {
    std::mt19937_64 rng(5);
    for (const char* spec : {"golden", "rule:bounded(max=30;seed=9)", "surd:(-3+1*sqrt(13))/2"}) {
        const auto ctx = RotationContext::make(parse_angle(spec), 5000);
        const auto& t = ctx.table();
        for (int trial = 0; trial < 20; ++trial) {
            const u64 N = 2 + rng() % 4999;
            const Rational x = random_grid_x(ctx, rng);
            auto pts = enumerate(ctx, x, N);
            std::sort(pts.begin(), pts.end());
            std::set<Rational> gaps;
            Rational min_gap = 1;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const Rational next = i + 1 < pts.size() ? pts[i + 1].first : pts[0].first + 1;
                const Rational g = next - pts[i].first;
                REQUIRE(g > 0);
                gaps.insert(g);
                min_gap = std::min(min_gap, g);
            }
            CHECK(gaps.size() <= 3);
            const std::size_t n = t.level_of(Integer(static_cast<unsigned long>(N)));
            CHECK(min_gap >= ctx.deltas()[n + 1].rational_part());
        }
    }
}

TEST_CASE("selection is stable when the proxy is deepened") {
    std::mt19937_64 rng(99);
    for (const char* spec : {"golden", "rule:bounded(max=4;seed=17)"}) {
        const auto shallow = RotationContext::make(parse_angle(spec), 3000);
        const auto deep = RotationContext::make(parse_angle(spec), 3000, Integer(1) << 60);
        REQUIRE(deep.guard_level() > shallow.guard_level());
        for (int trial = 0; trial < 50; ++trial) {
            // The same real x, represented on the shallow grid.
            const Rational x = random_grid_x(shallow, rng);
            const u64 N = 1 + rng() % 3000;
            const u64 k = std::min<u64>(N, 1 + rng() % 20);
            CHECK(indices(k_smallest_positive(shallow, x, N, k)) == indices(k_smallest_positive(deep, x, N, k)));
        }
    }
}

TEST_CASE("j1 coincidence: hypothesis implies conclusion") {
    std::mt19937_64 rng(31);
    long hypotheses = 0, violations = 0, samples = 0;
    for (const char* spec : {"golden", "rule:bounded(max=6;seed=2)", "rule:e_minus_2()", "digits:[1,1,8;2,1,12]"}) {
        const auto ctx = RotationContext::make(parse_angle(spec), 4000);
        const auto& t = ctx.table();
        for (int trial = 0; trial < 2500; ++trial) {
            const Rational x = random_grid_x(ctx, rng);
            const u64 N = 2 + rng() % 3999;
            const auto r = j1_coincidence(ctx, x, N);
            ++samples;
            if (N == t.q(r.level)) CHECK(r.conclusion_holds);
            if (r.hypothesis_holds) {
                ++hypotheses;
                if (!r.conclusion_holds) ++violations;
            }
        }
    }
    MESSAGE("samples " << samples << ", hypothesis held " << hypotheses);
    CHECK(samples == 10000);
    CHECK(hypotheses > 0);
    CHECK(violations == 0);
}

TEST_CASE("j1 hypothesis true for an x placed in the preimage window") {
    const auto ctx = RotationContext::make(parse_angle("golden"), 5000);
    const auto& t = ctx.table();
    const std::size_t n = 15;  // odd level: alpha - p_n/q_n > 0
    const u64 qn = t.q(n).get_ui();
    const u64 N = qn + qn / 2;
    REQUIRE(N < t.q(n + 1));
    // For odd n the point nearest 1 from below is q_{n-1} alpha at 1 - delta_n.
    // Shifting by t < delta_n keeps the ordering and leaves the top point at
    // distance delta_n - t from 1, which is >= b_n delta_{n+1} for the t below.
    const Rational dn = ctx.deltas()[n].rational_part();
    const Rational dn1 = ctx.deltas()[n + 1].rational_part();
    const Integer bn = Integer(static_cast<unsigned long>(N)) / t.q(n);
    const Rational x = (dn - bn * dn1) / 2;
    REQUIRE(x > 0);
    const auto r = j1_coincidence(ctx, x, N);
    CHECK(r.sign_positive);
    CHECK(r.hypothesis_holds);
    CHECK(r.conclusion_holds);
}

TEST_CASE("floor sum against direct summation") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 500; ++trial) {
        const long n = rng() % 200, m = 1 + rng() % 50, a = rng() % 100, b = rng() % 100;
        long brute = 0;
        for (long i = 0; i < n; ++i) brute += (a * i + b) / m;
        REQUIRE(floor_sum(n, m, a, b) == brute);
    }
}

TEST_CASE("fingerprint depends on digits and guard level") {
    const std::vector<Integer> d{1, 2, 3};
    CHECK(fingerprint(d, 5).size() == 16);
    CHECK(fingerprint(d, 5) == fingerprint(d, 5));
    CHECK(fingerprint(d, 5) != fingerprint(d, 6));
    CHECK(fingerprint(d, 5) != fingerprint({1, 2, 4}, 5));
}
