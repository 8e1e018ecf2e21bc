#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "trimbirk/angle.hpp"
#include "trimbirk/error.hpp"
#include "trimbirk/experiments.hpp"

using namespace trimbirk;
using namespace trimbirk::experiments;
using orbit::RotationContext;

namespace {

const std::string window_spec = "rule:window(lower=q^2;upper=inf;seed=[2,504])";

RotationContext window_ctx() { return RotationContext::make(parse_angle(window_spec), 1018082); }

}  // namespace

TEST_CASE("stratified design") {
    const auto ctx = RotationContext::make(parse_angle("golden"), 1000);
    const auto d = SampleDesign::make(10, 0);
    CHECK(d.offset == Rational(1, 2));
    const auto xs = d.points(ctx);
    REQUIRE(xs.size() == 10);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(xs[i] >= Rational(Integer(static_cast<unsigned long>(i)), 10));
        CHECK(xs[i] < Rational(Integer(static_cast<unsigned long>(i + 1)), 10));
        CHECK(Rational(xs[i] * Rational(ctx.q())).get_den() == 1);
    }
    const auto a = SampleDesign::make(10, 42);
    const auto b = SampleDesign::make(10, 42);
    CHECK(a.offset == b.offset);
    CHECK(a.offset != SampleDesign::make(10, 43).offset);
    CHECK_THROWS_AS(SampleDesign::make(0, 1), ValidationError);
}

TEST_CASE("law runs") {
    const auto ctx = RotationContext::make(parse_angle("golden"), 100000);
    LawConfig c;
    c.trim = diophantine::TrimmingSequence::constant(1);
    c.grid = {1000, 10000, 100000};
    c.design = SampleDesign::make(20, 0);
    c.epsilons = {0.25, std::numeric_limits<double>::infinity()};
    const auto r = strong_law_run(ctx, "golden", c);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[2].max_deviation < r.rows[0].max_deviation);
    for (const auto& row : r.rows) {
        CHECK(row.ratios.size() == 20);
        CHECK(row.lambda_hat[1] == 0.0);
        CHECK(row.lambda_hat[0] >= 0.0);
        CHECK(row.lambda_hat[0] <= 1.0);
    }

    // self-normalized: d_N = the trimmed value of one sample
    LawConfig self = c;
    self.grid = {5000};
    self.design = SampleDesign::make(1, 0);
    const auto x0 = self.design.points(ctx)[0];
    const double s = trimsum::trimmed_sum(ctx, c.obs, x0, 5000, 1).trimmed;
    self.d = observables::Normalizer{observables::Normalizer::Kind::constant, 1.0, s};
    CHECK(strong_law_run(ctx, "golden", self).rows[0].ratios[0] == 1.0);

    // determinism
    const auto again = strong_law_run(ctx, "golden", c);
    for (std::size_t g = 0; g < r.rows.size(); ++g) CHECK(again.rows[g].ratios == r.rows[g].ratios);

    LawConfig big = c;
    big.budget = 1000;
    CHECK_THROWS_AS(weak_law_run(ctx, "golden", big), BudgetError);
    LawConfig bad = c;
    bad.grid = {10, 5};
    CHECK_THROWS_AS(weak_law_run(ctx, "golden", bad), ValidationError);
}

TEST_CASE("weak law: golden shrinks, Liouville stays away from 0") {
    const auto golden = RotationContext::make(parse_angle("golden"), 100000);
    LawConfig c;
    c.grid = {1000, 100000};
    c.design = SampleDesign::make(200, 0);
    c.epsilons = {0.25};
    const auto g = weak_law_run(golden, "golden", c);
    CHECK(g.rows[1].lambda_hat[0] < g.rows[0].lambda_hat[0]);

    const std::string ls = "rule:seq1x(l=zero)";
    const auto liou = RotationContext::make(parse_angle(ls), 538782);
    REQUIRE(liou.table().q(6) == 538783);
    c.grid = {2156};
    c.trim = diophantine::TrimmingSequence::constant(1);
    const auto l = weak_law_run(liou, ls, c);
    CHECK(l.rows[0].lambda_hat[0] > 0.05);
}

TEST_CASE("interval unions") {
    IntervalUnion u;
    u.add_circle_arc(Rational(9, 10), Rational(1, 5));
    u.add_circle_arc(Rational(1, 2), Rational(1, 10));
    u.finish();
    CHECK(u.arcs.size() == 3);
    CHECK(u.measure() == Rational(3, 10));
    CHECK(u.contains(Rational(1, 20)));
    CHECK(u.contains(Rational(19, 20)));
    CHECK_FALSE(u.contains(Rational(1, 2)));
    CHECK_FALSE(u.contains(Rational(0)));
    CHECK(u.contains(Rational(11, 20)));
    IntervalUnion overlap;
    overlap.add_circle_arc(Rational(1, 10), Rational(1, 5));
    overlap.add_circle_arc(Rational(1, 5), Rational(1, 5));
    CHECK_THROWS_AS(overlap.finish(), ConstructionError);
}

TEST_CASE("oscillation_1x construction at q_n = 1009") {
    const auto ctx = window_ctx();
    Osc1xConfig c;
    c.n = 3;
    c.samples = 50;
    const auto r = oscillation_1x(ctx, window_spec, c);
    CHECK_FALSE(r.mirrored);
    CHECK(r.q_n == 1009);
    CHECK(r.q_next >= Integer(1009) * 1009);
    CHECK(r.N == 4073);
    CHECK(r.k_max == 31);
    CHECK(r.failed_hypotheses.empty());
    CHECK(r.measure_A == Rational(1, 1000));
    CHECK(r.measure_B == Rational(1, 1000));
    CHECK(r.A.arcs.size() >= 1009);
    for (const auto& s : r.samples_A) CHECK(s.member);
    for (const auto& s : r.samples_B) CHECK(s.member);
    // B stays below its threshold for every k, and A is above its threshold
    // untrimmed; with k >= 1 the A sums drop far below gamma/4 q_{n+1} ln q_n
    CHECK(r.violations_B == 0);
    REQUIRE(r.largest_k_all_A.has_value());
    CHECK(*r.largest_k_all_A == 0);
    for (const auto& s : r.samples_A) {
        for (std::size_t k = 1; k < s.sums.size(); ++k) CHECK(s.sums[k] <= s.sums[k - 1]);
    }

    // the construction on the mirrored side
    const std::string ms = "rule:window(lower=q^2;upper=inf;seed=[1009])";
    const auto mctx = RotationContext::make(parse_angle(ms), 1018082);
    c.n = 2;
    const auto m = oscillation_1x(mctx, ms, c);
    CHECK(m.mirrored);
    CHECK(m.measure_A == Rational(1, 1000));
    CHECK(m.violations_B == 0);
    REQUIRE_FALSE(m.notes.empty());
    CHECK(m.notes.back() == "mirror coupling verified on 4 samples");

    // hypotheses
    const auto liou = RotationContext::make(parse_angle("rule:seq1x(l=zero)"), 538782);
    Osc1xConfig l;
    l.n = 5;
    CHECK_THROWS_AS(oscillation_1x(liou, "seq1x", l), PreconditionError);
    l.require_hypotheses = false;
    l.samples = 20;
    const auto lr = oscillation_1x(liou, "seq1x", l);
    REQUIRE(lr.failed_hypotheses.size() == 1);
    CHECK(lr.failed_hypotheses[0] == "q_n^gamma > 1000/gamma");
    CHECK_FALSE(lr.pass);
    l.gamma = Rational(3, 2);
    CHECK_THROWS_AS(oscillation_1x(liou, "seq1x", l), ValidationError);
}

TEST_CASE("oscillation_beta") {
    const auto ctx = window_ctx();
    OscBetaConfig c;
    c.n = 3;
    c.samples = 60;
    c.N = 20 * 1009;
    c.k_hat = 2;
    const auto r = oscillation_beta(ctx, window_spec, c);
    CHECK(r.k == 40);
    CHECK(r.measure_A_prime >= r.measure_floor);
    CHECK(r.gap > 0.0);
    CHECK(r.count_A + r.count_B == 60);
    CHECK(r.fitted_c > 0.0);

    OscBetaConfig wide = c;
    wide.k_hat = 16;
    const auto w = oscillation_beta(ctx, window_spec, wide);
    CHECK(w.gap < r.gap);

    OscBetaConfig edge = c;
    edge.epsilon = Rational(1, 100);
    CHECK_THROWS_AS(oscillation_beta(ctx, window_spec, edge), PreconditionError);
    OscBetaConfig frac = c;
    frac.k_hat = Rational(1, 3);
    CHECK_THROWS_AS(oscillation_beta(ctx, window_spec, frac), PreconditionError);
    OscBetaConfig late = c;
    late.N = 1018000;
    CHECK_THROWS_AS(oscillation_beta(ctx, window_spec, late), PreconditionError);
}

TEST_CASE("point_osc on the generalized scale") {
    const std::string ps = "rule:window(lower=q*ln(q)*log2(q);upper=q*ln(q)^2;seed=[1,2,3,1,4,2,5])";
    const auto ctx = RotationContext::make(parse_angle(ps), 2000000);
    const auto& t = ctx.table();
    REQUIRE(t.q(9) == 18065);
    PointOscConfig c;
    c.n = 9;
    c.x = ctx.alpha_proxy();
    c.N = static_cast<u64>(std::ceil(to_double(t.q(10)) / log_of(t.q(9))));
    const auto r = point_osc(ctx, ps, c);
    CHECK(r.generalized_scale);
    CHECK(r.failed_hypotheses.empty());
    CHECK(r.cluster.epsilon < Rational(Integer(1), t.q(10)));
    REQUIRE(r.verdict.has_value());
    CHECK(*r.verdict);
    CHECK(r.cluster.measured >= r.cluster.harmonic_bound);

    PointOscConfig far = c;
    far.x = Rational(1, 2);
    const auto f = point_osc(ctx, ps, far);
    CHECK_FALSE(f.verdict.has_value());

    PointOscConfig literal = c;
    literal.N.reset();
    CHECK_THROWS_AS(point_osc(ctx, ps, literal), PreconditionError);

    const auto golden = RotationContext::make(parse_angle("golden"), 100000);
    PointOscConfig g;
    g.n = 15;
    g.x = golden.alpha_proxy();
    g.N = 700;
    CHECK_FALSE(point_osc(golden, "golden", g).verdict.has_value());
}

TEST_CASE("q_n bound suite") {
    for (const char* spec : {"golden", "silver", "rule:e_minus_2()"}) {
        const auto ctx = RotationContext::make(parse_angle(spec), 100000);
        const auto s = qn_bound_suite(ctx, spec, 100000, SampleDesign::make(30, 1));
        CHECK(s.failures.empty());
        CHECK(s.rows.size() > 30);
        const auto neg = qn_bound_suite(ctx, spec, 100000, SampleDesign::make(30, 1), 0.5 / 7.0);
        CHECK_FALSE(neg.failures.empty());
    }
    const auto ctx = RotationContext::make(parse_angle("golden"), 1000);
    CHECK_THROWS_AS(qn_bound_suite(ctx, "golden", 1000, SampleDesign::make(1000, 1), 1.0, 1000), BudgetError);
}

TEST_CASE("logprop trajectory") {
    const auto golden = RotationContext::make(parse_angle("golden"), 1000000);
    const auto& t = golden.table();
    std::vector<Integer> grid{t.q(10), t.q(20), Integer(1000), Integer(999999)};
    const auto g = logprop_trajectory(t, grid);
    CHECK(g[0].ratio == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g[1].ratio == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::fabs(g[3].ratio - 1.0) < 0.1);

    const auto liou = RotationContext::make(parse_angle("rule:seq1x(l=zero)"), 538782);
    const auto l = logprop_trajectory(liou.table(), {Integer(538782)});
    bool saw = false;
    for (const auto& p : l) {
        if (p.witness && p.level == 5) {
            saw = true;
            // a_5 q_5 with q_6 > q_5^2: ratio near 2 = 1 + gamma/2 with gamma = 2
            CHECK(p.ratio > 1.9);
        }
    }
    CHECK(saw);
    CHECK_THROWS_AS(logprop_trajectory(t, {Integer(1)}), ValidationError);
}
