#include "trimbirk/suites.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "trimbirk/angle.hpp"
#include "trimbirk/contfrac.hpp"
#include "trimbirk/diophantine.hpp"
#include "trimbirk/error.hpp"
#include "trimbirk/experiments.hpp"
#include "trimbirk/orbit.hpp"
#include "trimbirk/trimsum.hpp"

namespace trimbirk::suites {

using contfrac::ConvergentTable;
using contfrac::QuadraticNumber;
using experiments::SampleDesign;
using orbit::RotationContext;

bool SuiteReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.pass; });
}

bool SuiteReport::add(std::string name, bool pass, std::string detail) {
    checks.push_back({std::move(name), pass, std::move(detail)});
    return pass;
}

namespace {

template <class... T>
std::string cat(const T&... parts) {
    std::ostringstream s;
    s.precision(6);
    (s << ... << parts);
    return s.str();
}

Rational random_grid_x(const RotationContext& ctx, std::mt19937_64& rng) {
    Integer a = Integer(static_cast<unsigned long>(rng())) * Integer(static_cast<unsigned long>(rng()));
    return orbit::grid_point(ctx, a);
}

Integer random_below(const Integer& bound, gmp_randclass& gen) { return gen.get_z_range(bound); }

// Exact reference for delta tables: the closed form when the stream carries
// one, else a convergent deeper than every level inspected.
QuadraticNumber reference_value(const contfrac::CoefficientStream& s, const ConvergentTable& deep) {
    if (auto v = s.exact_value()) return *v;
    return QuadraticNumber(Rational(deep.p(deep.top()), deep.q(deep.top())));
}

}  // namespace

std::vector<std::string> identity_angles() {
    return {"golden",
            "silver",
            "digits:[1;2]",
            "rule:window(lower=q^(1+g);upper=2*q^(1+g);g=1/5;seed=[1,2])",
            "rule:window(lower=q^(1+g);upper=2*q^(1+g);g=1/4;seed=[3,1])",
            "rule:window(lower=q^(1+g);upper=2*q^(1+g);g=1/3;seed=[2])",
            "rule:bounded(max=3;seed=11)",
            "rule:bounded(max=5;seed=12)",
            "rule:bounded(max=9;seed=13)",
            "rule:bounded(max=20;seed=14)"};
}

SuiteReport identity_suite(std::size_t max_level) {
    SuiteReport rep{"identities", {}};
    for (const auto& spec : identity_angles()) {
        const auto stream = parse_angle(spec);
        const auto table = contfrac::convergents(stream, max_level + 2);
        const auto deltas = contfrac::delta_table(table, reference_value(stream, table));
        std::size_t recursion = 0, bounds = 0, qj = 0;
        std::string first_failure;
        Integer weighted = 0;
        for (std::size_t n = 1; n <= max_level; ++n) {
            if (Rational(table.a(n)) * deltas[n + 1] + deltas[n + 2] != deltas[n]) {
                ++recursion;
                if (first_failure.empty()) first_failure = cat("recursion at n=", n);
            }
            if (n >= 2) {
                const QuadraticNumber lo(Rational(Integer(1), 2 * table.q(n)));
                const QuadraticNumber hi(Rational(Integer(1), table.q(n)));
                if (!(lo < deltas[n] && deltas[n] < hi)) {
                    ++bounds;
                    if (first_failure.empty()) first_failure = cat("delta bound at n=", n);
                }
            }
            weighted += table.a(n) * table.q(n);
            if (2 * table.q(n + 1) < weighted) {
                ++qj;
                if (first_failure.empty()) first_failure = cat("2 q_{n+1} >= sum at n=", n);
            }
        }
        const bool ok = recursion == 0 && bounds == 0 && qj == 0;
        rep.add(spec, ok,
                cat("levels 1..", max_level, ", q_", max_level, " has ", mpz_sizeinbase(table.q(max_level).get_mpz_t(), 10),
                    " digits", ok ? "" : ", first failure: " + first_failure));
    }
    return rep;
}

SuiteReport ostrowski_suite(u64 samples, u64 seed) {
    SuiteReport rep{"ostrowski", {}};
    gmp_randclass gen(gmp_randinit_mt);
    gen.seed(static_cast<unsigned long>(seed));
    const std::vector<std::string> specs = {"golden", "silver", "rule:e_minus_2()", "rule:bounded(max=50;seed=3)",
                                            "rule:window(lower=q^(1+g);upper=2*q^(1+g);g=1/3;seed=[2])"};
    const Integer limit = Integer(10) * pow(Integer(10), 30);
    for (const auto& spec : specs) {
        const auto stream = parse_angle(spec);
        std::size_t depth = 8;
        while (contfrac::convergents(stream, depth).q(depth + 1) < limit) depth += 8;
        const auto table = contfrac::convergents(stream, depth + 2);
        std::size_t top = 2;
        while (top < table.top() && table.q(top) < limit) ++top;
        const Integer bound = table.q(top);
        // ln q_j at 192 bits, shared by every N of this angle
        std::vector<BigFloat> log_q(top + 1);
        for (std::size_t j = 1; j <= top; ++j) log_q[j] = BigFloat::log(BigFloat(table.q(j), MPFR_RNDN), MPFR_RNDN);
        u64 failures = 0;
        std::string first;
        for (u64 i = 0; i < samples; ++i) {
            const Integer N = 1 + random_below(bound - 1, gen);
            auto fail = [&](const std::string& what) {
                if (failures++ == 0) first = what + " at N=" + N.get_str();
            };
            const auto d = contfrac::ostrowski_expand(N, table);
            if (contfrac::ostrowski_value(d, table) != N) fail("round trip");
            try {
                contfrac::validate_ostrowski(d, table);
            } catch (const ValidationError& e) {
                fail(std::string("admissibility (") + e.what() + ")");
            }
            Integer partial = 0;
            for (std::size_t j = 1; j <= d.level(); ++j) {
                partial += d[j] * table.q(j);
                if (partial >= table.q(j + 1)) fail("partial sum");
            }
            const std::size_t n = table.level_of(N);
            if (d.level() != n || d[n] != floor_div(N, table.q(n))) fail("top digit");
            if (N >= 2) {
                BigFloat main(0.0);
                Integer digit_sum = 0;
                for (std::size_t j = 1; j <= d.level(); ++j) {
                    if (d[j] == 0) continue;
                    digit_sum += d[j];
                    main = BigFloat::add(main, BigFloat::mul(BigFloat(Integer(d[j] * table.q(j)), MPFR_RNDN), log_q[j], MPFR_RNDN),
                                         MPFR_RNDN);
                }
                const BigFloat Nf(N, MPFR_RNDN);
                const BigFloat NlogN = BigFloat::mul(Nf, BigFloat::log(Nf, MPFR_RNDN), MPFR_RNDN);
                const BigFloat upper = BigFloat::add(
                    main, BigFloat::mul(Nf, BigFloat::log(BigFloat(digit_sum, MPFR_RNDN), MPFR_RNDN), MPFR_RNDN),
                    MPFR_RNDN);
                const double lo = main.to_double(), mid = NlogN.to_double(), hi = upper.to_double();
                if (lo > mid * (1 + 1e-12)) fail("sandwich lower");
                if (mid > hi * (1 + 1e-12)) fail("sandwich upper");
            }
        }
        rep.add(spec, failures == 0,
                cat(samples, " N below q_", top, " (", mpz_sizeinbase(bound.get_mpz_t(), 10), " digits), ", failures,
                    " failures", failures ? ", first: " + first : ""));
    }
    return rep;
}

SuiteReport qn_suite(const Integer& q_limit, u64 G, u64 budget) {
    SuiteReport rep{"qn_bound", {}};
    for (const char* spec : {"golden", "silver", "rule:e_minus_2()"}) {
        const auto ctx = RotationContext::make(parse_angle(spec), q_limit);
        const auto s = experiments::qn_bound_suite(ctx, spec, q_limit, SampleDesign::make(G, 0), 1.0, budget);
        double worst = 0.0;
        for (const auto& row : s.rows) worst = std::max(worst, row.lhs / row.bound);
        std::string detail = cat(s.rows.size(), " checks, ", s.failures.size(), " violations, worst lhs/7q_n = ", worst);
        if (!s.failures.empty()) {
            const auto& f = s.failures.front();
            detail += cat(", first at n=", f.n, " x=", to_string(f.x), " lhs=", f.lhs);
        }
        rep.add(spec, s.failures.empty() && !s.rows.empty(), detail);
    }
    return rep;
}

namespace {

std::vector<u64> decades(u64 from, u64 to) {
    std::vector<u64> out;
    for (u64 N = from; N <= to; N *= 10) out.push_back(N);
    return out;
}

}  // namespace

SuiteReport strong_1x_suite(u64 G, u64 N_max) {
    SuiteReport rep{"strong_1x", {}};
    const auto ctx = RotationContext::make(parse_angle("golden"), N_max);
    experiments::LawConfig c;
    c.trim = diophantine::TrimmingSequence::constant(1);
    c.grid = decades(1000, N_max);
    c.design = SampleDesign::make(G, 0);
    c.budget = G * N_max;
    const auto r = experiments::strong_law_run(ctx, "golden", c);
    std::string trajectory;
    for (const auto& row : r.rows) trajectory += cat(" N=", row.N, ":", row.max_deviation);
    const double first = r.rows.front().max_deviation, last = r.rows.back().max_deviation;
    rep.add("max deviation at N_max below 1/2", last < 0.5, cat("max_x |ratio-1| =", trajectory));
    rep.add("max deviation smaller than at N=1000", last < first, cat(last, " < ", first));
    return rep;
}

namespace {

struct Term {
    Rational value;
    u64 j;
};

// Every orbit value c1/y + c2/(1-y) as an exact rational.
std::vector<Term> exact_terms(const RotationContext& ctx, const Rational& x, u64 N, const Rational& c1,
                              const Rational& c2) {
    std::vector<Term> out;
    const Rational a = ctx.alpha_proxy();
    for (u64 j = 0; j < N; ++j) {
        Rational y = x + Rational(Integer(static_cast<unsigned long>(j))) * a;
        y -= Rational(floor_of(y));
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

bool close(double a, double b, double rel) { return std::fabs(a - b) <= rel * std::max(1.0, std::fabs(b)); }

}  // namespace

SuiteReport beta_suite(u64 G, u64 N_max, u64 oracle_instances) {
    SuiteReport rep{"beta_law", {}};
    const auto ctx = RotationContext::make(parse_angle("golden"), N_max);
    const auto k = diophantine::TrimmingSequence::parse("log");

    std::vector<Integer> range;
    for (u64 N = 16; N <= N_max; N += std::max<u64>(1, N / 64)) range.push_back(Integer(static_cast<unsigned long>(N)));
    const auto cond = diophantine::condition_III(k, ctx.table(), range);
    const bool unit = std::all_of(cond.points.begin(), cond.points.end(),
                                  [](const diophantine::ConditionPoint& p) { return p.denominator == 1; });
    rep.add("condition (III) with denominator 1", unit && cond.grows,
            cat(cond.points.size(), " N in [16,", N_max, "], min k(N)/denominator = ", cond.min_ratio,
                ", grows = ", cond.grows));

    experiments::LawConfig c;
    c.obs = observables::PowerObservable(2.0);
    c.trim = k;
    c.d = observables::Normalizer{observables::Normalizer::Kind::beta, 2.0, 1.0};
    c.grid = decades(10000, N_max);
    c.design = SampleDesign::make(G, 0);
    c.budget = G * N_max;
    const auto r = experiments::strong_law_run(ctx, "golden", c);
    std::string trajectory;
    bool decreasing = true;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        trajectory += cat(" N=", r.rows[i].N, ":", r.rows[i].max_deviation);
        if (i > 0 && !(r.rows[i].max_deviation < r.rows[i - 1].max_deviation)) decreasing = false;
    }
    rep.add("max deviation at N_max below 1/2", r.rows.back().max_deviation < 0.5, cat("max_x |ratio-1| =", trajectory));
    rep.add("max deviation decreasing from N=10^4", decreasing, trajectory.substr(1));

    std::mt19937_64 rng(20261019);
    static const char* specs[] = {"golden", "silver", "digits:[1;2]", "digits:[3,1,4,1,5,9,2,6;7]",
                                  "rule:bounded(max=9;seed=5)", "surd:(-2+sqrt(7))/3"};
    u64 mismatches = 0;
    std::string first;
    for (u64 inst = 0; inst < oracle_instances; ++inst) {
        const auto small = RotationContext::make(parse_angle(specs[rng() % 6]), 200);
        const u64 N = 1 + rng() % 200;
        const u64 kk = rng() % (N + 2);
        const long den = 1 + static_cast<long>(rng() % 5000);
        const Rational x(static_cast<long>(rng() % den), den);
        const bool two_sided = inst % 3 == 0;
        const Rational c1(1 + static_cast<long>(rng() % 4), 1 + static_cast<long>(rng() % 3));
        const Rational c2 = two_sided ? Rational(1 + static_cast<long>(rng() % 4), 2) : Rational(0);
        const observables::PowerObservable f(1.0, to_double(c1), to_double(c2));

        auto terms = exact_terms(small, x, N, c1, c2);
        std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.value > b.value; });
        Rational exact(0);
        std::vector<u64> removed;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (i < kk) removed.push_back(terms[i].j);
            else exact += terms[i].value;
        }
        const auto got = trimsum::trimmed_sum(small, f, x, N, kk);
        std::vector<u64> got_j;
        for (const auto& t : got.removed) got_j.push_back(t.j);
        if (kk >= N) {
            std::sort(got_j.begin(), got_j.end());
            std::sort(removed.begin(), removed.end());
        }
        const bool ok = close(got.trimmed, to_double(exact), 1e-12) && (two_sided || got_j == removed);
        if (!ok && mismatches++ == 0) first = cat("N=", N, " k=", kk, " x=", to_string(x));
    }
    rep.add("trimmed sum equals brute-force removal", mismatches == 0,
            cat(oracle_instances, " instances with N <= 200, ", mismatches, " mismatches",
                mismatches ? ", first: " + first : ""));
    return rep;
}

namespace {

const std::string window_1009 = "rule:window(lower=q^2;upper=inf;seed=[2,504])";

}  // namespace

SuiteReport oscillation_suite(u64 samples) {
    SuiteReport rep{"oscillation_1x", {}};
    const auto stream = parse_angle(window_1009);
    const auto table = contfrac::convergents(stream, 6);
    const std::size_t n = 3;
    const Integer q_next = table.q(n + 1);
    const auto ctx = RotationContext::make(stream, q_next - 1);
    experiments::Osc1xConfig c;
    c.n = n;
    c.samples = samples;
    const auto r = experiments::oscillation_1x(ctx, window_1009, c);
    rep.add("construction", r.q_n == 1009 && r.q_next >= r.q_n * r.q_n && r.failed_hypotheses.empty(),
            cat("q_n=", r.q_n.get_str(), " q_{n+1}=", r.q_next.get_str(), " N=", r.N, " k_max=", r.k_max));
    rep.add("exact measures", r.measure_A == Rational(1, 1000) && r.measure_B == Rational(1, 1000),
            cat("lambda(A)=", to_string(r.measure_A), " lambda(B)=", to_string(r.measure_B)));
    rep.add("A above (1/4) q_{n+1} ln q_n for every k <= k_max", r.violations_A == 0,
            cat(r.samples_A.size(), " samples, ", r.violations_A, " violations, min S = ", r.min_A, " vs threshold ",
                r.threshold_A, ", all above only for k <= ",
                r.largest_k_all_A ? std::to_string(*r.largest_k_all_A) : std::string("none")));
    rep.add("B below (1/100) q_{n+1} ln q_n for every k <= k_max", r.violations_B == 0,
            cat(r.samples_B.size(), " samples, ", r.violations_B, " violations, max S = ", r.max_B, " vs threshold ",
                r.threshold_B));
    return rep;
}

SuiteReport weak_dichotomy_suite(u64 G, u64 N_golden, u64 budget) {
    SuiteReport rep{"weak_dichotomy", {}};
    experiments::LawConfig c;
    c.trim = diophantine::TrimmingSequence::constant(1);
    c.design = SampleDesign::make(G, 0);
    c.epsilons = {0.25};
    c.budget = budget;

    const auto golden = RotationContext::make(parse_angle("golden"), N_golden);
    c.grid = {N_golden};
    const auto g = experiments::weak_law_run(golden, "golden", c);
    const double lg = g.rows[0].lambda_hat[0];
    rep.add("golden lambda-hat below 0.1", lg < 0.1, cat("N=", N_golden, " G=", G, " lambda-hat(0.25)=", lg));

    const std::string ls = "rule:seq1x(l=zero)";
    const auto stream = parse_angle(ls);
    const auto table = contfrac::convergents(stream, 12);
    std::size_t n = 2;
    while (table.q(n + 2) <= 1000000) ++n;
    const Integer q_next = table.q(n + 1);
    const auto liou = RotationContext::make(stream, q_next - 1);
    const Integer N = ceil_div(q_next, 250);
    c.grid = {N.get_ui()};
    const auto l = experiments::weak_law_run(liou, ls, c);
    const double ll = l.rows[0].lambda_hat[0];
    rep.add("Liouville lambda-hat above 1/2000", ll > 1.0 / 2000,
            cat("level ", n, " q_n=", table.q(n).get_str(), " q_{n+1}=", q_next.get_str(), " N=", N.get_str(),
                " lambda-hat(0.25)=", ll));
    return rep;
}

SuiteReport structural_suite(const StructuralSizes& sz) {
    SuiteReport rep{"structural", {}};
    std::mt19937_64 rng(99);

    {
        u64 checks = 0, fail_sandwich = 0, fail_bn = 0;
        std::string first;
        for (const char* spec : {"golden", "silver", "digits:[1,3,1,7,2;1,4]"}) {
            const auto ctx = RotationContext::make(parse_angle(spec), sz.N_max);
            const auto xs = SampleDesign::make(sz.sandwich_x, 0).points(ctx);
            std::vector<u64> Ns;
            for (u64 i = 0; i < sz.sandwich_N; ++i) Ns.push_back(1 + rng() % sz.N_max);
            std::vector<char> ok_s(xs.size() * Ns.size()), ok_b(xs.size() * Ns.size());
            experiments::parallel_for(ok_s.size(), [&](std::size_t i) {
                const auto& x = xs[i / Ns.size()];
                const u64 N = Ns[i % Ns.size()];
                ok_s[i] = trimsum::sandwich_errlem(ctx, x, N).pass();
                ok_b[i] = trimsum::strong1xlembn_check(ctx, x, N).pass;
            });
            for (std::size_t i = 0; i < ok_s.size(); ++i) {
                ++checks;
                if (!ok_s[i] || !ok_b[i]) {
                    fail_sandwich += ok_s[i] ? 0 : 1;
                    fail_bn += ok_b[i] ? 0 : 1;
                    if (first.empty())
                        first = cat(spec, " x=", to_string(xs[i / Ns.size()]), " N=", Ns[i % Ns.size()]);
                }
            }
        }
        rep.add("errlem sandwich", fail_sandwich == 0, cat(checks, " checks, ", fail_sandwich, " failures"));
        rep.add("strong1/x digit bound", fail_bn == 0,
                cat(checks, " checks, ", fail_bn, " failures", first.empty() ? "" : ", first: " + first));
    }

    {
        u64 violations = 0, worst = 0;
        const char* specs[] = {"golden", "silver", "rule:bounded(max=9;seed=3)", "rule:e_minus_2()"};
        std::vector<RotationContext> ctxs;
        for (const char* s : specs) ctxs.push_back(RotationContext::make(parse_angle(s), 20000));
        for (u64 inst = 0; inst < sz.count_instances; ++inst) {
            const auto& ctx = ctxs[inst % ctxs.size()];
            const auto& t = ctx.table();
            std::size_t levels = 2;
            while (t.q(levels + 1) <= 20000) ++levels;
            const std::size_t n = 2 + rng() % (levels - 1);
            const Rational x = random_grid_x(ctx, rng);
            Rational shifted = x + ctx.alpha_proxy();
            shifted -= Rational(floor_of(shifted));
            const auto I = orbit::Interval::right_open(0, Rational(Integer(1), t.q(n) + t.q(n - 1)));
            const Integer count = orbit::count_in_interval(ctx, shifted, t.q(n).get_ui(), I);
            worst = std::max<u64>(worst, count.get_ui());
            if (count > 1) ++violations;
        }
        rep.add("at most one point of R^1..R^{q_n} in (0, 1/(q_n+q_{n-1}))", violations == 0,
                cat(sz.count_instances, " instances, max count ", worst));
    }

    {
        u64 hypotheses = 0, violations = 0;
        const char* specs[] = {"golden", "rule:bounded(max=6;seed=2)", "rule:e_minus_2()", "digits:[1,1,8;2,1,12]"};
        std::vector<RotationContext> ctxs;
        for (const char* s : specs) ctxs.push_back(RotationContext::make(parse_angle(s), 4000));
        for (u64 inst = 0; inst < sz.j1_instances; ++inst) {
            const auto& ctx = ctxs[inst % ctxs.size()];
            const auto r = orbit::j1_coincidence(ctx, random_grid_x(ctx, rng), 2 + rng() % 3999);
            if (r.hypothesis_holds) {
                ++hypotheses;
                if (!r.conclusion_holds) ++violations;
            }
        }
        rep.add("j1 hypothesis implies coincidence", violations == 0 && hypotheses > 0,
                cat(sz.j1_instances, " instances, hypothesis held ", hypotheses, ", counterexamples ", violations));
    }

    {
        u64 mismatches = 0, fallbacks = 0;
        for (u64 inst = 0; inst < sz.fast_instances; ++inst) {
            std::string spec;
            switch (rng() % 3) {
                case 0: spec = "golden"; break;
                case 1: spec = "rule:bounded(max=7;seed=" + std::to_string(rng() % 1000) + ")"; break;
                default: {
                    spec = "digits:[";
                    for (int i = 0; i < 6; ++i) spec += std::to_string(1 + rng() % 40) + ",";
                    spec.back() = ';';
                    spec += "1,2]";
                }
            }
            const auto ctx = RotationContext::make(parse_angle(spec), 10000);
            const u64 N = 1 + rng() % 10000;
            const u64 k = std::min<u64>(N, rng() % 51);
            Rational x = random_grid_x(ctx, rng);
            if (inst % 10 == 0) x = Rational(0);
            if (inst % 10 == 1) x = Rational(static_cast<long>(rng() % 97), 97);
            const auto heap = orbit::k_smallest_positive(ctx, x, N, k);
            const auto fast = orbit::k_smallest_fast(ctx, x, N, k);
            fallbacks += fast.used_fallback ? 1 : 0;
            bool same = heap.size() == fast.points.size();
            for (std::size_t i = 0; same && i < heap.size(); ++i) same = heap[i].index == fast.points[i].index;
            if (!same) ++mismatches;
        }
        rep.add("fast k-smallest equals heap scan", mismatches == 0,
                cat(sz.fast_instances, " instances, ", mismatches, " mismatches, ", fallbacks, " fallbacks"));
    }

    {
        const std::string ps = "rule:window(lower=q*ln(q)*log2(q);upper=q*ln(q)^2;seed=[1,2,3,1,4,2,5])";
        const auto ctx = RotationContext::make(parse_angle(ps), 2000000);
        const auto& t = ctx.table();
        experiments::PointOscConfig c;
        c.n = 9;
        c.x = ctx.alpha_proxy();
        c.N = static_cast<u64>(std::ceil(to_double(t.q(10)) / log_of(t.q(9))));
        const auto r = experiments::point_osc(ctx, ps, c);
        const bool ok = r.cluster.verdict.value_or(false) && r.verdict.value_or(false);
        rep.add("generalized-scale point oscillation", ok,
                cat("q_n=", r.q_n.get_str(), " N=", r.N, " measured ", r.cluster.measured, " >= harmonic ",
                    r.cluster.harmonic_bound, ", >= N ln N / 2 = ", r.half_N_log_N));
    }
    return rep;
}

std::vector<std::string> suite_names() {
    return {"contfrac", "ostrowski", "bounds", "law", "oscillation", "structural", "all"};
}

std::vector<SuiteReport> run_named(const std::string& name) {
    std::vector<SuiteReport> out;
    const bool all = name == "all";
    bool known = all;
    auto want = [&](const char* n) {
        if (all || name == n) {
            known = true;
            return true;
        }
        return false;
    };
    if (want("contfrac")) out.push_back(identity_suite(30));
    if (want("ostrowski")) out.push_back(ostrowski_suite(1000));
    if (want("bounds")) out.push_back(qn_suite(Integer(100000), 10, experiments::default_budget));
    if (want("law")) {
        out.push_back(strong_1x_suite(10, 100000));
        out.push_back(beta_suite(10, 100000, 100));
    }
    if (want("oscillation")) out.push_back(oscillation_suite(20));
    if (want("structural")) {
        StructuralSizes s;
        s.sandwich_x = 5;
        s.sandwich_N = 4;
        s.N_max = 20000;
        s.count_instances = 100;
        s.j1_instances = 1000;
        s.fast_instances = 100;
        out.push_back(structural_suite(s));
    }
    if (!known) {
        std::string names;
        for (const auto& n : suite_names()) names += (names.empty() ? "" : " | ") + n;
        throw ValidationError("unknown suite '" + name + "' (" + names + ")");
    }
    return out;
}

}  // namespace trimbirk::suites
