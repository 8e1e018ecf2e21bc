#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "trimbirk/contfrac.hpp"
#include "trimbirk/error.hpp"

using namespace trimbirk;
using namespace trimbirk::contfrac;

namespace {

// Plain Euclid on machine integers, independent of the library.
std::vector<long> euclid_digits(long num, long den) {
    std::vector<long> out;
    while (num != 0) {
        out.push_back(den / num);
        const long r = den % num;
        den = num;
        num = r;
    }
    return out;
}

std::vector<long> as_longs(const std::vector<Integer>& v) {
    std::vector<long> out;
    for (const auto& a : v) out.push_back(a.get_si());
    return out;
}

// Digits of a real number from a 2000-bit MPFR value by repeated floor/invert.
std::vector<long> float_digits(const char* expr_sqrt_arg, long a, long b, long c, int count) {
    mpfr_t x, one;
    mpfr_inits2(2000, x, one, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_str(x, expr_sqrt_arg, 10, MPFR_RNDN);
    mpfr_sqrt(x, x, MPFR_RNDN);
    mpfr_mul_si(x, x, b, MPFR_RNDN);
    mpfr_add_si(x, x, a, MPFR_RNDN);
    mpfr_div_si(x, x, c, MPFR_RNDN);
    mpfr_set_ui(one, 1, MPFR_RNDN);
    std::vector<long> out;
    for (int i = 0; i < count; ++i) {
        mpfr_div(x, one, x, MPFR_RNDN);
        const long d = mpfr_get_si(x, MPFR_RNDD);
        out.push_back(d);
        mpfr_sub_si(x, x, d, MPFR_RNDN);
    }
    mpfr_clears(x, one, static_cast<mpfr_ptr>(nullptr));
    return out;
}

CoefficientStream golden() { return cfe_of_quadratic(-1, 1, 5, 2); }
CoefficientStream silver() { return cfe_of_quadratic(-1, 1, 2, 1); }

}  // namespace

TEST_CASE("cfe_of_rational matches Euclid and re-evaluates") {
    CHECK(as_longs(cfe_of_rational(5, 7).prefix(3)) == std::vector<long>{1, 2, 2});
    CHECK(as_longs(cfe_of_rational(1, 2).prefix(1)) == std::vector<long>{2});
    CHECK(as_longs(cfe_of_rational(3, 5).prefix(3)) == std::vector<long>{1, 1, 2});

    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        const long den = 2 + static_cast<long>(rng() % 100000);
        const long num = 1 + static_cast<long>(rng() % (den - 1));
        const auto s = cfe_of_rational(num, den);
        const auto digits = s.prefix(*s.available_length());
        Rational expect(num, den);
        expect.canonicalize();
        CHECK(evaluate(digits) == expect);
        if (digits.size() > 1) CHECK(digits.back() >= 2);
        const long g = std::gcd(num, den);
        CHECK(as_longs(digits) == euclid_digits(num / g, den / g));
    }
}

TEST_CASE("cfe_of_rational guards") {
    CHECK_THROWS_AS(cfe_of_rational(0, 5), DomainError);
    CHECK_THROWS_AS(cfe_of_rational(7, 5), DomainError);
    CHECK_THROWS_AS(cfe_of_rational(5, 5), DomainError);
}

TEST_CASE("finite stream normalizes the alternate form") {
    auto s = CoefficientStream::finite({Integer(1), Integer(2), Integer(1), Integer(1)});
    CHECK(as_longs(s.prefix(3)) == std::vector<long>{1, 2, 2});
    CHECK_THROWS_AS(CoefficientStream::finite({Integer(2), Integer(0)}), DomainError);
    CHECK_THROWS_AS(s.prefix(4), LengthError);
}

TEST_CASE("cfe_of_quadratic detects periods") {
    const auto g = golden();
    CHECK(g.preperiod().empty());
    CHECK(as_longs(g.period()) == std::vector<long>{1});

    const auto r = cfe_of_quadratic(0, 1, 2, 2);
    CHECK(as_longs(r.preperiod()) == std::vector<long>{1});
    CHECK(as_longs(r.period()) == std::vector<long>{2});

    const auto s = silver();
    CHECK(s.preperiod().empty());
    CHECK(as_longs(s.period()) == std::vector<long>{2});

    // Against a 2000-bit floating oracle on assorted surds.
    struct Case { long a, b, d, c; const char* d_str; };
    for (const Case& cs : {Case{-1, 1, 5, 2, "5"}, Case{0, 1, 2, 2, "2"}, Case{-1, 1, 2, 1, "2"},
                           Case{-3, 1, 13, 2, "13"}, Case{7, -1, 19, 5, "19"}, Case{-4, 1, 23, 3, "23"},
                           Case{1, 1, 3, 4, "3"}}) {
        const auto stream = cfe_of_quadratic(cs.a, cs.b, cs.d, cs.c);
        CHECK(as_longs(stream.prefix(40)) == float_digits(cs.d_str, cs.a, cs.b, cs.c, 40));
    }

    CHECK_THROWS_AS(cfe_of_quadratic(1, 1, 4, 5), DomainError);  // rational
    CHECK_THROWS_AS(cfe_of_quadratic(1, 1, 5, 2), DomainError);  // > 1
    CHECK_THROWS_AS(cfe_of_quadratic(-3, 1, 5, 2), DomainError);  // < 0
}

TEST_CASE("convergent table invariants") {
    const auto t = convergents(golden(), 5);
    std::vector<long> q;
    for (std::size_t n = 0; n <= t.top(); ++n) q.push_back(t.q(n).get_si());
    CHECK(q == std::vector<long>{0, 1, 1, 2, 3, 5, 8});

    const auto r = convergents(cfe_of_rational(5, 7), 3);
    CHECK(Rational(r.p(1), r.q(1)) == Rational(0, 1));
    CHECK(Rational(r.p(2), r.q(2)) == 1);
    CHECK(Rational(r.p(3), r.q(3)) == Rational(2, 3));
    CHECK(Rational(r.p(4), r.q(4)) == Rational(5, 7));

    const auto seeds = convergents(golden(), 0);
    CHECK(seeds.top() == 1);
    CHECK(seeds.p(0) == 1);
    CHECK(seeds.q(0) == 0);
    CHECK(seeds.p(1) == 0);
    CHECK(seeds.q(1) == 1);

    CHECK_THROWS_AS(convergents(cfe_of_rational(5, 7), 4), LengthError);

    // Fibonacci oracle and the determinant identity on a deep table.
    const auto deep = convergents(golden(), 90);
    Integer f0 = 0, f1 = 1;
    for (std::size_t n = 1; n <= deep.top(); ++n) {
        CHECK(deep.q(n) == f1);
        const Integer f2 = f0 + f1;
        f0 = f1;
        f1 = f2;
    }
    for (const auto& stream : {golden(), silver(), cfe_of_quadratic(-3, 1, 13, 2)}) {
        const auto tb = convergents(stream, 60);
        for (std::size_t n = 1; n < tb.top(); ++n) {
            const Integer det = tb.p(n + 1) * tb.q(n) - tb.p(n) * tb.q(n + 1);
            CHECK(det == (n % 2 == 1 ? 1 : -1));
            Integer g;
            mpz_gcd(g.get_mpz_t(), tb.p(n).get_mpz_t(), tb.q(n).get_mpz_t());
            CHECK(g == 1);
            if (n >= 3) CHECK(tb.q(n + 1) > tb.q(n));
        }
    }
}

TEST_CASE("delta values and the remainder recursion") {
    const auto g = golden();
    const auto t = convergents(g, 30);
    const auto alpha = *g.exact_value();
    CHECK(delta(t, alpha, 1) == QuadraticNumber(Rational(1)));
    CHECK(delta(t, alpha, 2) == alpha);
    const auto d4 = delta(t, alpha, 4);
    CHECK(d4 == (Rational(2) * alpha - QuadraticNumber(Rational(1))).abs());
    CHECK(std::fabs(d4.to_double() - 0.2360679774997897) < 1e-15);
    CHECK(QuadraticNumber(Rational(1, 6)) < d4);
    CHECK(d4 < QuadraticNumber(Rational(1, 3)));

    const auto dt = delta_table(t, alpha);
    for (std::size_t n = 1; n + 2 <= dt.top(); ++n) {
        CHECK(Rational(t.a(n)) * dt[n + 1] + dt[n + 2] == dt[n]);
    }
    // A rational reference that disagrees with the table prefix.
    CHECK_THROWS_AS(delta(t, QuadraticNumber(Rational(1, 2)), 3), ValidationError);
}

TEST_CASE("best approximation by brute force") {
    for (const auto& stream : {golden(), silver(), cfe_of_quadratic(-3, 1, 13, 2)}) {
        const auto t = convergents(stream, 25);
        const auto alpha = *stream.exact_value();
        for (std::size_t n = 2; n <= t.top() && t.q(n) <= 1000; ++n) {
            const auto best = (Rational(t.q(n)) * alpha - QuadraticNumber(Rational(t.p(n)))).abs();
            for (long q = 1; q <= t.q(n).get_si(); ++q) {
                const double approx = alpha.to_double() * static_cast<double>(q);
                for (long p : {static_cast<long>(std::floor(approx)), static_cast<long>(std::ceil(approx))}) {
                    if (Integer(q) == t.q(n) && Integer(p) == t.p(n)) continue;
                    const auto other = (Rational(q) * alpha - QuadraticNumber(Rational(p))).abs();
                    CHECK(best < other);
                }
            }
        }
    }
}

TEST_CASE("Ostrowski examples") {
    const auto tg = convergents(golden(), 10);
    const auto d4 = ostrowski_expand(4, tg);
    CHECK(as_longs(d4.b) == std::vector<long>{0, 1, 0, 1});
    CHECK(ostrowski_value(d4, tg) == 4);

    const auto ts = convergents(silver(), 10);
    const auto d11 = ostrowski_expand(11, ts);
    CHECK(as_longs(d11.b) == std::vector<long>{1, 0, 2});
    CHECK(ostrowski_value(d11, ts) == 11);

    for (std::size_t n = 2; n <= 8; ++n) {
        const auto d = ostrowski_expand(tg.q(n), tg);
        for (std::size_t j = 1; j <= d.level(); ++j) CHECK(d[j] == (j == d.level() ? 1 : 0));
    }

    CHECK_THROWS_AS(ostrowski_value(OstrowskiDigits{{0, 0, 0}}, tg), ValidationError);
    CHECK_THROWS_AS(ostrowski_value(OstrowskiDigits{{1, 1}}, tg), ValidationError);  // b_1 = a_1 forbidden
    CHECK_THROWS_AS(ostrowski_expand(1000, convergents(golden(), 5)), LengthError);
}

TEST_CASE("Ostrowski expansion is the unique admissible representation") {
    // Enumerate every admissible digit vector below q_{top} and count hits.
    const auto t = convergents(cfe_of_quadratic(-3, 1, 13, 2), 6);
    const std::size_t levels = t.top() - 1;
    std::vector<int> hits(t.q(t.top()).get_si(), 0);
    std::vector<long> b(levels + 1, 0);
    std::function<void(std::size_t, long)> rec = [&](std::size_t j, long partial) {
        if (j > levels) {
            if (partial > 0) ++hits[partial];
            return;
        }
        for (long v = 0;; ++v) {
            const long next = partial + v * t.q(j).get_si();
            if (next >= t.q(j + 1).get_si()) break;
            b[j] = v;
            rec(j + 1, next);
        }
    };
    rec(1, 0);
    for (long N = 1; N < static_cast<long>(hits.size()); ++N) {
        CHECK(hits[N] == 1);
        const auto d = ostrowski_expand(N, t);
        CHECK(ostrowski_value(d, t) == N);
    }
}

TEST_CASE("weighted log sums") {
    const auto tg = convergents(golden(), 10);
    const auto w = weighted_log_sums(ostrowski_expand(4, tg), tg);
    CHECK(w.main_term == doctest::Approx(3 * std::log(3.0)).epsilon(1e-15));
    CHECK(w.digit_log_term == 0.0);
    CHECK(w.digit_sum == 2);

    const auto ts = convergents(silver(), 10);
    const auto w11 = weighted_log_sums(ostrowski_expand(11, ts), ts);
    CHECK(w11.main_term == doctest::Approx(10 * std::log(5.0)).epsilon(1e-15));
    CHECK(w11.digit_log_term == 0.0);
    CHECK(w11.digit_sum == 3);

    // A digit b_j >= 2 below the top contributes a_j q_j ln b_j.
    const auto t13 = convergents(cfe_of_quadratic(-3, 1, 13, 2), 10);  // digits 3,3,3,...
    const auto d = ostrowski_expand(t13.q(4) + 2 * t13.q(2), t13);
    const auto w13 = weighted_log_sums(d, t13);
    CHECK(w13.digit_log_term == doctest::Approx(3.0 * 3.0 * std::log(2.0)));
    const auto precise = weighted_log_sums_precise(d, t13);
    CHECK(precise.main_term.to_double() == doctest::Approx(w13.main_term).epsilon(1e-14));
}

TEST_CASE("mirror stream is the expansion of 1 - alpha") {
    const auto g = golden();
    const auto m = mirror(g);
    const auto mv = *m.exact_value();
    CHECK(mv == QuadraticNumber(Rational(1)) - *g.exact_value());
    CHECK(as_longs(m.prefix(5)) == std::vector<long>{2, 1, 1, 1, 1});

    const auto s = silver();
    CHECK(as_longs(mirror(s).prefix(5)) == std::vector<long>{1, 1, 2, 2, 2});

    const auto r = mirror(cfe_of_rational(5, 7));
    CHECK(*r.exact_value() == QuadraticNumber(Rational(2, 7)));

    // Rule generated stream a_n = n.
    const auto lin = CoefficientStream::generated({}, [](std::size_t i, std::span<const Integer>) { return Integer(static_cast<unsigned long>(i)); }, "linear");
    CHECK(as_longs(mirror(lin).prefix(6)) == std::vector<long>{3, 3, 4, 5, 6, 7});
    const auto lin2 = CoefficientStream::generated({}, [](std::size_t i, std::span<const Integer>) { return Integer(static_cast<unsigned long>(i + 1)); }, "shifted");
    CHECK(as_longs(mirror(lin2).prefix(5)) == std::vector<long>{1, 1, 3, 4, 5});
    CHECK(as_longs(mirror(mirror(lin2)).prefix(5)) == std::vector<long>{2, 3, 4, 5, 6});
}
