#include "trimbirk/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "trimbirk/error.hpp"

namespace trimbirk::experiments {

using observables::PowerObservable;
using orbit::RotationContext;

namespace {

Integer I(u64 v) { return Integer(static_cast<unsigned long>(v)); }

u64 to_u64(const Integer& v, const std::string& what) {
    if (v < 0 || !v.fits_ulong_p()) throw RangeError(what + " does not fit in 64 bits: " + to_string(v));
    return v.get_ui();
}

Rational frac(const Rational& r) {
    Rational out = r - Rational(floor_of(r));
    out.canonicalize();
    return out;
}

// Level of the mirrored table carrying the same pair (q_n, q_{n+1}).
std::size_t mirrored_level(const RotationContext& mir, const Integer& qn, const Integer& qn1) {
    const auto& t = mir.table();
    for (std::size_t m = 1; m + 1 <= t.top(); ++m) {
        if (t.q(m) == qn && t.q(m + 1) == qn1) return m;
    }
    throw LengthError("mirrored expansion has no level with q = " + to_string(qn) + ", next " + to_string(qn1));
}

// Orientation with alpha - p_n/q_n > 0, mirroring when needed.
struct Oriented {
    const RotationContext* ctx;
    std::size_t n;
    bool mirrored;
};

Oriented orient(const RotationContext& ctx, std::size_t n, std::optional<RotationContext>& storage) {
    const auto& t = ctx.table();
    if (n == 0 || n + 1 > t.top()) throw LengthError("level " + std::to_string(n) + " is outside the guarded table");
    if (contfrac::ConvergentTable::convergent_side(n) > 0) return {&ctx, n, false};
    storage.emplace(ctx.mirrored());
    return {&*storage, mirrored_level(*storage, t.q(n), t.q(n + 1)), true};
}

// q_M-grid point strictly inside the open arc (lo, lo + len) of the circle,
// at relative position t in (0,1).
Rational grid_inside(const RotationContext& ctx, const Rational& lo, const Rational& len, const Rational& t) {
    const Rational y = lo + len * t;
    Integer a = ceil_of(Rational(y * Rational(ctx.q())));
    a %= ctx.q();
    if (a < 0) a += ctx.q();
    return Rational(a, ctx.q());
}

// Relative position of sample i inside its arc, kept in [1/8, 7/8].
Rational in_arc_offset(u64 i, u64 samples, u64 arcs, const Rational& u) {
    const Rational raw = frac(Rational(Integer(I(i)) * I(arcs), I(samples)) + u / Rational(I(samples)));
    return Rational(1, 8) + Rational(3, 4) * raw;
}

double mean_of(const std::vector<double>& v) {
    CompensatedSum s;
    for (double x : v) s.add(x);
    return v.empty() ? 0.0 : s.value() / static_cast<double>(v.size());
}

}  // namespace

SampleDesign SampleDesign::make(u64 G, u64 seed) {
    if (G == 0) throw ValidationError("sample grid size G must be positive");
    SampleDesign d;
    d.G = G;
    d.seed = seed;
    if (seed == 0) {
        d.offset = Rational(1, 2);
    } else {
        std::mt19937_64 rng(seed);
        d.offset = Rational(Integer(static_cast<unsigned long>(rng() >> 32)), Integer(1) << 32);
    }
    d.offset.canonicalize();
    return d;
}

std::vector<Rational> SampleDesign::points(const RotationContext& ctx) const {
    std::vector<Rational> out;
    out.reserve(G);
    const Rational scale(ctx.q(), I(G));
    for (u64 i = 0; i < G; ++i) {
        const Integer a = floor_of(Rational((Rational(I(i)) + offset) * scale));
        out.push_back(orbit::grid_point(ctx, a));
    }
    return out;
}

void require_budget(const std::string& what, long double cost, u64 budget) {
    if (cost > static_cast<long double>(budget)) {
        throw BudgetError(what + " needs about " + std::to_string(static_cast<unsigned long long>(cost)) +
                          " orbit-point evaluations, budget is " + std::to_string(budget));
    }
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), count));
    std::vector<std::exception_ptr> errors(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        f(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

AngleInfo AngleInfo::of(const RotationContext& ctx, std::string spec) {
    AngleInfo a;
    a.spec = std::move(spec);
    a.fingerprint = ctx.fingerprint();
    a.guard_level = ctx.guard_level();
    a.proxy = to_string(ctx.p()) + "/" + to_string(ctx.q());
    return a;
}

// ---------------------------------------------------------------- laws

namespace {

LawReport law_run(const char* kind, const RotationContext& ctx, const std::string& spec, const LawConfig& cfg) {
    if (cfg.grid.empty()) throw ValidationError("N grid is empty");
    for (std::size_t i = 1; i < cfg.grid.size(); ++i) {
        if (cfg.grid[i] <= cfg.grid[i - 1]) throw ValidationError("N grid must be strictly ascending");
    }
    if (cfg.grid.front() == 0) throw ValidationError("N grid must start at N >= 1");
    ctx.require_valid(I(cfg.grid.back()));
    require_budget(std::string(kind) + " law run",
                   static_cast<long double>(cfg.design.G) * static_cast<long double>(cfg.grid.back()), cfg.budget);

    LawReport rep;
    rep.kind = kind;
    rep.angle = AngleInfo::of(ctx, spec);
    rep.observable = cfg.obs.describe();
    rep.trimming = cfg.trim.describe();
    rep.normalizer = cfg.d.describe();
    rep.design = cfg.design;
    rep.epsilons = cfg.epsilons;

    const auto xs = cfg.design.points(ctx);
    std::vector<std::vector<trimsum::ProfilePoint>> profiles(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        profiles[i] = trimsum::trimmed_profile(ctx, cfg.obs, xs[i], cfg.grid, cfg.trim, cfg.d);
    });

    for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
        LawRow row;
        row.N = cfg.grid[g];
        row.k = profiles.front()[g].k;
        row.d = profiles.front()[g].d;
        row.ratios.reserve(xs.size());
        for (const auto& p : profiles) {
            row.ratios.push_back(p[g].ratio);
            row.max_deviation = std::max(row.max_deviation, std::fabs(p[g].ratio - 1.0));
        }
        row.mean_ratio = mean_of(row.ratios);
        for (double eps : cfg.epsilons) {
            u64 bad = 0;
            if (!std::isinf(eps)) {
                for (double r : row.ratios) bad += std::fabs(r - 1.0) > eps ? 1 : 0;
            }
            row.lambda_hat.push_back(static_cast<double>(bad) / static_cast<double>(row.ratios.size()));
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace

LawReport strong_law_run(const RotationContext& ctx, const std::string& angle_spec, const LawConfig& cfg) {
    return law_run("strong", ctx, angle_spec, cfg);
}

LawReport weak_law_run(const RotationContext& ctx, const std::string& angle_spec, const LawConfig& cfg) {
    return law_run("weak", ctx, angle_spec, cfg);
}

// ---------------------------------------------------------------- interval unions

void IntervalUnion::add_circle_arc(const Rational& lo, const Rational& length) {
    if (length <= 0 || length >= 1) throw DomainError("arc length must lie in (0,1)");
    const Rational a = frac(lo);
    Rational b = a + length;
    b.canonicalize();
    if (b <= 1) {
        arcs.push_back({a, b});
    } else {
        arcs.push_back({a, Rational(1)});
        Rational rest = b - 1;
        rest.canonicalize();
        arcs.push_back({Rational(0), rest});
    }
}

void IntervalUnion::finish() {
    std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) { return x.lo < y.lo; });
    for (std::size_t i = 1; i < arcs.size(); ++i) {
        if (arcs[i].lo < arcs[i - 1].hi) {
            throw ConstructionError("interval union is not disjoint near " + to_string(arcs[i].lo));
        }
    }
}

Rational IntervalUnion::measure() const {
    Rational m(0);
    for (const auto& a : arcs) m += a.hi - a.lo;
    m.canonicalize();
    return m;
}

bool IntervalUnion::contains(const Rational& x) const {
    // open arcs: lo < x < hi
    auto it = std::upper_bound(arcs.begin(), arcs.end(), x, [](const Rational& v, const Arc& a) { return v < a.lo; });
    if (it == arcs.begin()) return false;
    --it;
    return it->lo < x && x < it->hi;
}

// ---------------------------------------------------------------- oscillation, 1/x

OscillationReport oscillation_1x(const RotationContext& ctx, const std::string& angle_spec, const Osc1xConfig& cfg) {
    const Rational g = cfg.gamma;
    if (g <= 0 || g > 1) throw ValidationError("gamma must lie in (0,1], got " + to_string(g));
    std::optional<RotationContext> mir;
    const Oriented o = orient(ctx, cfg.n, mir);
    const RotationContext& c = *o.ctx;
    const auto& t = c.table();
    const std::size_t n = o.n;

    OscillationReport rep;
    rep.kind = "1x";
    rep.angle = AngleInfo::of(ctx, angle_spec);
    rep.mirrored = o.mirrored;
    rep.level = cfg.n;
    rep.q_n = t.q(n);
    rep.q_next = t.q(n + 1);
    rep.gamma = g;

    const Integer& qn = rep.q_n;
    const Integer& qn1 = rep.q_next;
    const unsigned long gn = g.get_num().get_ui();
    const unsigned long gd = g.get_den().get_ui();
    if (!(pow(qn1, gd) > pow(qn, gd + gn))) rep.failed_hypotheses.push_back("q_{n+1} > q_n^{1+gamma}");
    if (!(pow(qn, gn) * pow(Integer(gn), gd) > pow(Integer(1000 * gd), gd))) {
        rep.failed_hypotheses.push_back("q_n^gamma > 1000/gamma");
    }
    if (cfg.require_hypotheses && !rep.failed_hypotheses.empty()) {
        throw PreconditionError("oscillation_1x hypothesis fails at level " + std::to_string(cfg.n) + ": " +
                                rep.failed_hypotheses.front() + " (q_n = " + to_string(qn) +
                                ", q_{n+1} = " + to_string(qn1) + ")");
    }

    rep.N = to_u64(ceil_of(Rational(g * Rational(qn1) / 250)), "N");
    {
        // largest k with k^{2d} q_n^{2d+gn} <= q_{n+1}^{2d}
        const unsigned long e = 2 * gd;
        Integer r = pow(qn1, e) / pow(qn, e + gn);
        Integer k;
        mpz_root(k.get_mpz_t(), r.get_mpz_t(), e);
        rep.k_max = to_u64(k, "k bound");
    }
    c.require_valid(I(rep.N));
    require_budget("oscillation_1x", 2.0L * cfg.samples * rep.N, cfg.budget);

    // A = U_j (-g/(1000 q_n), 0) - j alpha, B = U_j (-(1/4 + g/1000)/q_n, -1/(4 q_n)) - j alpha
    const u64 q = to_u64(qn, "q_n");
    const Rational len = g / (Rational(qn) * 1000);
    const Rational a_lo = -len;
    const Rational b_lo = -(Rational(1, 4) + g / 1000) / Rational(qn);
    const Rational alpha = c.alpha_proxy();
    std::vector<Rational> shifts(q);
    for (u64 j = 0; j < q; ++j) {
        shifts[j] = frac(Rational(I(j)) * alpha);
        rep.A.add_circle_arc(a_lo - shifts[j], len);
        rep.B.add_circle_arc(b_lo - shifts[j], len);
    }
    rep.A.finish();
    rep.B.finish();
    rep.measure_A = rep.A.measure();
    rep.measure_B = rep.B.measure();
    rep.measure_target = g / 1000;
    rep.measure_target.canonicalize();

    const double log_qn = log_of(qn);
    rep.threshold_A = to_double(g) / 4.0 * to_double(qn1) * log_qn;
    rep.threshold_B = to_double(g) / 100.0 * to_double(qn1) * log_qn;

    const auto design = SampleDesign::make(cfg.samples, cfg.seed);
    const PowerObservable f(1.0, 1.0, 0.0);
    rep.samples_A.resize(cfg.samples);
    rep.samples_B.resize(cfg.samples);
    parallel_for(cfg.samples, [&](std::size_t i) {
        const u64 j = to_u64(floor_of(Rational(Integer(I(i)) * qn, I(cfg.samples))), "arc index");
        const Rational off = in_arc_offset(i, cfg.samples, q, design.offset);
        for (int which = 0; which < 2; ++which) {
            auto& s = which == 0 ? rep.samples_A[i] : rep.samples_B[i];
            const auto& set = which == 0 ? rep.A : rep.B;
            s.x = grid_inside(c, (which == 0 ? a_lo : b_lo) - shifts[j], len, off);
            s.member = set.contains(s.x);
            s.sums = trimsum::trimmed_sums_upto(c, f, s.x, rep.N, rep.k_max);
        }
    });

    rep.min_A = std::numeric_limits<double>::infinity();
    rep.max_B = -std::numeric_limits<double>::infinity();
    bool members = true;
    std::optional<u64> all_good;
    for (u64 k = 0; k <= rep.k_max; ++k) {
        bool ok = true;
        for (const auto& s : rep.samples_A) ok = ok && s.sums[k] > rep.threshold_A;
        if (!ok) break;
        all_good = k;
    }
    rep.largest_k_all_A = all_good;
    for (const auto& s : rep.samples_A) {
        members = members && s.member;
        const double m = *std::min_element(s.sums.begin(), s.sums.end());
        rep.min_A = std::min(rep.min_A, m);
        if (!(m > rep.threshold_A)) ++rep.violations_A;
    }
    for (const auto& s : rep.samples_B) {
        members = members && s.member;
        const double m = *std::max_element(s.sums.begin(), s.sums.end());
        rep.max_B = std::max(rep.max_B, m);
        if (!(m < rep.threshold_B)) ++rep.violations_B;
    }
    if (!members) rep.notes.push_back("a sample failed the exact membership test");

    if (o.mirrored) {
        // S_N^k(x; alpha) = S_N^k(R^{N-1} x; 1 - alpha) with x = y - (N-1) alpha
        const Rational back = Rational(I(rep.N - 1)) * ctx.alpha_proxy();
        bool same = true;
        for (std::size_t i = 0; i < std::min<std::size_t>(4, rep.samples_A.size()); ++i) {
            const auto& s = rep.samples_A[i];
            const auto direct = trimsum::trimmed_sums_upto(ctx, f, frac(s.x - back), rep.N, 0);
            same = same && std::fabs(direct[0] - s.sums[0]) <= 1e-12 * std::fabs(s.sums[0]);
        }
        rep.notes.push_back(same ? "mirror coupling verified on 4 samples" : "mirror coupling mismatch");
        members = members && same;
    }

    rep.pass = rep.failed_hypotheses.empty() && members && rep.measure_A == rep.measure_target &&
               rep.measure_B == rep.measure_target && rep.violations_A == 0 && rep.violations_B == 0;
    return rep;
}

// ---------------------------------------------------------------- oscillation, x^-beta

OscBetaReport oscillation_beta(const RotationContext& ctx, const std::string& angle_spec, const OscBetaConfig& cfg) {
    const Rational eps = cfg.epsilon;
    if (!(eps > 0 && eps < Rational(1, 100))) {
        throw PreconditionError("epsilon must lie in (0, 1/100), got " + to_string(eps));
    }
    if (!(cfg.beta > 1.0)) throw ValidationError("oscillation_beta needs beta > 1");
    std::optional<RotationContext> mir;
    const Oriented o = orient(ctx, cfg.n, mir);
    const RotationContext& c = *o.ctx;
    const auto& t = c.table();
    const std::size_t n = o.n;
    if (n < 2) throw PreconditionError("oscillation_beta needs level n >= 2");

    OscBetaReport rep;
    rep.angle = AngleInfo::of(ctx, angle_spec);
    rep.mirrored = o.mirrored;
    rep.level = cfg.n;
    rep.q_n = t.q(n);
    rep.q_next = t.q(n + 1);
    rep.epsilon = eps;
    rep.beta = cfg.beta;
    rep.k_hat = cfg.k_hat;

    const Rational upper = (1 - eps) * Rational(rep.q_next);
    rep.N = cfg.N == 0 ? to_u64(floor_of(upper), "N") : cfg.N;
    if (I(rep.N) < rep.q_n || Rational(I(rep.N)) > upper) {
        throw PreconditionError("N = " + std::to_string(rep.N) + " is outside [q_n, (1 - epsilon) q_{n+1}]");
    }
    const Rational kr = cfg.k_hat * Rational(I(rep.N)) / Rational(rep.q_n);
    if (kr.get_den() != 1 || kr < 0) {
        throw PreconditionError("k = khat N / q_n = " + to_string(kr) + " is not a natural number");
    }
    rep.k = to_u64(kr.get_num(), "k");
    c.require_valid(I(rep.N));
    require_budget("oscillation_beta", 2.0L * cfg.samples * rep.N, cfg.budget);

    // delta_m = |q_{m-1} alpha - p_{m-1}| for the proxy angle
    const Rational alpha = c.alpha_proxy();
    auto delta = [&](std::size_t m) -> Rational {
        Rational d = Rational(t.q(m - 1)) * alpha - Rational(t.p(m - 1));
        if (d < 0) d = -d;
        d.canonicalize();
        return d;
    };
    const Rational dn = delta(n);
    const bool main_case = (1 - eps / 2) * Rational(rep.q_n) > Rational(t.q(n - 1));
    const Rational len = main_case ? eps / 10 * dn : eps / 20 * delta(n - 1);
    const Integer arcs_z = main_case ? Integer(rep.q_n - t.q(n - 1)) : rep.q_n;
    const u64 arcs = to_u64(arcs_z, "arc count");
    if (!main_case) rep.notes.push_back("(1 - eps/2) q_n <= q_{n-1}: arcs of length eps delta_{n-1}/20 over all q_n shifts");
    std::vector<Rational> shifts(arcs);
    for (u64 j = 0; j < arcs; ++j) {
        shifts[j] = frac(-Rational(I(j)) * alpha);
        rep.A_prime.add_circle_arc(shifts[j], len);
    }
    rep.A_prime.finish();
    rep.measure_A_prime = rep.A_prime.measure();
    rep.measure_floor = eps * eps / 1000;
    rep.measure_floor.canonicalize();
    rep.shift = eps / 4 * dn;
    rep.shift.canonicalize();

    const auto design = SampleDesign::make(cfg.samples, cfg.seed);
    const PowerObservable f(cfg.beta, 1.0, 0.0);
    std::vector<double> sx(cfg.samples), sy(cfg.samples);
    std::vector<char> member(cfg.samples);
    parallel_for(cfg.samples, [&](std::size_t i) {
        const u64 j = to_u64(floor_of(Rational(Integer(I(i)) * arcs_z, I(cfg.samples))), "arc index");
        const Rational x = grid_inside(c, shifts[j], len, in_arc_offset(i, cfg.samples, arcs, design.offset));
        member[i] = rep.A_prime.contains(x);
        sx[i] = trimsum::trimmed_sum(c, f, x, rep.N, rep.k).trimmed;
        sy[i] = trimsum::trimmed_sum(c, f, frac(x + rep.shift), rep.N, rep.k).trimmed;
    });
    if (std::find(member.begin(), member.end(), 0) != member.end()) {
        rep.notes.push_back("a sample failed the exact membership test");
    }

    // case (i): one value carries a third of the samples; case (ii): split at the lower tertile
    std::vector<double> sorted = sx;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t third = (cfg.samples + 2) / 3;
    std::optional<double> heavy;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        if (j - i >= third) {
            heavy = sorted[i];
            break;
        }
        i = j;
    }
    double min_a = std::numeric_limits<double>::infinity();
    double max_b = -std::numeric_limits<double>::infinity();
    if (heavy) {
        rep.s0 = *heavy;
        rep.notes.push_back("constant value on a third of A'");
        for (std::size_t i = 0; i < sx.size(); ++i) {
            if (sx[i] != *heavy) continue;
            ++rep.count_A;
            ++rep.count_B;
            min_a = std::min(min_a, sx[i]);
            max_b = std::max(max_b, sy[i]);
        }
    } else {
        rep.s0 = sorted[third - 1];
        for (std::size_t i = 0; i < sx.size(); ++i) {
            if (sx[i] > rep.s0) {
                ++rep.count_A;
                min_a = std::min(min_a, sx[i]);
            } else {
                ++rep.count_B;
                max_b = std::max(max_b, sy[i]);
            }
        }
    }
    rep.gap = (rep.count_A && rep.count_B) ? min_a - max_b : 0.0;

    const double N = static_cast<double>(rep.N);
    const double qn = to_double(rep.q_n);
    const double kh = to_double(cfg.k_hat);
    double scale = N * std::pow(qn, cfg.beta - 1.0);
    if (rep.k > 0 && kh > 0) {
        scale = std::min(scale, std::pow(kh, -2.0) * std::pow(N, cfg.beta) * std::pow(double(rep.k), 1.0 - cfg.beta));
    }
    rep.scale = to_double(eps) * scale;
    rep.fitted_c = rep.gap / rep.scale;
    return rep;
}

// ---------------------------------------------------------------- pointwise oscillation

PointOscReport point_osc(const RotationContext& ctx, const std::string& angle_spec, const PointOscConfig& cfg) {
    const auto& t = ctx.table();
    const std::size_t n = cfg.n;
    if (n < 1 || n + 1 > t.top()) throw LengthError("level " + std::to_string(n) + " is outside the guarded table");
    PointOscReport rep;
    rep.angle = AngleInfo::of(ctx, angle_spec);
    rep.level = n;
    rep.q_n = t.q(n);
    rep.q_next = t.q(n + 1);
    rep.psi_level = cfg.psi_level;

    const double qn = to_double(rep.q_n);
    const double lq = log_of(rep.q_n);
    double psi = std::numeric_limits<double>::quiet_NaN();
    try {
        psi = diophantine::iterated_log(cfg.psi_level, qn);
    } catch (const DomainError&) {
        rep.failed_hypotheses.push_back("psi(q_n) is undefined");
    }

    std::optional<u64> literal;
    try {
        const double l5 = diophantine::iterated_log(5, qn);
        literal = static_cast<u64>(std::ceil(to_double(rep.q_next) * l5 / lq));
    } catch (const DomainError&) {
    }
    if (cfg.N) {
        rep.N = *cfg.N;
        rep.generalized_scale = true;
    } else if (literal) {
        rep.N = *literal;
        rep.generalized_scale = false;
    } else {
        throw PreconditionError("the literal scale N = q_{n+1} log_5(q_n)/ln(q_n) is undefined at q_n = " +
                                to_string(rep.q_n) + "; pass N explicitly");
    }

    const double lower = qn * lq * psi;
    const double qn1 = to_double(rep.q_next);
    if (!(qn1 > lower)) rep.failed_hypotheses.push_back("q_{n+1} > q_n ln(q_n) psi(q_n)");
    if (!(qn1 < qn * lq * lq)) rep.failed_hypotheses.push_back("q_{n+1} < q_n ln(q_n)^2");
    if (contfrac::ConvergentTable::convergent_side(n) < 0) rep.failed_hypotheses.push_back("alpha - p_n/q_n > 0");

    rep.cluster = trimsum::cluster_gap_bound(ctx, cfg.x, n, rep.N, 1);
    if (!(to_double(rep.cluster.epsilon) * lower < 1.0)) {
        rep.failed_hypotheses.push_back("x_min^{q_n} < 1/(q_n ln(q_n) psi(q_n))");
    }
    rep.half_N_log_N = 0.5 * static_cast<double>(rep.N) * std::log(static_cast<double>(rep.N));
    if (rep.failed_hypotheses.empty() && rep.cluster.hypotheses_hold) {
        rep.verdict = rep.cluster.measured >= rep.half_N_log_N * (1.0 - trimsum::verdict_slack);
    }
    return rep;
}

// ---------------------------------------------------------------- bound suites

QnBoundSuite qn_bound_suite(const RotationContext& ctx, const std::string& angle_spec, const Integer& q_limit,
                            const SampleDesign& design, double bound_scale, u64 budget) {
    const auto& t = ctx.table();
    std::vector<std::size_t> levels;
    std::vector<u64> grid;
    for (std::size_t n = 1; n <= t.top() && t.q(n) <= q_limit; ++n) {
        levels.push_back(n);
        const u64 q = to_u64(t.q(n), "q_n");
        if (grid.empty() || grid.back() != q) grid.push_back(q);
    }
    if (levels.empty()) throw ValidationError("no level with q_n <= " + to_string(q_limit));
    if (levels.back() == t.top()) throw LengthError("guard table ends before q_n exceeds " + to_string(q_limit));
    ctx.require_valid(I(grid.back()));
    require_budget("qn bound suite", static_cast<long double>(design.G) * grid.back(), budget);

    QnBoundSuite suite;
    suite.angle = AngleInfo::of(ctx, angle_spec);
    suite.bound_scale = bound_scale;
    suite.design = design;

    const auto xs = design.points(ctx);
    const PowerObservable f(1.0, 1.0, 0.0);
    const auto one = diophantine::TrimmingSequence::constant(1);
    const observables::Normalizer unit{observables::Normalizer::Kind::constant, 1.0, 1.0};
    std::vector<std::vector<trimsum::ProfilePoint>> prof(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { prof[i] = trimsum::trimmed_profile(ctx, f, xs[i], grid, one, unit); });

    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t n : levels) {
            const u64 q = t.q(n).get_ui();
            const auto it = std::lower_bound(grid.begin(), grid.end(), q);
            const auto& p = prof[i][static_cast<std::size_t>(it - grid.begin())];
            QnBoundRow row;
            row.n = n;
            row.q_n = t.q(n);
            row.x_index = i;
            row.x = xs[i];
            row.lhs = std::fabs(p.trimmed - static_cast<double>(q) * log_of(t.q(n)));
            row.bound = bound_scale * 7.0 * static_cast<double>(q);
            row.pass = row.lhs <= row.bound + trimsum::verdict_slack * row.bound;
            if (!row.pass) suite.failures.push_back(row);
            suite.rows.push_back(std::move(row));
        }
    }
    return suite;
}

std::vector<LogPropPoint> logprop_trajectory(const contfrac::ConvergentTable& table, const std::vector<Integer>& grid) {
    std::vector<LogPropPoint> out;
    auto ratio_at = [&](const Integer& N) {
        if (N < 2) throw ValidationError("logprop ratio needs N >= 2");
        const auto digits = contfrac::ostrowski_expand(N, table);
        const auto sums = contfrac::weighted_log_sums(digits, table);
        return to_double(N) * log_of(N) / sums.main_term;
    };
    Integer top(0);
    for (const auto& N : grid) {
        out.push_back({N, ratio_at(N), false, table.level_of(N)});
        top = std::max(top, N);
    }
    for (std::size_t n = 1; n + 1 <= table.top(); ++n) {
        const Integer N = table.a(n) * table.q(n);
        if (table.q(n) < 2 || N > top) continue;
        out.push_back({N, ratio_at(N), true, n});
    }
    return out;
}

}  // namespace trimbirk::experiments
