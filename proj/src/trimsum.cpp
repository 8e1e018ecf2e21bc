#include "trimbirk/trimsum.hpp"

#include <algorithm>
#include <cmath>

#include "trimbirk/error.hpp"

namespace trimbirk::trimsum {

using observables::PowerObservable;
using observables::TruncatedObservable;
using orbit::Frame;
using orbit::RotationContext;

namespace {

struct Entry {
    u128 pos = 0;  // zero positions are stored as D so they rank last
    double value = 0.0;
    u64 j = 0;
};

// Keeps the `capacity` most extreme terms seen so far. Every term that is
// rejected or evicted goes into `rest`, so at any time
//   total = rest + sum of kept values.
class Selector {
public:
    Selector(std::size_t capacity, bool by_position) : capacity_(capacity), by_position_(by_position) {
        heap_.reserve(capacity);
    }

    [[nodiscard]] bool more_extreme(const Entry& a, const Entry& b) const noexcept {
        if (by_position_) return a.pos < b.pos;
        if (a.value != b.value) return a.value > b.value;
        return a.j < b.j;
    }

    void offer(const Entry& e) {
        if (capacity_ == 0) {
            rest_.add(e.value);
            return;
        }
        const auto cmp = [this](const Entry& a, const Entry& b) { return more_extreme(a, b); };
        if (heap_.size() < capacity_) {
            heap_.push_back(e);
            std::push_heap(heap_.begin(), heap_.end(), cmp);
            return;
        }
        // heap_.front() is the least extreme kept term
        if (!more_extreme(e, heap_.front())) {
            rest_.add(e.value);
            return;
        }
        rest_.add(heap_.front().value);
        std::pop_heap(heap_.begin(), heap_.end(), cmp);
        heap_.back() = e;
        std::push_heap(heap_.begin(), heap_.end(), cmp);
    }

    // Fast rejection test for the position-keyed case.
    [[nodiscard]] bool rejects_position(u128 pos) const noexcept {
        return by_position_ && heap_.size() == capacity_ && (capacity_ == 0 || pos >= heap_.front().pos);
    }
    void add_rest(double v) noexcept { rest_.add(v); }

    // Kept terms, most extreme first.
    [[nodiscard]] std::vector<Entry> ranked() const {
        std::vector<Entry> out = heap_;
        std::sort(out.begin(), out.end(), [this](const Entry& a, const Entry& b) { return more_extreme(a, b); });
        return out;
    }

    [[nodiscard]] const CompensatedSum& rest() const noexcept { return rest_; }

private:
    std::size_t capacity_;
    bool by_position_;
    std::vector<Entry> heap_;
    CompensatedSum rest_;
};

struct Snapshot {
    u64 N = 0;
    u64 k = 0;
    double total = 0.0;
    double residual = 0.0;
    double trimmed = 0.0;
    std::vector<RemovedTerm> removed;
};

// trimmed = rest + kept terms ranked below k
Snapshot take_snapshot(const Selector& sel, const CompensatedSum& total, u64 N, u64 k) {
    Snapshot s;
    s.N = N;
    s.k = k;
    s.total = total.value();
    s.residual = total.residual();
    const auto ranked = sel.ranked();
    if (k >= N) {
        s.trimmed = 0.0;
        for (const auto& e : ranked) s.removed.push_back({e.j, e.value});
        return s;
    }
    CompensatedSum trimmed = sel.rest();
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (i < k) {
            s.removed.push_back({ranked[i].j, ranked[i].value});
        } else {
            trimmed.add(ranked[i].value);
        }
    }
    s.trimmed = trimmed.value();
    return s;
}

// Streams the orbit once to the largest requested N. `stops` holds (N, k)
// pairs in ascending N.
std::vector<Snapshot> stream_trimmed(const RotationContext& ctx, const PowerObservable& obs, const Rational& x,
                                     const std::vector<std::pair<u64, u64>>& stops) {
    std::vector<Snapshot> out;
    if (stops.empty()) return out;
    const u64 N_max = stops.back().first;
    ctx.require_valid(Integer(static_cast<unsigned long>(N_max)));
    std::size_t capacity = 0;
    for (const auto& [N, k] : stops) capacity = std::max<std::size_t>(capacity, std::min(N, k));

    const Frame fr = orbit::make_frame(ctx, x);
    Selector sel(capacity, obs.one_sided());
    CompensatedSum total;
    std::size_t next = 0;
    out.reserve(stops.size());

    auto flush = [&](u64 seen) {
        while (next < stops.size() && stops[next].first == seen) {
            out.push_back(take_snapshot(sel, total, stops[next].first, stops[next].second));
            ++next;
        }
    };
    flush(0);
    orbit::for_each_position(fr, N_max, [&](u64 j, auto pos, auto D) {
        const u128 key = pos == 0 ? static_cast<u128>(D) : static_cast<u128>(pos);
        if (sel.rejects_position(key)) {
            const double v = obs.at(pos, D);
            total.add(v);
            sel.add_rest(v);
        } else {
            const double v = obs.at(pos, D);
            total.add(v);
            sel.offer(Entry{key, v, j});
        }
        flush(j + 1);
    });
    return out;
}

u64 to_u64_checked(const Integer& v, const char* what) {
    if (v < 0 || !v.fits_ulong_p()) throw RangeError(std::string(what) + " does not fit in 64 bits: " + to_string(v));
    return v.get_ui();
}

double sum_truncated(const RotationContext& ctx, const TruncatedObservable& f, const Rational& x, u64 N) {
    return birkhoff_sum(ctx, f, x, N);
}

// f_n: 1/x cut at 1/(q_n + q_{n-1}); nullopt when the cut is at 1 or beyond
std::optional<TruncatedObservable> level_truncation(const contfrac::ConvergentTable& table, std::size_t n) {
    const Integer s = table.q(n) + table.q(n - 1);
    if (s <= 1) return std::nullopt;
    return observables::truncate(PowerObservable(1.0, 1.0, 0.0), Rational(Integer(1), s));
}

bool within(double lhs, double bound) { return lhs <= bound + verdict_slack * std::fabs(bound); }

}  // namespace

double TrimmedSumResult::removed_sum() const {
    CompensatedSum s;
    for (const auto& r : removed) s.add(r.value);
    return s.value();
}

double birkhoff_sum(const RotationContext& ctx, const PowerObservable& obs, const Rational& x, u64 N) {
    ctx.require_valid(Integer(static_cast<unsigned long>(N)));
    const Frame fr = orbit::make_frame(ctx, x);
    CompensatedSum total;
    orbit::for_each_position(fr, N, [&](u64, auto pos, auto D) { total.add(obs.at(pos, D)); });
    return total.value();
}

double birkhoff_sum(const RotationContext& ctx, const TruncatedObservable& obs, const Rational& x, u64 N) {
    ctx.require_valid(Integer(static_cast<unsigned long>(N)));
    const Frame fr = orbit::make_frame(ctx, x);
    const auto cuts = obs.cuts(fr.D);
    CompensatedSum total;
    orbit::for_each_position(fr, N, [&](u64, auto pos, auto D) { total.add(obs.at(pos, D, cuts)); });
    return total.value();
}

TrimmedSumResult trimmed_sum(const RotationContext& ctx, const PowerObservable& obs, const Rational& x, u64 N,
                             u64 k) {
    auto snaps = stream_trimmed(ctx, obs, x, {{N, k}});
    auto& s = snaps.front();
    TrimmedSumResult r;
    r.N = N;
    r.k = k;
    r.x = x;
    r.fingerprint = ctx.fingerprint();
    r.total = s.total;
    r.residual = s.residual;
    r.trimmed = s.trimmed;
    r.removed = std::move(s.removed);
    return r;
}

std::vector<double> trimmed_sums_upto(const RotationContext& ctx, const PowerObservable& obs, const Rational& x,
                                      u64 N, u64 k_max) {
    const u64 top = std::min(k_max, N);
    auto snaps = stream_trimmed(ctx, obs, x, {{N, top}});
    const auto& s = snaps.front();
    std::vector<double> out(k_max + 1, 0.0);
    // walk k downwards, putting removed terms back smallest first
    CompensatedSum acc;
    acc.add(s.trimmed);
    out[top] = top >= N ? 0.0 : acc.value();
    for (u64 k = top; k-- > 0;) {
        acc.add(s.removed[k].value);
        out[k] = acc.value();
    }
    return out;
}

std::vector<ProfilePoint> trimmed_profile(const RotationContext& ctx, const PowerObservable& obs, const Rational& x,
                                          const std::vector<u64>& N_grid, const diophantine::TrimmingSequence& k,
                                          const observables::Normalizer& d) {
    std::vector<std::pair<u64, u64>> stops;
    stops.reserve(N_grid.size());
    for (std::size_t i = 0; i < N_grid.size(); ++i) {
        if (i > 0 && N_grid[i] <= N_grid[i - 1]) throw ValidationError("profile grid must be strictly ascending");
        const u64 N = N_grid[i];
        stops.emplace_back(N, N == 0 ? 0 : std::min(k.raw(N), N));
    }
    const auto snaps = stream_trimmed(ctx, obs, x, stops);
    std::vector<ProfilePoint> out;
    out.reserve(snaps.size());
    for (const auto& s : snaps) {
        ProfilePoint p;
        p.N = s.N;
        p.k = s.k;
        p.total = s.total;
        p.trimmed = s.trimmed;
        p.d = d(static_cast<double>(s.N), static_cast<double>(s.k));
        p.ratio = p.trimmed / p.d;
        out.push_back(p);
    }
    return out;
}

BoundCheck denjoy_koksma_check(const RotationContext& ctx, const TruncatedObservable& f, const Rational& x,
                               std::size_t n, double bound_scale) {
    const u64 qn = to_u64_checked(ctx.table().q(n), "q_n");
    BoundCheck c;
    const double S = sum_truncated(ctx, f, x, qn);
    c.lhs = std::fabs(S - static_cast<double>(qn) * f.integral());
    c.bound = bound_scale * f.circle_variation();
    c.pass = within(c.lhs, c.bound);
    return c;
}

SandwichCheck sandwich_errlem(const RotationContext& ctx, const Rational& x, u64 N) {
    const auto& table = ctx.table();
    SandwichCheck c;
    c.N = N;
    c.level = table.level_of(Integer(static_cast<unsigned long>(N)));
    c.b = to_u64_checked(Integer(Integer(static_cast<unsigned long>(N)) / table.q(c.level)), "b_n");
    const PowerObservable f(1.0, 1.0, 0.0);
    c.trimmed = trimmed_sum(ctx, f, x, N, c.b + 1).trimmed;
    const auto fn = level_truncation(table, c.level);
    c.truncated = fn ? birkhoff_sum(ctx, *fn, x, N) : 0.0;
    c.lower_ok = within(c.trimmed, c.truncated);
    c.upper_ok = within(c.truncated, c.trimmed + 3.0 * static_cast<double>(N));
    return c;
}

BoundCheck strong1xlembn_check(const RotationContext& ctx, const Rational& x, u64 N) {
    const auto& table = ctx.table();
    const auto digits = contfrac::ostrowski_expand(Integer(static_cast<unsigned long>(N)), table);
    const auto sums = contfrac::weighted_log_sums(digits, table);
    const std::size_t n = digits.level();
    const auto fn = level_truncation(table, n);
    const double S = fn ? birkhoff_sum(ctx, *fn, x, N) : 0.0;
    BoundCheck c;
    c.lhs = std::fabs(S - sums.main_term);
    c.bound = 16.0 * static_cast<double>(N) + 2.0 * sums.digit_log_term;
    c.pass = within(c.lhs, c.bound);
    return c;
}

BoundCheck qn_bound_check(const RotationContext& ctx, const Rational& x, std::size_t n, double bound_scale) {
    const Integer& q = ctx.table().q(n);
    const u64 qn = to_u64_checked(q, "q_n");
    const auto r = trimmed_sum(ctx, PowerObservable(1.0, 1.0, 0.0), x, qn, 1);
    BoundCheck c;
    c.lhs = std::fabs(r.trimmed - static_cast<double>(qn) * log_of(q));
    c.bound = bound_scale * 7.0 * static_cast<double>(qn);
    c.pass = within(c.lhs, c.bound);
    return c;
}

ClusterGapReport cluster_gap_bound(const RotationContext& ctx, const Rational& x, std::size_t n, u64 N, u64 k) {
    const auto& table = ctx.table();
    const Integer& qn = table.q(n);
    const Integer& qn1 = table.q(n + 1);
    const Integer NN(static_cast<unsigned long>(N));
    if (NN < qn || NN >= qn1) {
        throw PreconditionError("cluster_gap_bound needs q_n <= N < q_{n+1}; got N = " + std::to_string(N) +
                                ", q_n = " + to_string(qn) + ", q_{n+1} = " + to_string(qn1));
    }
    ClusterGapReport rep;
    rep.level = n;
    rep.N = N;
    rep.k = k;
    rep.b = to_u64_checked(Integer(NN / qn), "b_n");
    const u64 q = to_u64_checked(qn, "q_n");

    const auto first = orbit::x_min(ctx, x, q);
    rep.epsilon = first.position();

    const PowerObservable f(1.0, 1.0, 0.0);
    rep.measured = trimmed_sum(ctx, f, x, N, k).trimmed - trimmed_sum(ctx, f, x, N, rep.b + 1).trimmed;

    // q_n alpha - p_n for the proxy angle; equals +delta_{n+1} for odd n
    const Rational step = Rational(qn * ctx.p(), ctx.q()) - Rational(table.p(n));
    // cluster points x_min + i step, i = 0..c-1, that occur among the first N
    u64 c = 0;
    if (first.index < N) c = std::min<u64>((N - 1 - first.index) / q + 1, rep.b + 1);
    while (c > 0 && rep.epsilon + Rational(Integer(static_cast<unsigned long>(c - 1))) * step >= 1) --c;
    rep.cluster_size = c;

    const double eps = to_double(rep.epsilon);
    const double inv = 1.0 / to_double(qn1);
    CompensatedSum h;
    for (u64 i = k; i < c; ++i) h.add(1.0 / (eps + static_cast<double>(i) * inv));
    rep.harmonic_bound = h.value();

    if (rep.b < 2) {
        rep.note = "degenerate: b_n <= 1";
    } else if (k >= c) {
        rep.note = "k beyond the cluster: empty harmonic sum";
    } else if (first.is_zero()) {
        rep.note = "orbit hits 0 among the first q_n points";
    } else if (step <= 0) {
        rep.note = "alpha - p_n/q_n < 0: the cluster moves towards 0; use the mirrored angle";
    } else {
        rep.hypotheses_hold = true;
        rep.verdict = rep.measured + verdict_slack * std::fabs(rep.harmonic_bound) >= rep.harmonic_bound;
    }
    return rep;
}

}  // namespace trimbirk::trimsum
