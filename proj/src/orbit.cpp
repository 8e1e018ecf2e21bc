#include "trimbirk/orbit.hpp"

#include <algorithm>
#include <cstdio>
#include <queue>
#include <utility>

#include "trimbirk/error.hpp"

namespace trimbirk::orbit {

using contfrac::CoefficientStream;
using contfrac::ConvergentTable;

namespace {

constexpr std::size_t max_guard_depth = 20000;

const Integer& two_pow_126() {
    static const Integer v = Integer(1) << 126;
    return v;
}

}  // namespace

std::string fingerprint(const std::vector<Integer>& digits, std::size_t guard_level) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& a : digits) {
        feed(a.get_str());
        feed(",");
    }
    feed("|" + std::to_string(guard_level));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void RotationContext::finish() {
    if (q_ >= two_pow_126()) {
        throw RangeError("proxy denominator q_" + std::to_string(M_) + " needs more than 126 bits");
    }
    deltas_ = std::make_shared<const contfrac::DeltaTable>(contfrac::delta_table(*table_, contfrac::QuadraticNumber(Rational(p_, q_))));
    fingerprint_ = orbit::fingerprint(table_->digits(), M_);
}

RotationContext RotationContext::make(const CoefficientStream& stream, const Integer& N_budget, const Integer& safety) {
    if (stream.is_finite()) {
        throw LengthError("terminating stream cannot guard a rotation: the angle " + stream.exact_value()->to_string() +
                          " is rational");
    }
    if (N_budget < 1 || safety < 1) {
        throw ValidationError("N_budget and safety must be positive");
    }
    const Integer target = safety * N_budget;
    std::size_t depth = 16;
    while (true) {
        ConvergentTable t = contfrac::convergents(stream, depth);
        for (std::size_t M = 3; M <= t.top(); ++M) {
            if (t.q(M - 2) >= N_budget && t.q(M) >= target) {
                RotationContext ctx;
                ctx.stream_ = std::make_shared<const CoefficientStream>(stream);
                ctx.table_ = std::make_shared<const ConvergentTable>(contfrac::convergents(stream, M - 1));
                ctx.M_ = M;
                ctx.p_ = ctx.table_->p(M);
                ctx.q_ = ctx.table_->q(M);
                ctx.max_valid_N_ = ctx.table_->q(M - 2);
                ctx.safety_ = safety;
                ctx.finish();
                return ctx;
            }
        }
        if (depth >= max_guard_depth) {
            throw LengthError("no guard level within " + std::to_string(max_guard_depth) + " digits");
        }
        depth *= 2;
    }
}

RotationContext RotationContext::rational(const Integer& p, const Integer& q) {
    const CoefficientStream s = contfrac::cfe_of_rational(p, q);
    RotationContext ctx;
    ctx.stream_ = std::make_shared<const CoefficientStream>(s);
    ctx.table_ = std::make_shared<const ConvergentTable>(contfrac::convergents(s, *s.available_length()));
    ctx.M_ = ctx.table_->top();
    ctx.p_ = ctx.table_->p(ctx.M_);
    ctx.q_ = ctx.table_->q(ctx.M_);
    ctx.max_valid_N_ = ctx.q_;
    ctx.safety_ = 1;
    ctx.rational_ = true;
    ctx.finish();
    return ctx;
}

RotationContext RotationContext::mirrored() const {
    if (rational_) {
        return rational(q_ - p_, q_);
    }
    const CoefficientStream m = contfrac::mirror(*stream_);
    const std::size_t M = table_->a(1) >= 2 ? M_ + 1 : M_ - 1;
    RotationContext ctx;
    ctx.stream_ = std::make_shared<const CoefficientStream>(m);
    ctx.table_ = std::make_shared<const ConvergentTable>(contfrac::convergents(m, M - 1));
    ctx.M_ = M;
    ctx.p_ = ctx.table_->p(M);
    ctx.q_ = ctx.table_->q(M);
    if (ctx.q_ != q_ || ctx.p_ != q_ - p_) {
        throw ConstructionError("mirrored proxy " + to_string(Rational(ctx.p_, ctx.q_)) + " does not match 1 - " +
                                to_string(alpha_proxy()));
    }
    ctx.max_valid_N_ = max_valid_N_;
    ctx.safety_ = safety_;
    ctx.finish();
    return ctx;
}

void RotationContext::require_valid(const Integer& N) const {
    if (N < 0 || N > max_valid_N_) {
        throw RangeError("N = " + N.get_str() + " outside the certified range [0, " + max_valid_N_.get_str() + "]");
    }
}

Rational OrbitPoint::signed_position() const {
    Rational y(numerator, denominator);
    y.canonicalize();
    if (2 * y >= 1) y -= 1;
    return y;
}

bool Interval::contains(const Rational& y) const {
    const bool above = lo_closed ? y >= lo : y > lo;
    const bool below = hi_closed ? y <= hi : y < hi;
    return above && below;
}

Frame make_frame(const RotationContext& ctx, const Rational& x) {
    if (x < 0 || x >= 1) {
        throw DomainError("start point " + to_string(x) + " is outside [0,1)");
    }
    Frame fr;
    mpz_lcm(fr.D.get_mpz_t(), ctx.q().get_mpz_t(), x.get_den().get_mpz_t());
    if (fr.D >= two_pow_126()) {
        throw RangeError("common denominator of x and the proxy needs more than 126 bits");
    }
    fr.step = ctx.p() * (fr.D / ctx.q());
    fr.start = x.get_num() * (fr.D / x.get_den());
    fr.D128 = to_u128(fr.D);
    fr.step128 = to_u128(fr.step);
    fr.start128 = to_u128(fr.start);
    fr.narrow = fr.D < (Integer(1) << 63);
    return fr;
}

OrbitPoint position(const RotationContext& ctx, const Rational& x, const Integer& j) {
    ctx.require_valid(j);
    const Frame fr = make_frame(ctx, x);
    Integer pos = (fr.start + j * fr.step) % fr.D;
    return OrbitPoint{static_cast<u64>(j.get_ui()), pos, fr.D};
}

namespace {

OrbitPoint make_point(u64 j, u128 pos, u128 D) { return OrbitPoint{j, from_u128(pos), from_u128(D)}; }

void check_query(const RotationContext& ctx, u64 N, u64 k) {
    ctx.require_valid(Integer(static_cast<unsigned long>(N)));
    if (k > N) {
        throw ValidationError("k = " + std::to_string(k) + " exceeds N = " + std::to_string(N));
    }
}

// #{0 <= j < n : (a + j s) mod m <= T}
Integer count_le(const Integer& a, const Integer& s, const Integer& m, const Integer& n, const Integer& T) {
    if (T < 0 || n == 0) return 0;
    if (T >= m - 1) return n;
    return n + floor_sum(n, m, s, a) - floor_sum(n, m, s, a + m - T - 1);
}

struct Extreme {
    Integer value;  // residue
    Integer index;  // time j
};

// Smallest residue of (a + j s) mod m over 0 <= j < n, zero excluded unless
// zero_ok. Requires gcd(s, m) = 1 and a in [0, m).
std::optional<Extreme> smallest_residue(const Integer& a, const Integer& s, const Integer& m, const Integer& n, bool zero_ok) {
    if (n <= 0) return std::nullopt;
    const Integer zeros = zero_ok ? Integer(0) : count_le(a, s, m, n, 0);
    auto positive_upto = [&](const Integer& T) -> Integer { return count_le(a, s, m, n, T) - zeros; };
    Integer lo = zero_ok ? 0 : 1;
    Integer hi = m - 1;
    if (lo > hi || positive_upto(hi) == 0) return std::nullopt;
    while (lo < hi) {
        Integer mid = (lo + hi) / 2;
        if (positive_upto(mid) >= 1) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Integer inv;
    if (mpz_invert(inv.get_mpz_t(), s.get_mpz_t(), m.get_mpz_t()) == 0) {
        if (m == 1) inv = 0;
        else throw DomainError("step not invertible modulo the grid");
    }
    Integer j = ((lo - a) % m + m) % m * inv % m;
    return Extreme{lo, j};
}

// Reduced coordinates: position = r + g * z with z = (a' + j p) mod q.
struct Reduced {
    Integer g, r, a;
    bool zero_ok;
};

Reduced reduce(const RotationContext& ctx, const Frame& fr) {
    Reduced red;
    red.g = fr.D / ctx.q();
    mpz_fdiv_qr(red.a.get_mpz_t(), red.r.get_mpz_t(), fr.start.get_mpz_t(), red.g.get_mpz_t());
    red.zero_ok = red.r > 0;
    return red;
}

}  // namespace

std::vector<OrbitPoint> k_smallest_positive(const RotationContext& ctx, const Rational& x, u64 N, u64 k) {
    check_query(ctx, N, k);
    if (k == 0) return {};
    const Frame fr = make_frame(ctx, x);
    using Entry = std::pair<u128, u64>;  // position, time
    std::priority_queue<Entry> heap;    // largest kept position on top
    for_each_position(fr, N, [&](u64 j, auto pos, auto) {
        if (pos == 0) return;
        if (heap.size() < k) {
            heap.emplace(pos, j);
        } else if (static_cast<u128>(pos) < heap.top().first) {
            heap.pop();
            heap.emplace(pos, j);
        }
    });
    std::vector<OrbitPoint> out(heap.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = make_point(heap.top().second, heap.top().first, fr.D128);
        heap.pop();
    }
    return out;
}

FastSelection k_smallest_fast(const RotationContext& ctx, const Rational& x, u64 N, u64 k) {
    check_query(ctx, N, k);
    FastSelection sel;
    if (k == 0) return sel;
    const Frame fr = make_frame(ctx, x);
    const Reduced red = reduce(ctx, fr);
    const Integer& q = ctx.q();
    const Integer& p = ctx.p();
    const Integer n(static_cast<unsigned long>(N));

    auto fallback = [&](std::string why) {
        sel.points = k_smallest_positive(ctx, x, N, k);
        sel.used_fallback = true;
        sel.notice = "fast selection fell back to heap scan: " + why;
        return sel;
    };

    Integer g;
    mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    if (g != 1 || n > q) return fallback("proxy grid is not a full residue system");

    auto first = smallest_residue(red.a, p, q, n, red.zero_ok);
    if (!first) return sel;  // only the zero point exists

    auto to_point = [&](const Integer& j, const Integer& z) {
        return OrbitPoint{static_cast<u64>(j.get_ui()), red.r + red.g * z, fr.D};
    };
    sel.points.push_back(to_point(first->index, first->value));
    if (k == 1) return sel;

    // Gap structure of {j p mod q : 0 <= j < N}: u gives the smallest positive
    // residue, v the smallest residue of -j p.
    const auto ru = smallest_residue(p, p, q, n - 1, false);
    const auto rv = smallest_residue(q - p, q - p, q, n - 1, false);
    if (!ru || !rv) return fallback("gap structure undefined");
    const Integer u = ru->index + 1;
    const Integer v = rv->index + 1;

    const Integer zeros = red.zero_ok ? Integer(0) : count_le(red.a, p, q, n, 0);
    const u64 available = N - static_cast<u64>(zeros.get_ui());
    const u64 want = std::min<u64>(k, available);

    Integer j = first->index;
    Integer z = first->value;
    while (sel.points.size() < want) {
        Integer next;
        if (j + u < n) {
            next = j + u;
        } else if (j >= v) {
            next = j - v;
        } else {
            next = j + u - v;
        }
        if (next < 0 || next >= n) return fallback("successor index out of window");
        const Integer zn = (red.a + next * p) % q;
        if (zn <= z) return fallback("successor position not increasing");
        sel.points.push_back(to_point(next, zn));
        j = next;
        z = zn;
    }
    return sel;
}

OrbitPoint x_min(const RotationContext& ctx, const Rational& x, u64 N) {
    auto sel = k_smallest_fast(ctx, x, N, 1);
    if (sel.points.empty()) {
        throw DomainError("no strictly positive orbit point among the first " + std::to_string(N));
    }
    return sel.points.front();
}

OrbitPoint x_max(const RotationContext& ctx, const Rational& x, u64 N) {
    check_query(ctx, N, 1);
    const Frame fr = make_frame(ctx, x);
    const Reduced red = reduce(ctx, fr);
    const Integer& q = ctx.q();
    const Integer& p = ctx.p();
    const Integer n(static_cast<unsigned long>(N));
    Integer inv;
    mpz_invert(inv.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    const Integer j0 = ((q - red.a) % q) * inv % q;  // time with z = 0
    if (!red.zero_ok && j0 < n) {
        return OrbitPoint{static_cast<u64>(j0.get_ui()), Integer(0), fr.D};
    }
    auto best = smallest_residue((q - red.a) % q, q - p, q, n, false);
    if (!best) {
        return OrbitPoint{static_cast<u64>(j0.get_ui()), red.r, fr.D};
    }
    const Integer z = (red.a + best->index * p) % q;
    return OrbitPoint{static_cast<u64>(best->index.get_ui()), red.r + red.g * z, fr.D};
}

Integer count_in_interval(const RotationContext& ctx, const Rational& x, u64 N, const Interval& I) {
    ctx.require_valid(Integer(static_cast<unsigned long>(N)));
    const Frame fr = make_frame(ctx, x);
    const Integer n(static_cast<unsigned long>(N));
    const Rational loD = I.lo * fr.D;
    const Rational hiD = I.hi * fr.D;
    Integer L = I.lo_closed ? ceil_of(loD) : floor_of(loD) + 1;
    Integer H = I.hi_closed ? floor_of(hiD) : ceil_of(hiD) - 1;
    if (L < 0) L = 0;
    if (H > fr.D - 1) H = fr.D - 1;
    Integer count = 0;
    if (L <= H) {
        count = count_le(fr.start, fr.step, fr.D, n, H) - count_le(fr.start, fr.step, fr.D, n, L - 1);
    }
    // A point at 0 is also the point 1 of the circle.
    if (L > 0 && I.contains(Rational(1))) {
        count += count_le(fr.start, fr.step, fr.D, n, 0);
    }
    return count;
}

J1Result j1_coincidence(const RotationContext& ctx, const Rational& x, u64 N) {
    J1Result res;
    const auto& t = ctx.table();
    const Integer NN(static_cast<unsigned long>(N));
    res.level = t.level_of(NN);
    const std::size_t n = res.level;
    const Integer& qn = t.q(n);
    const Integer bn = NN / qn;
    res.sign_positive = ConvergentTable::convergent_side(n) > 0;

    const OrbitPoint top = x_max(ctx, x, static_cast<u64>(qn.get_ui()));
    const Rational top_signed = top.is_zero() ? Rational(0) : top.signed_position();
    const Rational bound = -Rational(bn) * ctx.deltas()[n + 1].rational_part();
    res.hypothesis_holds = res.sign_positive && top_signed <= bound;

    res.j1_N = x_min(ctx, x, N).index;
    res.j1_qn = x_min(ctx, x, static_cast<u64>(qn.get_ui())).index;
    res.conclusion_holds = res.j1_N == res.j1_qn;
    return res;
}

Integer floor_sum(Integer n, Integer m, Integer a, Integer b) {
    if (n < 0 || m < 1 || a < 0 || b < 0) {
        throw DomainError("floor_sum expects n >= 0, m >= 1, a >= 0, b >= 0");
    }
    Integer ans = 0;
    while (true) {
        if (a >= m) {
            ans += n * (n - 1) / 2 * (a / m);
            a %= m;
        }
        if (b >= m) {
            ans += n * (b / m);
            b %= m;
        }
        const Integer y_max = a * n + b;
        if (y_max < m) break;
        n = y_max / m;
        b = y_max % m;
        std::swap(m, a);
    }
    return ans;
}

Rational grid_point(const RotationContext& ctx, const Integer& a) {
    Integer r = ((a % ctx.q()) + ctx.q()) % ctx.q();
    Rational x(r, ctx.q());
    x.canonicalize();
    return x;
}

}  // namespace trimbirk::orbit
