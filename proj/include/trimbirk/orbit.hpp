#pragma once

// Exact orbit simulation for the rotation R(x) = x + alpha mod 1.
//
// alpha is replaced by a convergent p_M/q_M deep enough that the ordering of
// the first max_valid_N orbit points is the same as for alpha itself. All
// positions are integers over a common denominator D, so every comparison is
// exact.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trimbirk/contfrac.hpp"
#include "trimbirk/numeric.hpp"

namespace trimbirk::orbit {

using u64 = std::uint64_t;

/// Default ratio q_M / N_budget demanded of the proxy.
inline Integer default_safety() { return Integer(1) << 20; }

class RotationContext {
public:
    /// Picks the smallest guard level M with q_{M-2} >= N_budget and
    /// q_M >= safety * N_budget. Rational streams cannot be guarded.
    static RotationContext make(const contfrac::CoefficientStream& stream, const Integer& N_budget,
                                const Integer& safety = default_safety());

    /// Rotation by the rational p/q itself. The orbit has period q and
    /// max_valid_N = q.
    static RotationContext rational(const Integer& p, const Integer& q);

    [[nodiscard]] const Integer& p() const noexcept { return p_; }
    [[nodiscard]] const Integer& q() const noexcept { return q_; }
    [[nodiscard]] Rational alpha_proxy() const { return Rational(p_, q_); }
    [[nodiscard]] std::size_t guard_level() const noexcept { return M_; }
    [[nodiscard]] const Integer& max_valid_N() const noexcept { return max_valid_N_; }
    [[nodiscard]] const contfrac::ConvergentTable& table() const noexcept { return *table_; }
    [[nodiscard]] const contfrac::DeltaTable& deltas() const noexcept { return *deltas_; }
    [[nodiscard]] const contfrac::CoefficientStream& stream() const noexcept { return *stream_; }
    [[nodiscard]] const std::string& fingerprint() const noexcept { return fingerprint_; }
    [[nodiscard]] bool is_rational_angle() const noexcept { return rational_; }

    /// The same construction for 1 - alpha, with proxy (q_M - p_M)/q_M.
    [[nodiscard]] RotationContext mirrored() const;

    /// Throws RangeError when N exceeds max_valid_N.
    void require_valid(const Integer& N) const;

private:
    RotationContext() = default;
    void finish();

    std::shared_ptr<const contfrac::CoefficientStream> stream_;
    std::shared_ptr<const contfrac::ConvergentTable> table_;
    std::shared_ptr<const contfrac::DeltaTable> deltas_;
    Integer p_, q_;
    std::size_t M_ = 0;
    Integer max_valid_N_;
    Integer safety_;
    std::string fingerprint_;
    bool rational_ = false;
};

/// FNV-1a over the digit prefix and guard level, as 16 hex digits.
std::string fingerprint(const std::vector<Integer>& digits, std::size_t guard_level);

/// Start point and step of an orbit on the common grid 1/D, where
/// D = lcm(q_M, denominator of x).
struct Frame {
    Integer D, step, start;
    u128 D128 = 0, step128 = 0, start128 = 0;
    bool narrow = false;  // D < 2^63: 64-bit arithmetic suffices
};

Frame make_frame(const RotationContext& ctx, const Rational& x);

/// Calls f(j, pos, D) for j = 0..N-1 where pos/D = R^j(x). pos and D are
/// u64 or u128 depending on the frame width.
template <class F>
void for_each_position(const Frame& fr, u64 N, F&& f) {
    if (fr.narrow) {
        const auto D = static_cast<u64>(fr.D128);
        const auto step = static_cast<u64>(fr.step128);
        auto pos = static_cast<u64>(fr.start128);
        for (u64 j = 0; j < N; ++j) {
            f(j, pos, D);
            pos += step;
            if (pos >= D) pos -= D;
        }
    } else {
        const u128 D = fr.D128;
        const u128 step = fr.step128;
        u128 pos = fr.start128;
        for (u64 j = 0; j < N; ++j) {
            f(j, pos, D);
            pos += step;
            if (pos >= D) pos -= D;
        }
    }
}

struct OrbitPoint {
    u64 index = 0;
    Integer numerator;
    Integer denominator;

    [[nodiscard]] Rational position() const { return Rational(numerator, denominator); }
    /// Representative in [-1/2, 1/2).
    [[nodiscard]] Rational signed_position() const;
    [[nodiscard]] bool is_zero() const { return numerator == 0; }
};

/// Half-open, open or closed interval with exact rational endpoints.
struct Interval {
    Rational lo, hi;
    bool lo_closed = false;
    bool hi_closed = true;

    static Interval left_open(Rational u, Rational v) { return {std::move(u), std::move(v), false, true}; }
    static Interval right_open(Rational u, Rational v) { return {std::move(u), std::move(v), true, false}; }
    static Interval open(Rational u, Rational v) { return {std::move(u), std::move(v), false, false}; }
    [[nodiscard]] bool contains(const Rational& y) const;
};

OrbitPoint position(const RotationContext& ctx, const Rational& x, const Integer& j);

std::vector<OrbitPoint> k_smallest_positive(const RotationContext& ctx, const Rational& x, u64 N, u64 k);

struct FastSelection {
    std::vector<OrbitPoint> points;
    bool used_fallback = false;
    std::string notice;
};

/// Same result as k_smallest_positive, computed from the gap structure of the
/// orbit in O(k + log q_M) big-integer steps. Falls back to the heap scan when
/// a structural check fails.
FastSelection k_smallest_fast(const RotationContext& ctx, const Rational& x, u64 N, u64 k);

OrbitPoint x_min(const RotationContext& ctx, const Rational& x, u64 N);

/// The point with the largest position in (0,1], a point at 0 counting as 1.
OrbitPoint x_max(const RotationContext& ctx, const Rational& x, u64 N);

/// #{0 <= j < N : R^j(x) in I}, via floor sums.
Integer count_in_interval(const RotationContext& ctx, const Rational& x, u64 N, const Interval& I);

struct J1Result {
    std::size_t level = 0;
    bool sign_positive = false;
    bool hypothesis_holds = false;
    bool conclusion_holds = false;
    u64 j1_N = 0;
    u64 j1_qn = 0;
};

/// Evaluates the hypothesis "top point of the first q_n is <= -b_n delta_{n+1}"
/// and, independently, whether j_1^N(x) = j_1^{q_n}(x).
J1Result j1_coincidence(const RotationContext& ctx, const Rational& x, u64 N);

/// Sum_{i=0}^{n-1} floor((a*i + b)/m) for n >= 0, m >= 1, a, b >= 0.
Integer floor_sum(Integer n, Integer m, Integer a, Integer b);

/// The x on the proxy grid with numerator a, a/q_M.
Rational grid_point(const RotationContext& ctx, const Integer& a);

}  // namespace trimbirk::orbit
