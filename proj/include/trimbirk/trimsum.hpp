#pragma once

// Birkhoff sums and trimmed Birkhoff sums along rotation orbits, and the
// checkable inequalities that relate them to the continued fraction data.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trimbirk/diophantine.hpp"
#include "trimbirk/observables.hpp"
#include "trimbirk/orbit.hpp"

namespace trimbirk::trimsum {

using u64 = std::uint64_t;

struct RemovedTerm {
    u64 j = 0;
    double value = 0.0;
};

struct TrimmedSumResult {
    u64 N = 0;
    u64 k = 0;
    Rational x;
    std::string fingerprint;
    double total = 0.0;
    double residual = 0.0;  // compensation term of the total
    double trimmed = 0.0;
    std::vector<RemovedTerm> removed;  // largest value first

    [[nodiscard]] double removed_sum() const;
};

double birkhoff_sum(const orbit::RotationContext& ctx, const observables::PowerObservable& obs, const Rational& x,
                    u64 N);
double birkhoff_sum(const orbit::RotationContext& ctx, const observables::TruncatedObservable& obs,
                    const Rational& x, u64 N);

/// S_N^k(f)(x). For c2 = 0 the removed terms are those at the k smallest
/// positive positions; for c2 > 0 they are the k largest values, equal values
/// ordered by orbit index. k >= N removes everything.
TrimmedSumResult trimmed_sum(const orbit::RotationContext& ctx, const observables::PowerObservable& obs,
                             const Rational& x, u64 N, u64 k);

/// S_N^k(f)(x) for k = 0..k_max from one pass.
std::vector<double> trimmed_sums_upto(const orbit::RotationContext& ctx, const observables::PowerObservable& obs,
                                      const Rational& x, u64 N, u64 k_max);

struct ProfilePoint {
    u64 N = 0;
    u64 k = 0;
    double total = 0.0;
    double trimmed = 0.0;
    double d = 0.0;
    double ratio = 0.0;
};

/// One pass up to max(N_grid) with a selection structure of size
/// max k(N), snapshotting at each grid point.
std::vector<ProfilePoint> trimmed_profile(const orbit::RotationContext& ctx, const observables::PowerObservable& obs,
                                          const Rational& x, const std::vector<u64>& N_grid,
                                          const diophantine::TrimmingSequence& k,
                                          const observables::Normalizer& d);

/// Relative slack applied on the favourable side of every inequality verdict.
inline constexpr double verdict_slack = 1e-9;

struct BoundCheck {
    double lhs = 0.0;
    double bound = 0.0;
    bool pass = false;
};

/// |S_{q_n}(f_t)(x) - q_n int f_t| against bound_scale * Var(f_t) on the circle.
BoundCheck denjoy_koksma_check(const orbit::RotationContext& ctx, const observables::TruncatedObservable& f,
                               const Rational& x, std::size_t n, double bound_scale = 1.0);

struct SandwichCheck {
    u64 N = 0;
    std::size_t level = 0;
    u64 b = 0;                 // floor(N / q_n)
    double trimmed = 0.0;      // S_N^{b_n+1}(1/x)
    double truncated = 0.0;    // S_N(f_n), f_n cut at 1/(q_n + q_{n-1})
    bool lower_ok = false;
    bool upper_ok = false;
    [[nodiscard]] bool pass() const { return lower_ok && upper_ok; }
};

/// S_N^{b_n+1}(f) <= S_N(f_n) <= S_N^{b_n+1}(f) + 3N for f = 1/x.
SandwichCheck sandwich_errlem(const orbit::RotationContext& ctx, const Rational& x, u64 N);

/// |S_N(f_n)(x) - sum_j b_j q_j ln q_j| <= 16N + 2 sum_{j<n, b_j != 0} a_j q_j ln b_j.
BoundCheck strong1xlembn_check(const orbit::RotationContext& ctx, const Rational& x, u64 N);

/// |S^1_{q_n}(1/x)(x) - q_n ln q_n| <= bound_scale * 7 q_n.
BoundCheck qn_bound_check(const orbit::RotationContext& ctx, const Rational& x, std::size_t n,
                          double bound_scale = 1.0);

struct ClusterGapReport {
    std::size_t level = 0;
    u64 N = 0;
    u64 k = 0;
    u64 b = 0;
    u64 cluster_size = 0;  // b_n or b_n + 1 points x_min + i delta_{n+1}
    Rational epsilon;  // x_min over the first q_n points
    double measured = 0.0;        // S_N^k - S_N^{b_n+1}
    double harmonic_bound = 0.0;  // sum_{i=k}^{cluster_size-1} 1/(eps + i/q_{n+1})
    bool hypotheses_hold = false;
    std::string note;             // reason when the hypotheses fail
    std::optional<bool> verdict;  // measured >= bound, only under the hypotheses
};

/// For odd n the points x_min + i delta_{n+1} form a cluster of large values.
/// All b_n + 1 of them occur among the first N points when x_min comes early
/// enough in the orbit, otherwise the first b_n do. The bound sums over the
/// cluster points present, so with b_n + 1 points it is the full
/// sum_{i=k}^{b_n}. A verdict is given when n is odd, b_n >= 2 and k is
/// inside the cluster; then measured >= harmonic_bound is a theorem.
ClusterGapReport cluster_gap_bound(const orbit::RotationContext& ctx, const Rational& x, std::size_t n, u64 N,
                                   u64 k);

}  // namespace trimbirk::trimsum
