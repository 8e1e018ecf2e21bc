#pragma once

// Verification campaigns built on the orbit and trimmed-sum kernels: strong
// and weak law runs over stratified samples, the oscillation constructions
// for Liouville-type angles, and bound suites.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trimbirk/diophantine.hpp"
#include "trimbirk/observables.hpp"
#include "trimbirk/orbit.hpp"
#include "trimbirk/trimsum.hpp"

namespace trimbirk::experiments {

using u64 = std::uint64_t;

inline constexpr u64 default_budget = 500'000'000;

/// Stratified design on the proxy grid: sample i is a_i/q_M with
/// a_i = floor((i + u) q_M / G). The offset u is 1/2 for seed 0 and is drawn
/// from the seed otherwise.
struct SampleDesign {
    u64 G = 1000;
    u64 seed = 0;
    Rational offset{1, 2};

    static SampleDesign make(u64 G, u64 seed);
    [[nodiscard]] std::vector<Rational> points(const orbit::RotationContext& ctx) const;
};

/// Throws BudgetError when `cost` orbit-point evaluations exceed `budget`.
void require_budget(const std::string& what, long double cost, u64 budget);

/// Calls f(i) for i in [0, count) on up to hardware_concurrency threads.
/// Exceptions are rethrown on the caller (the first one by index).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f);

/// Identifies the angle in every report.
struct AngleInfo {
    std::string spec;
    std::string fingerprint;
    std::size_t guard_level = 0;
    std::string proxy;  // "p/q"

    static AngleInfo of(const orbit::RotationContext& ctx, std::string spec);
};

struct LawRow {
    u64 N = 0;
    u64 k = 0;
    double d = 0.0;
    std::vector<double> ratios;  // per sample, S_N^k / d_N
    double max_deviation = 0.0;  // max |ratio - 1|
    double mean_ratio = 0.0;
    std::vector<double> lambda_hat;  // per epsilon
};

struct LawReport {
    std::string kind;  // "strong" or "weak"
    AngleInfo angle;
    std::string observable;
    std::string trimming;
    std::string normalizer;
    SampleDesign design;
    std::vector<double> epsilons;
    std::vector<LawRow> rows;
};

struct LawConfig {
    observables::PowerObservable obs;
    diophantine::TrimmingSequence trim = diophantine::TrimmingSequence::constant(0);
    observables::Normalizer d;
    std::vector<u64> grid;
    SampleDesign design;
    std::vector<double> epsilons{0.5, 0.25, 0.1, 0.05};
    u64 budget = default_budget;
};

/// Per-sample ratio trajectories with their maximal deviation per N.
LawReport strong_law_run(const orbit::RotationContext& ctx, const std::string& angle_spec, const LawConfig& cfg);

/// lambda-hat(|S_N^k/d_N - 1| > eps) over the G stratified samples. An
/// infinite epsilon gives lambda-hat = 0.
LawReport weak_law_run(const orbit::RotationContext& ctx, const std::string& angle_spec, const LawConfig& cfg);

/// Half-open circle arc [lo, hi) or open arc, with exact endpoints in [0,1).
struct Arc {
    Rational lo, hi;  // lo < hi, no wrap
};

/// Finite disjoint union of open intervals inside [0,1), sorted.
struct IntervalUnion {
    std::vector<Arc> arcs;

    /// Adds the open arc (lo, hi) of the circle, splitting at 0 when it wraps.
    void add_circle_arc(const Rational& lo, const Rational& length);
    /// Sorts and checks that the arcs are pairwise disjoint.
    void finish();
    [[nodiscard]] Rational measure() const;
    [[nodiscard]] bool contains(const Rational& x) const;
};

struct SetSample {
    Rational x;
    bool member = false;
    std::vector<double> sums;  // S_N^k for k = 0..k_max
};

struct OscillationReport {
    std::string kind;  // "1x", "beta" or "point"
    AngleInfo angle;
    bool mirrored = false;  // sets and samples refer to 1 - alpha
    std::size_t level = 0;
    Integer q_n, q_next;
    Rational gamma;
    u64 N = 0;
    u64 k_max = 0;
    std::vector<std::string> failed_hypotheses;
    IntervalUnion A, B;
    Rational measure_A, measure_B;
    Rational measure_target;
    double threshold_A = 0.0;
    double threshold_B = 0.0;
    std::vector<SetSample> samples_A, samples_B;
    double min_A = 0.0;  // min over samples and k <= k_max
    double max_B = 0.0;
    u64 violations_A = 0;
    u64 violations_B = 0;
    std::optional<u64> largest_k_all_A;  // largest k with every A sample above the threshold
    bool pass = false;
    std::vector<std::string> notes;
};

struct Osc1xConfig {
    Rational gamma{1};
    std::size_t n = 0;
    u64 samples = 200;
    u64 seed = 0;
    bool require_hypotheses = true;
    u64 budget = default_budget;
};

/// Sets A, B of the weak-law counterexample at level n. Hypotheses:
/// q_{n+1} > q_n^{1+gamma} and q_n^gamma > 1000/gamma. When
/// alpha - p_n/q_n < 0 the construction runs on 1 - alpha.
OscillationReport oscillation_1x(const orbit::RotationContext& ctx, const std::string& angle_spec,
                                 const Osc1xConfig& cfg);

struct OscBetaConfig {
    double beta = 2.0;
    Rational epsilon{1, 200};
    std::size_t n = 0;
    u64 N = 0;  // 0: floor((1 - epsilon) q_{n+1})
    Rational k_hat{2};
    u64 samples = 200;
    u64 seed = 0;
    u64 budget = default_budget;
};

struct OscBetaReport {
    AngleInfo angle;
    bool mirrored = false;
    std::size_t level = 0;
    Integer q_n, q_next;
    u64 N = 0;
    u64 k = 0;
    Rational k_hat;
    Rational epsilon;
    double beta = 0.0;
    IntervalUnion A_prime;
    Rational measure_A_prime;
    Rational measure_floor;  // epsilon^2/1000
    Rational shift;          // epsilon/4 delta_n
    double s0 = 0.0;
    u64 count_A = 0;
    u64 count_B = 0;
    double gap = 0.0;    // min over A of S - max over B of S
    double scale = 0.0;  // epsilon min(N q_n^{beta-1}, khat^-2 N^beta k^{1-beta})
    double fitted_c = 0.0;
    std::vector<std::string> notes;
};

/// Oscillation of S_N^k for f = x^-beta between A' and its shift by
/// epsilon delta_n / 4. The constant c is fitted, never asserted.
OscBetaReport oscillation_beta(const orbit::RotationContext& ctx, const std::string& angle_spec,
                               const OscBetaConfig& cfg);

struct PointOscConfig {
    std::size_t n = 0;
    unsigned psi_level = 2;  // psi = log_<level>
    Rational x;
    std::optional<u64> N;  // required when the literal scale is out of reach
};

struct PointOscReport {
    AngleInfo angle;
    std::size_t level = 0;
    Integer q_n, q_next;
    u64 N = 0;
    bool generalized_scale = true;
    unsigned psi_level = 2;
    std::vector<std::string> failed_hypotheses;
    trimsum::ClusterGapReport cluster;
    double half_N_log_N = 0.0;
    std::optional<bool> verdict;  // measured >= N ln N / 2
};

PointOscReport point_osc(const orbit::RotationContext& ctx, const std::string& angle_spec, const PointOscConfig& cfg);

struct QnBoundRow {
    std::size_t n = 0;
    Integer q_n;
    u64 x_index = 0;
    Rational x;
    double lhs = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct QnBoundSuite {
    AngleInfo angle;
    double bound_scale = 1.0;
    SampleDesign design;
    std::vector<QnBoundRow> rows;
    std::vector<QnBoundRow> failures;
};

/// Checks |S^1_{q_n}(1/x) - q_n ln q_n| <= bound_scale * 7 q_n for all
/// 2 <= n with q_n <= q_limit, one pass per sample.
QnBoundSuite qn_bound_suite(const orbit::RotationContext& ctx, const std::string& angle_spec, const Integer& q_limit,
                            const SampleDesign& design, double bound_scale = 1.0, u64 budget = default_budget);

struct LogPropPoint {
    Integer N;
    double ratio = 0.0;  // N ln N / sum_j b_j q_j ln q_j
    bool witness = false;
    std::size_t level = 0;
};

/// Ratio along the grid plus the witnesses N = a_n q_n for every level with
/// a_n q_n <= max(grid).
std::vector<LogPropPoint> logprop_trajectory(const contfrac::ConvergentTable& table, const std::vector<Integer>& grid);

}  // namespace trimbirk::experiments
