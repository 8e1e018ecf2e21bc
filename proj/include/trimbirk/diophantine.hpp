#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trimbirk/contfrac.hpp"
#include "trimbirk/numeric.hpp"

namespace trimbirk::diophantine {

/// k(N): how many of the largest terms are removed from S_N.
class TrimmingSequence {
public:
    enum class Kind { constant, ceil_log_power, ceil_power, table };

    static TrimmingSequence constant(std::uint64_t c);
    /// ceil((ln N)^p)
    static TrimmingSequence ceil_log_power(double p);
    /// ceil(N^theta), evaluated exactly for rational theta in [0,1].
    static TrimmingSequence ceil_power(const Rational& theta);
    /// values[N-1] = k(N); evaluation beyond the table is an error.
    static TrimmingSequence table(std::vector<std::uint64_t> values, bool monotone);

    /// const:<c> | log | logpow:<p> | pow:<p/q> | table:<v1>,<v2>,...
    static TrimmingSequence parse(std::string_view text);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] bool monotone() const noexcept { return monotone_; }
    [[nodiscard]] std::string describe() const;

    /// The rule value, which may exceed N for tiny N.
    [[nodiscard]] std::uint64_t raw(std::uint64_t N) const;
    /// k(N); throws ValidationError when k(N) > N.
    [[nodiscard]] std::uint64_t operator()(std::uint64_t N) const;
    /// min(k(N), N)
    [[nodiscard]] std::uint64_t clamped(std::uint64_t N) const;
    /// k(N) for N of any size; tables are limited to their length.
    [[nodiscard]] Integer at(const Integer& N) const;

    /// Throws ValidationError at the first N <= N_max with k(N+1) < k(N).
    void verify_monotone(std::uint64_t N_max) const;

private:
    Kind kind_ = Kind::constant;
    std::uint64_t c_ = 0;
    double p_ = 1.0;
    Rational theta_;
    std::vector<std::uint64_t> table_;
    bool monotone_ = true;
};

/// Natural-log iterate log_k(x) with log_1 = ln. Throws DomainError when a
/// level is undefined.
double iterated_log(unsigned k, double x);

/// Certified enclosure [lo, hi] of a positive real.
struct Enclosure {
    BigFloat lo;
    BigFloat hi;
};

/// A product of powers of q, ln q, iterated logs of q and rational constants,
/// or +infinity. Grammar: factor ('*' factor)*, factor = base ['^' exponent],
/// base = q | ln(q) | log<k>(q) | <rational>, exponent = <rational> | <name> |
/// '(' sum of those ')'. The single word "inf" denotes +infinity.
class GrowthBound {
public:
    static GrowthBound parse(std::string_view text, const std::map<std::string, Rational>& params = {});
    static GrowthBound infinity();

    [[nodiscard]] bool is_infinite() const noexcept { return infinite_; }
    [[nodiscard]] const std::string& text() const noexcept { return text_; }
    /// Directed-rounding enclosure at q. Throws DomainError below the validity threshold.
    [[nodiscard]] Enclosure evaluate(const Integer& q) const;
    [[nodiscard]] double approx(const Integer& q) const;

private:
    struct Factor {
        enum class Kind { q, log, constant } kind = Kind::q;
        unsigned level = 0;  // for logs: 1 = ln
        Rational value;      // for constants
        Rational exponent{1};
    };
    std::vector<Factor> factors_;
    bool infinite_ = false;
    std::string text_;
};

struct GrowthWindow {
    GrowthBound lower;
    GrowthBound upper;

    static GrowthWindow parse(std::string_view lower, std::string_view upper,
                              const std::map<std::string, Rational>& params = {});
    [[nodiscard]] std::string describe() const;
};

/// Integer interval [a_min, a_max] of digits a with lower(q_n) < a q_n + q_{n-1} < upper(q_n).
struct DigitRange {
    Integer a_min;
    std::optional<Integer> a_max;  // nullopt: unbounded
    Integer chosen;
};

DigitRange window_digits(const GrowthWindow& window, const Integer& q_n, const Integer& q_prev);

/// Digit stream that follows `seed` and then applies the window at every
/// further level. Throws ConstructionError (lazily, when the digit is
/// materialized) naming the level where the integer interval is empty.
contfrac::CoefficientStream construct_alpha_in_window(const GrowthWindow& window, std::vector<Integer> seed);

struct WindowLevelCheck {
    std::size_t level = 0;
    Integer q_n, q_next;
    bool above_lower = false;
    bool below_upper = false;
};

/// Re-verifies lower(q_n) < q_{n+1} < upper(q_n) with directed rounding for
/// levels n = first..first+count-1.
std::vector<WindowLevelCheck> verify_window(const contfrac::CoefficientStream& stream, const GrowthWindow& window,
                                            std::size_t first, std::size_t count);

/// l(N) = o(N) rules for the Liouville construction, each with a
/// nonincreasing envelope of l(m)/m used to certify "for all m >= N".
struct DominatingRule {
    enum class Kind { zero, n_over_log, sqrt, linear } kind = Kind::zero;
    static DominatingRule parse(std::string_view name);
    [[nodiscard]] Integer value(const Integer& m) const;
    /// Upper bound on l(m)/m valid for every m' >= m, as an exact rational.
    [[nodiscard]] std::optional<Rational> envelope(const Integer& m) const;
    [[nodiscard]] std::string describe() const;
};

inline constexpr std::uint64_t default_scan_budget = 100'000'000;

/// u(eps) = min{N >= 1 : l(m) < eps m for all m >= N}. Throws BudgetError
/// when the certificate is not reached within `budget` candidates.
Integer u_of_eps(const DominatingRule& l, const Rational& eps, std::uint64_t budget = default_scan_budget);

/// Stream with q_{n+1} > q_n^2 u(q_n^-2) at every level after the seed, with
/// the smallest such digit chosen.
contfrac::CoefficientStream construct_alpha_seq1xrem(const DominatingRule& l, std::vector<Integer> seed = {},
                                                     std::uint64_t budget = default_scan_budget);

struct DiophantineReport {
    std::size_t horizon = 0;                 // deepest level inspected
    std::vector<std::pair<std::size_t, double>> ratios;  // (n, ln q_{n+1}/ln q_n)
    Integer max_digit;
    bool roth_consistent_on_prefix = false;
    bool bounded_on_prefix = false;
};

/// Prefix verdicts only: Roth-consistent when the excess ln q_{n+1}/ln q_n - 1
/// over the last third of the levels is at most half its maximum over the
/// first third; bounded when no digit of the second half exceeds the maximum
/// of the first half.
DiophantineReport roth_profile(const contfrac::ConvergentTable& table);

struct ConditionPoint {
    Integer N;
    std::size_t level = 0;
    Integer denominator;  // max(b_n, max_{j<=n-1} a_j) or b_n
    Integer k;
    double ratio = 0.0;
};

struct ConditionTrajectory {
    std::vector<ConditionPoint> points;
    double min_ratio = 0.0;
    double trend_slope = 0.0;  // least squares slope of ratio against ln N
    bool grows = false;
};

ConditionTrajectory condition_III(const TrimmingSequence& k, const contfrac::ConvergentTable& table,
                                  const std::vector<Integer>& N_range);

/// Requires N_l <= (1 - margin) q_{n+1} for each N_l.
ConditionTrajectory condition_D(const TrimmingSequence& k, const contfrac::ConvergentTable& table,
                                const std::vector<Integer>& subsequence, const Rational& margin);

/// (q_n, 2 q_n, ..., ceil(a_n/2) q_n) over the levels with a_n > 2 and
/// ceil(a_n/2) q_n < q_top.
std::vector<Integer> canonical_subsequence(const contfrac::ConvergentTable& table);

/// Named digit rules for "rule:<name>(params)" angle specifications.
contfrac::CoefficientStream named_rule(const std::string& name, const std::map<std::string, std::string>& params);

}  // namespace trimbirk::diophantine
