#pragma once

// Exact continued-fraction engine.
//
// Index convention used throughout the library: the angle is
//   alpha = 1/(a_1 + 1/(a_2 + ...)),
// convergent rows start at the seeds (p_0,q_0) = (1,0), (p_1,q_1) = (0,1) and
// q_{n+1} = a_n q_n + q_{n-1}. Hence q_2 = a_1 and p_n/q_n = [a_1,...,a_{n-1}].
// alpha - p_n/q_n is positive for odd n and negative for even n.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trimbirk/numeric.hpp"

namespace trimbirk::contfrac {

/// r + s*sqrt(d) with rational r, s and a non-negative integer radicand.
/// Rationals are represented with s = 0.
class QuadraticNumber {
public:
    QuadraticNumber() = default;
    QuadraticNumber(Rational r) : r_(std::move(r)) { r_.canonicalize(); }  // NOLINT(implicit)
    QuadraticNumber(Rational r, Rational s, Integer d);

    /// (a + b*sqrt(d))/c
    static QuadraticNumber surd(const Integer& a, const Integer& b, const Integer& d, const Integer& c);

    [[nodiscard]] const Rational& rational_part() const noexcept { return r_; }
    [[nodiscard]] const Rational& surd_coefficient() const noexcept { return s_; }
    [[nodiscard]] const Integer& radicand() const noexcept { return d_; }
    [[nodiscard]] bool is_rational() const noexcept { return s_ == 0; }

    [[nodiscard]] int sign() const;
    [[nodiscard]] QuadraticNumber abs() const { return sign() < 0 ? -*this : *this; }
    [[nodiscard]] double to_double() const;
    [[nodiscard]] std::string to_string() const;

    QuadraticNumber operator-() const;
    friend QuadraticNumber operator+(const QuadraticNumber& x, const QuadraticNumber& y);
    friend QuadraticNumber operator-(const QuadraticNumber& x, const QuadraticNumber& y);
    friend QuadraticNumber operator*(const Rational& k, const QuadraticNumber& x);
    friend bool operator==(const QuadraticNumber& x, const QuadraticNumber& y) { return (x - y).sign() == 0; }
    friend bool operator<(const QuadraticNumber& x, const QuadraticNumber& y) { return (x - y).sign() < 0; }

private:
    Rational r_{0};
    Rational s_{0};
    Integer d_{0};
};

enum class StreamSource { finite_rational, periodic_quadratic, rule_generated };

std::string to_string(StreamSource s);

/// Exact surd (a + b*sqrt(d))/c.
struct Surd {
    Integer a, b, d, c;
};

/// The CFE digits a_1, a_2, ... of an angle in (0,1). Immutable; rule
/// generated streams recompute on demand instead of caching.
class CoefficientStream {
public:
    /// Digit rule for generated streams: returns a_index (1-based) given the
    /// already materialized digits a_1..a_{index-1}.
    using Rule = std::function<Integer(std::size_t index, std::span<const Integer> previous)>;

    /// Finite expansion of a rational. The alternate form ending in 1 is
    /// accepted and normalized. Throws DomainError on a zero digit.
    static CoefficientStream finite(std::vector<Integer> digits);

    static CoefficientStream periodic(std::vector<Integer> preperiod, std::vector<Integer> period,
                                      std::optional<Surd> exact = std::nullopt);

    static CoefficientStream generated(std::vector<Integer> prefix, Rule rule, std::string description);

    [[nodiscard]] StreamSource source() const noexcept { return source_; }
    [[nodiscard]] bool is_finite() const noexcept { return source_ == StreamSource::finite_rational; }

    /// Number of materializable digits, nullopt when unbounded.
    [[nodiscard]] std::optional<std::size_t> available_length() const;

    /// Digits a_1..a_count. Throws LengthError when the stream is exhausted.
    [[nodiscard]] std::vector<Integer> prefix(std::size_t count) const;
    [[nodiscard]] Integer digit(std::size_t index) const;

    [[nodiscard]] const std::vector<Integer>& preperiod() const noexcept { return head_; }
    [[nodiscard]] const std::vector<Integer>& period() const noexcept { return period_; }

    /// Exact value when known: p/q for finite streams, the surd for quadratic
    /// streams built from one.
    [[nodiscard]] std::optional<QuadraticNumber> exact_value() const;
    [[nodiscard]] const std::optional<Surd>& surd() const noexcept { return surd_; }

    [[nodiscard]] const std::string& description() const noexcept { return description_; }

    friend CoefficientStream mirror(const CoefficientStream& stream);

private:
    CoefficientStream() = default;

    StreamSource source_ = StreamSource::finite_rational;
    std::vector<Integer> head_;    // finite digits, preperiod or generated prefix
    std::vector<Integer> period_;  // periodic part
    std::shared_ptr<const Rule> rule_;
    std::optional<Surd> surd_;
    std::string description_;
};

/// Convergent rows n = 0..depth+1 built from digits a_1..a_depth.
class ConvergentTable {
public:
    ConvergentTable() = default;

    [[nodiscard]] std::size_t depth() const noexcept { return digits_.size(); }
    /// Highest row index available (depth + 1).
    [[nodiscard]] std::size_t top() const noexcept { return q_.size() - 1; }

    [[nodiscard]] const Integer& a(std::size_t n) const;
    [[nodiscard]] const Integer& p(std::size_t n) const;
    [[nodiscard]] const Integer& q(std::size_t n) const;
    [[nodiscard]] const std::vector<Integer>& digits() const noexcept { return digits_; }

    [[nodiscard]] StreamSource source() const noexcept { return source_; }

    /// The level n with q_n <= N < q_{n+1}. Throws LengthError when the table
    /// does not reach past N.
    [[nodiscard]] std::size_t level_of(const Integer& N) const;

    /// Sign of alpha - p_n/q_n, +1 for odd n.
    [[nodiscard]] static int convergent_side(std::size_t n) noexcept { return n % 2 == 1 ? 1 : -1; }

    friend ConvergentTable convergents(const CoefficientStream& stream, std::size_t M);

private:
    std::vector<Integer> digits_;
    std::vector<Integer> p_, q_;
    StreamSource source_ = StreamSource::finite_rational;
};

/// delta_n = |q_{n-1} alpha - p_{n-1}| for n = 1..top()+1 against an exact
/// reference value of alpha.
class DeltaTable {
public:
    [[nodiscard]] const QuadraticNumber& operator[](std::size_t n) const;
    [[nodiscard]] std::size_t top() const noexcept { return values_.size() - 1; }

    friend DeltaTable delta_table(const ConvergentTable& table, const QuadraticNumber& reference);

private:
    std::vector<QuadraticNumber> values_;  // index 0 unused
};

/// Ostrowski digits b_1..b_n of N, stored with b[0] = b_1.
struct OstrowskiDigits {
    std::vector<Integer> b;

    [[nodiscard]] std::size_t level() const noexcept { return b.size(); }
    [[nodiscard]] const Integer& operator[](std::size_t j) const { return b.at(j - 1); }
};

struct WeightedLogSums {
    double main_term = 0.0;       // sum_j b_j q_j ln q_j
    double digit_log_term = 0.0;  // sum_{j<n, b_j != 0} a_j q_j ln b_j
    Integer digit_sum;            // sum_j b_j
};

struct PreciseWeightedLogSums {
    BigFloat main_term;
    BigFloat digit_log_term;
    Integer digit_sum;
};

CoefficientStream cfe_of_rational(const Integer& numerator, const Integer& denominator);
CoefficientStream cfe_of_quadratic(const Integer& a, const Integer& b, const Integer& d, const Integer& c);

ConvergentTable convergents(const CoefficientStream& stream, std::size_t M);

QuadraticNumber delta(const ConvergentTable& table, const QuadraticNumber& reference, std::size_t n);
DeltaTable delta_table(const ConvergentTable& table, const QuadraticNumber& reference);

OstrowskiDigits ostrowski_expand(const Integer& N, const ConvergentTable& table);
Integer ostrowski_value(const OstrowskiDigits& digits, const ConvergentTable& table);
/// Throws ValidationError naming the first violated admissibility condition.
void validate_ostrowski(const OstrowskiDigits& digits, const ConvergentTable& table);

WeightedLogSums weighted_log_sums(const OstrowskiDigits& digits, const ConvergentTable& table);
PreciseWeightedLogSums weighted_log_sums_precise(const OstrowskiDigits& digits, const ConvergentTable& table);

/// Evaluates a finite continued fraction [a_1,...,a_m] exactly.
Rational evaluate(std::span<const Integer> digits);

/// CFE of 1 - alpha.
CoefficientStream mirror(const CoefficientStream& stream);

}  // namespace trimbirk::contfrac
