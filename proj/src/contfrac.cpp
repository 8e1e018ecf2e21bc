#include "trimbirk/contfrac.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "trimbirk/error.hpp"

namespace trimbirk::contfrac {

// ---------------------------------------------------------------------------
// QuadraticNumber

QuadraticNumber::QuadraticNumber(Rational r, Rational s, Integer d) : r_(std::move(r)), s_(std::move(s)), d_(std::move(d)) {
    if (d_ < 0) {
        throw DomainError("negative radicand " + d_.get_str());
    }
    r_.canonicalize();
    s_.canonicalize();
    if (s_ == 0 || d_ == 0) {
        s_ = 0;
        d_ = 0;
    } else if (is_perfect_square(d_)) {
        r_ += s_ * Rational(isqrt(d_));
        s_ = 0;
        d_ = 0;
    }
}

QuadraticNumber QuadraticNumber::surd(const Integer& a, const Integer& b, const Integer& d, const Integer& c) {
    if (c == 0) {
        throw DomainError("zero denominator in surd");
    }
    return QuadraticNumber(Rational(a, c), Rational(b, c), d);
}

int QuadraticNumber::sign() const {
    const int sr = sgn(r_);
    const int ss = sgn(s_);
    if (ss == 0) return sr;
    if (sr == 0 || sr == ss) return ss;
    // Opposite signs: compare r^2 with s^2 d.
    const Rational diff = r_ * r_ - s_ * s_ * Rational(d_);
    const int sd = sgn(diff);
    return sr > 0 ? sd : -sd;
}

double QuadraticNumber::to_double() const {
    if (is_rational()) return trimbirk::to_double(r_);
    BigFloat root = BigFloat::sqrt(BigFloat(d_, MPFR_RNDN), MPFR_RNDN);
    BigFloat v = BigFloat::add(BigFloat(r_, MPFR_RNDN), BigFloat::mul(BigFloat(s_, MPFR_RNDN), root, MPFR_RNDN), MPFR_RNDN);
    return v.to_double();
}

std::string QuadraticNumber::to_string() const {
    if (is_rational()) return trimbirk::to_string(r_);
    return trimbirk::to_string(r_) + " + " + trimbirk::to_string(s_) + "*sqrt(" + d_.get_str() + ")";
}

QuadraticNumber QuadraticNumber::operator-() const { return QuadraticNumber(-r_, -s_, d_); }

namespace {

Integer common_radicand(const QuadraticNumber& x, const QuadraticNumber& y) {
    if (x.is_rational()) return y.radicand();
    if (y.is_rational() || x.radicand() == y.radicand()) return x.radicand();
    throw DomainError("mixed radicands " + x.radicand().get_str() + " and " + y.radicand().get_str());
}

}  // namespace

QuadraticNumber operator+(const QuadraticNumber& x, const QuadraticNumber& y) {
    const Integer d = common_radicand(x, y);
    return QuadraticNumber(x.r_ + y.r_, x.s_ + y.s_, d);
}

QuadraticNumber operator-(const QuadraticNumber& x, const QuadraticNumber& y) { return x + (-y); }

QuadraticNumber operator*(const Rational& k, const QuadraticNumber& x) { return QuadraticNumber(k * x.r_, k * x.s_, x.d_); }

std::string to_string(StreamSource s) {
    switch (s) {
        case StreamSource::finite_rational: return "finite-rational";
        case StreamSource::periodic_quadratic: return "periodic-quadratic";
        case StreamSource::rule_generated: return "rule-generated";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// CoefficientStream

namespace {

void require_positive(const std::vector<Integer>& digits, const char* what) {
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (digits[i] < 1) {
            throw DomainError(std::string(what) + ": digit a_" + std::to_string(i + 1) + " = " + digits[i].get_str() +
                              " is not positive");
        }
    }
}

}  // namespace

CoefficientStream CoefficientStream::finite(std::vector<Integer> digits) {
    if (digits.empty()) {
        throw DomainError("empty continued fraction");
    }
    require_positive(digits, "finite expansion");
    if (digits.size() == 1 && digits[0] == 1) {
        throw DomainError("[1] evaluates to 1, outside (0,1)");
    }
    if (digits.size() > 1 && digits.back() == 1) {
        digits.pop_back();
        digits.back() += 1;
    }
    CoefficientStream s;
    s.source_ = StreamSource::finite_rational;
    s.head_ = std::move(digits);
    s.description_ = "finite";
    return s;
}

CoefficientStream CoefficientStream::periodic(std::vector<Integer> preperiod, std::vector<Integer> period,
                                              std::optional<Surd> exact) {
    if (period.empty()) {
        throw DomainError("periodic expansion with empty period");
    }
    require_positive(preperiod, "preperiod");
    require_positive(period, "period");
    CoefficientStream s;
    s.source_ = StreamSource::periodic_quadratic;
    s.head_ = std::move(preperiod);
    s.period_ = std::move(period);
    s.surd_ = std::move(exact);
    s.description_ = "periodic";
    return s;
}

CoefficientStream CoefficientStream::generated(std::vector<Integer> prefix, Rule rule, std::string description) {
    if (!rule) {
        throw DomainError("generated stream without a rule");
    }
    require_positive(prefix, "generated prefix");
    CoefficientStream s;
    s.source_ = StreamSource::rule_generated;
    s.head_ = std::move(prefix);
    s.rule_ = std::make_shared<const Rule>(std::move(rule));
    s.description_ = std::move(description);
    return s;
}

std::optional<std::size_t> CoefficientStream::available_length() const {
    if (source_ == StreamSource::finite_rational) return head_.size();
    return std::nullopt;
}

std::vector<Integer> CoefficientStream::prefix(std::size_t count) const {
    std::vector<Integer> out;
    out.reserve(count);
    switch (source_) {
        case StreamSource::finite_rational:
            if (count > head_.size()) {
                throw LengthError("finite expansion has " + std::to_string(head_.size()) + " digits, " +
                                  std::to_string(count) + " requested");
            }
            out.assign(head_.begin(), head_.begin() + static_cast<std::ptrdiff_t>(count));
            break;
        case StreamSource::periodic_quadratic:
            for (std::size_t j = 0; j < count; ++j) {
                out.push_back(j < head_.size() ? head_[j] : period_[(j - head_.size()) % period_.size()]);
            }
            break;
        case StreamSource::rule_generated:
            for (std::size_t j = 0; j < count; ++j) {
                if (j < head_.size()) {
                    out.push_back(head_[j]);
                    continue;
                }
                Integer a = (*rule_)(j + 1, std::span<const Integer>(out.data(), out.size()));
                if (a < 1) {
                    throw DomainError("rule '" + description_ + "' produced digit a_" + std::to_string(j + 1) + " = " +
                                      a.get_str());
                }
                out.push_back(std::move(a));
            }
            break;
    }
    return out;
}

Integer CoefficientStream::digit(std::size_t index) const {
    if (index == 0) {
        throw DomainError("digits are indexed from 1");
    }
    if (source_ == StreamSource::periodic_quadratic) {
        const std::size_t j = index - 1;
        return j < head_.size() ? head_[j] : period_[(j - head_.size()) % period_.size()];
    }
    return prefix(index).back();
}

std::optional<QuadraticNumber> CoefficientStream::exact_value() const {
    if (source_ == StreamSource::finite_rational) {
        return QuadraticNumber(evaluate(head_));
    }
    if (surd_) {
        return QuadraticNumber::surd(surd_->a, surd_->b, surd_->d, surd_->c);
    }
    return std::nullopt;
}

Rational evaluate(std::span<const Integer> digits) {
    if (digits.empty()) {
        throw DomainError("cannot evaluate an empty continued fraction");
    }
    Rational v = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        v = 1 / (Rational(*it) + v);
        v.canonicalize();
    }
    return v;
}

CoefficientStream cfe_of_rational(const Integer& numerator, const Integer& denominator) {
    if (numerator <= 0 || denominator <= 0 || numerator >= denominator) {
        throw DomainError("expected a fraction in (0,1), got " + numerator.get_str() + "/" + denominator.get_str());
    }
    Integer num = numerator;
    Integer den = denominator;
    std::vector<Integer> digits;
    // Repeatedly invert: x = num/den, 1/x = den/num.
    while (num != 0) {
        Integer a = den / num;
        Integer r = den - a * num;
        digits.push_back(a);
        den = num;
        num = r;
    }
    return CoefficientStream::finite(std::move(digits));
}

CoefficientStream cfe_of_quadratic(const Integer& a, const Integer& b, const Integer& d, const Integer& c) {
    if (c == 0) throw DomainError("zero denominator in surd");
    if (d <= 0 || b == 0 || is_perfect_square(d)) {
        throw DomainError("surd (" + a.get_str() + "+" + b.get_str() + "*sqrt(" + d.get_str() + "))/" + c.get_str() +
                          " is rational");
    }
    const QuadraticNumber x = QuadraticNumber::surd(a, b, d, c);
    if (x.sign() <= 0 || (QuadraticNumber(Rational(1)) - x).sign() <= 0) {
        throw DomainError("surd value " + x.to_string() + " is outside (0,1)");
    }

    // Write x = (P0 + sqrt(D))/Q0 with Q0 | D - P0^2.
    const Integer D = b * b * c * c * d;
    Integer P = a * c;
    Integer Q = c * c;
    if (sgn(b) * sgn(c) < 0) {
        P = -P;
        Q = -Q;
    }
    // Move to 1/x, whose integer part is a_1.
    P = -P;
    Q = (D - P * P) / Q;

    const Integer root = isqrt(D);
    std::vector<Integer> digits;
    std::map<std::pair<Integer, Integer>, std::size_t> seen;
    while (true) {
        auto [it, fresh] = seen.emplace(std::make_pair(P, Q), digits.size());
        if (!fresh) {
            const auto start = static_cast<std::ptrdiff_t>(it->second);
            std::vector<Integer> head(digits.begin(), digits.begin() + start);
            std::vector<Integer> period(digits.begin() + start, digits.end());
            return CoefficientStream::periodic(std::move(head), std::move(period), Surd{a, b, d, c});
        }
        Integer digit;
        if (Q > 0) {
            digit = floor_div(P + root, Q);
        } else {
            digit = -(floor_div(P + root, -Q) + 1);
        }
        digits.push_back(digit);
        P = digit * Q - P;
        Q = (D - P * P) / Q;
    }
}

CoefficientStream mirror(const CoefficientStream& stream) {
    if (stream.source_ == StreamSource::finite_rational) {
        const Rational v = 1 - evaluate(stream.head_);
        return cfe_of_rational(v.get_num(), v.get_den());
    }

    if (stream.source_ == StreamSource::periodic_quadratic) {
        std::vector<Integer> head = stream.head_;
        std::vector<Integer> period = stream.period_;
        // Unroll until the preperiod holds the two leading digits.
        while (head.size() < 2) {
            head.push_back(period.front());
            std::rotate(period.begin(), period.begin() + 1, period.end());
        }
        std::vector<Integer> out;
        if (head[0] >= 2) {
            out = {Integer(1), head[0] - 1};
            out.insert(out.end(), head.begin() + 1, head.end());
        } else {
            out = {head[1] + 1};
            out.insert(out.end(), head.begin() + 2, head.end());
        }
        std::optional<Surd> exact;
        if (stream.surd_) {
            const Surd& s = *stream.surd_;
            exact = Surd{s.c - s.a, -s.b, s.d, s.c};
        }
        auto m = CoefficientStream::periodic(std::move(out), std::move(period), std::move(exact));
        m.description_ = "mirror of " + stream.description_;
        return m;
    }

    // Rule generated: translate index and history back to the original rule.
    const std::vector<Integer> lead = stream.prefix(2);
    auto rule = stream.rule_;
    const std::size_t head_size = stream.head_.size();
    std::vector<Integer> orig_head = stream.prefix(std::max<std::size_t>(head_size, 2));
    std::vector<Integer> new_head;
    CoefficientStream::Rule translated;
    if (lead[0] >= 2) {
        new_head = {Integer(1), lead[0] - 1};
        new_head.insert(new_head.end(), orig_head.begin() + 1, orig_head.end());
        translated = [rule, orig_head](std::size_t index, std::span<const Integer> prev) {
            std::vector<Integer> orig(prev.begin() + 1, prev.end());
            orig[0] += 1;
            const std::size_t oi = index - 1;
            return oi <= orig_head.size() ? orig_head[oi - 1] : (*rule)(oi, orig);
        };
    } else {
        new_head = {lead[1] + 1};
        new_head.insert(new_head.end(), orig_head.begin() + 2, orig_head.end());
        translated = [rule, orig_head](std::size_t index, std::span<const Integer> prev) {
            std::vector<Integer> orig{Integer(1)};
            orig.insert(orig.end(), prev.begin(), prev.end());
            orig[1] -= 1;
            const std::size_t oi = index + 1;
            return oi <= orig_head.size() ? orig_head[oi - 1] : (*rule)(oi, orig);
        };
    }
    return CoefficientStream::generated(std::move(new_head), std::move(translated), "mirror of " + stream.description_);
}

// ---------------------------------------------------------------------------
// ConvergentTable

const Integer& ConvergentTable::a(std::size_t n) const {
    if (n == 0 || n > digits_.size()) {
        throw LengthError("digit a_" + std::to_string(n) + " not in table of depth " + std::to_string(depth()));
    }
    return digits_[n - 1];
}

const Integer& ConvergentTable::p(std::size_t n) const {
    if (n >= p_.size()) throw LengthError("row " + std::to_string(n) + " beyond table top " + std::to_string(top()));
    return p_[n];
}

const Integer& ConvergentTable::q(std::size_t n) const {
    if (n >= q_.size()) throw LengthError("row " + std::to_string(n) + " beyond table top " + std::to_string(top()));
    return q_[n];
}

std::size_t ConvergentTable::level_of(const Integer& N) const {
    if (N < 1) {
        throw DomainError("level requested for N = " + N.get_str());
    }
    if (q_.back() <= N) {
        throw LengthError("table too shallow: q_" + std::to_string(top()) + " = " + q_.back().get_str() + " <= N = " +
                          N.get_str());
    }
    // q_n is nondecreasing for n >= 1; find the last row with q_n <= N.
    auto it = std::upper_bound(q_.begin() + 1, q_.end(), N);
    return static_cast<std::size_t>(it - q_.begin()) - 1;
}

ConvergentTable convergents(const CoefficientStream& stream, std::size_t M) {
    ConvergentTable t;
    t.digits_ = stream.prefix(M);
    t.source_ = stream.source();
    t.p_ = {Integer(1), Integer(0)};
    t.q_ = {Integer(0), Integer(1)};
    t.p_.reserve(M + 2);
    t.q_.reserve(M + 2);
    for (std::size_t n = 1; n <= M; ++n) {
        const Integer& an = t.digits_[n - 1];
        t.p_.push_back(an * t.p_[n] + t.p_[n - 1]);
        t.q_.push_back(an * t.q_[n] + t.q_[n - 1]);
    }
    return t;
}

// ---------------------------------------------------------------------------
// delta

namespace {

void check_reference(const ConvergentTable& table, const QuadraticNumber& alpha) {
    for (std::size_t m = 1; m <= table.top(); ++m) {
        const QuadraticNumber rem = Rational(table.q(m)) * alpha - QuadraticNumber(Rational(table.p(m)));
        const int s = rem.sign();
        if (s == ConvergentTable::convergent_side(m)) continue;
        if (s == 0 && m == table.top()) continue;
        throw ValidationError("reference " + alpha.to_string() + " is inconsistent with the table at level " +
                              std::to_string(m) + " (convergent " + table.p(m).get_str() + "/" + table.q(m).get_str() +
                              ")");
    }
}

QuadraticNumber remainder(const ConvergentTable& table, const QuadraticNumber& alpha, std::size_t n) {
    return (Rational(table.q(n - 1)) * alpha - QuadraticNumber(Rational(table.p(n - 1)))).abs();
}

}  // namespace

QuadraticNumber delta(const ConvergentTable& table, const QuadraticNumber& reference, std::size_t n) {
    if (n == 0 || n > table.top() + 1) {
        throw LengthError("delta_" + std::to_string(n) + " needs row " + std::to_string(n - 1) + ", table top is " +
                          std::to_string(table.top()));
    }
    check_reference(table, reference);
    return remainder(table, reference, n);
}

DeltaTable delta_table(const ConvergentTable& table, const QuadraticNumber& reference) {
    check_reference(table, reference);
    DeltaTable d;
    d.values_.resize(table.top() + 2);
    for (std::size_t n = 1; n <= table.top() + 1; ++n) {
        d.values_[n] = remainder(table, reference, n);
    }
    return d;
}

const QuadraticNumber& DeltaTable::operator[](std::size_t n) const {
    if (n == 0 || n >= values_.size()) {
        throw LengthError("delta_" + std::to_string(n) + " not materialized");
    }
    return values_[n];
}

// ---------------------------------------------------------------------------
// Ostrowski numeration

OstrowskiDigits ostrowski_expand(const Integer& N, const ConvergentTable& table) {
    if (N < 1) {
        throw DomainError("Ostrowski expansion needs N >= 1, got " + N.get_str());
    }
    const std::size_t n = table.level_of(N);
    OstrowskiDigits out;
    out.b.resize(n);
    Integer rest = N;
    for (std::size_t j = n; j >= 1; --j) {
        mpz_fdiv_qr(out.b[j - 1].get_mpz_t(), rest.get_mpz_t(), rest.get_mpz_t(), table.q(j).get_mpz_t());
    }
    return out;
}

void validate_ostrowski(const OstrowskiDigits& digits, const ConvergentTable& table) {
    const std::size_t n = digits.level();
    if (n == 0) {
        throw ValidationError("empty Ostrowski digit vector");
    }
    if (n + 1 > table.top()) {
        throw LengthError("level " + std::to_string(n) + " needs q_" + std::to_string(n + 1) + ", table top is " +
                          std::to_string(table.top()));
    }
    Integer partial = 0;
    for (std::size_t J = 1; J <= n; ++J) {
        if (digits[J] < 0) {
            throw ValidationError("negative digit b_" + std::to_string(J));
        }
        partial += digits[J] * table.q(J);
        if (partial >= table.q(J + 1)) {
            throw ValidationError("inadmissible digits: sum_{j<=" + std::to_string(J) + "} b_j q_j = " + partial.get_str() +
                                  " >= q_" + std::to_string(J + 1) + " = " + table.q(J + 1).get_str());
        }
    }
    if (digits[n] == 0) {
        throw ValidationError(partial == 0 ? "all-zero digits (N >= 1 required)" : "leading digit b_n is zero");
    }
}

Integer ostrowski_value(const OstrowskiDigits& digits, const ConvergentTable& table) {
    validate_ostrowski(digits, table);
    Integer N = 0;
    for (std::size_t j = 1; j <= digits.level(); ++j) {
        N += digits[j] * table.q(j);
    }
    return N;
}

WeightedLogSums weighted_log_sums(const OstrowskiDigits& digits, const ConvergentTable& table) {
    validate_ostrowski(digits, table);
    const std::size_t n = digits.level();
    CompensatedSum main_term;
    CompensatedSum digit_term;
    WeightedLogSums out;
    out.digit_sum = 0;
    for (std::size_t j = 1; j <= n; ++j) {
        const Integer& b = digits[j];
        if (b == 0) continue;
        out.digit_sum += b;
        if (table.q(j) > 1) {
            main_term += to_double(Integer(b * table.q(j))) * log_of(table.q(j));
        }
        if (j < n && b > 1) {
            digit_term += to_double(Integer(table.a(j) * table.q(j))) * log_of(b);
        }
    }
    out.main_term = main_term.value();
    out.digit_log_term = digit_term.value();
    return out;
}

PreciseWeightedLogSums weighted_log_sums_precise(const OstrowskiDigits& digits, const ConvergentTable& table) {
    validate_ostrowski(digits, table);
    const std::size_t n = digits.level();
    PreciseWeightedLogSums out{BigFloat(0.0), BigFloat(0.0), Integer(0)};
    for (std::size_t j = 1; j <= n; ++j) {
        const Integer& b = digits[j];
        if (b == 0) continue;
        out.digit_sum += b;
        if (table.q(j) > 1) {
            BigFloat lq = BigFloat::log(BigFloat(table.q(j), MPFR_RNDN), MPFR_RNDN);
            out.main_term =
                BigFloat::add(out.main_term, BigFloat::mul(BigFloat(Integer(b * table.q(j)), MPFR_RNDN), lq, MPFR_RNDN), MPFR_RNDN);
        }
        if (j < n && b > 1) {
            BigFloat lb = BigFloat::log(BigFloat(b, MPFR_RNDN), MPFR_RNDN);
            out.digit_log_term = BigFloat::add(
                out.digit_log_term, BigFloat::mul(BigFloat(Integer(table.a(j) * table.q(j)), MPFR_RNDN), lb, MPFR_RNDN),
                MPFR_RNDN);
        }
    }
    return out;
}

}  // namespace trimbirk::contfrac
