#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace trimbirk {

using Integer = mpz_class;
using Rational = mpq_class;

using u128 = unsigned __int128;

// Exact rationals leave the library as "num/den" strings so JSON numbers
// never round them.
std::string to_string(const Integer& v);
std::string to_string(const Rational& v);
std::string to_string(u128 v);

// Parses "p", "p/q" or "-p/q" into a canonical rational. Throws ValidationError.
Rational parse_rational(std::string_view text);
Integer parse_integer(std::string_view text);

Integer floor_div(const Integer& a, const Integer& b);
Integer ceil_div(const Integer& a, const Integer& b);
Integer floor_of(const Rational& r);
Integer ceil_of(const Rational& r);
Integer isqrt(const Integer& n);
bool is_perfect_square(const Integer& n);
Integer pow(const Integer& base, unsigned long exponent);

// Correctly rounded conversion to binary64.
double to_double(const Rational& r);
double to_double(const Integer& v);

// Natural logarithm of a positive integer of any size. Throws DomainError.
double log_of(const Integer& v);

bool fits_u128(const Integer& v);
u128 to_u128(const Integer& v);
Integer from_u128(u128 v);

/// Neumaier's variant of Kahan summation. The running compensation is kept
/// separately so callers can report it as the summation residual.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }

    void merge(const CompensatedSum& other) noexcept {
        add(other.sum_);
        add(other.comp_);
    }

    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }
    [[nodiscard]] double residual() const noexcept { return comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Thin RAII handle over an MPFR value. Only what the library needs: exact
/// loads from GMP types, logs, powers and rounding-mode-explicit results.
class BigFloat {
public:
    static constexpr mpfr_prec_t default_precision = 192;

    explicit BigFloat(mpfr_prec_t prec = default_precision) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    BigFloat(const Integer& z, mpfr_rnd_t rnd, mpfr_prec_t prec = default_precision) : BigFloat(prec) {
        mpfr_set_z(v_, z.get_mpz_t(), rnd);
    }
    BigFloat(const Rational& q, mpfr_rnd_t rnd, mpfr_prec_t prec = default_precision) : BigFloat(prec) {
        mpfr_set_q(v_, q.get_mpq_t(), rnd);
    }
    BigFloat(double d, mpfr_prec_t prec = default_precision) : BigFloat(prec) { mpfr_set_d(v_, d, MPFR_RNDN); }

    BigFloat(const BigFloat& o) : BigFloat(mpfr_get_prec(o.v_)) { mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigFloat(BigFloat&& o) noexcept : BigFloat(mpfr_get_prec(o.v_)) { mpfr_swap(v_, o.v_); }
    BigFloat& operator=(BigFloat o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    mpfr_ptr get() noexcept { return v_; }
    mpfr_srcptr get() const noexcept { return v_; }

    [[nodiscard]] double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }
    [[nodiscard]] bool is_positive() const { return mpfr_sgn(v_) > 0; }

    static BigFloat log(const BigFloat& x, mpfr_rnd_t rnd) {
        BigFloat r(mpfr_get_prec(x.v_));
        mpfr_log(r.v_, x.v_, rnd);
        return r;
    }
    static BigFloat mul(const BigFloat& a, const BigFloat& b, mpfr_rnd_t rnd) {
        BigFloat r(mpfr_get_prec(a.v_));
        mpfr_mul(r.v_, a.v_, b.v_, rnd);
        return r;
    }
    static BigFloat add(const BigFloat& a, const BigFloat& b, mpfr_rnd_t rnd) {
        BigFloat r(mpfr_get_prec(a.v_));
        mpfr_add(r.v_, a.v_, b.v_, rnd);
        return r;
    }
    static BigFloat sub(const BigFloat& a, const BigFloat& b, mpfr_rnd_t rnd) {
        BigFloat r(mpfr_get_prec(a.v_));
        mpfr_sub(r.v_, a.v_, b.v_, rnd);
        return r;
    }
    static BigFloat div(const BigFloat& a, const BigFloat& b, mpfr_rnd_t rnd) {
        BigFloat r(mpfr_get_prec(a.v_));
        mpfr_div(r.v_, a.v_, b.v_, rnd);
        return r;
    }
    static BigFloat pow(const BigFloat& a, const BigFloat& e, mpfr_rnd_t rnd) {
        BigFloat r(mpfr_get_prec(a.v_));
        mpfr_pow(r.v_, a.v_, e.v_, rnd);
        return r;
    }
    static BigFloat sqrt(const BigFloat& a, mpfr_rnd_t rnd) {
        BigFloat r(mpfr_get_prec(a.v_));
        mpfr_sqrt(r.v_, a.v_, rnd);
        return r;
    }

    // floor / ceil into an exact integer.
    [[nodiscard]] Integer floor() const;
    [[nodiscard]] Integer ceil() const;

    friend int compare(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_); }
    friend int compare(const BigFloat& a, const Integer& b) { return mpfr_cmp_z(a.v_, b.get_mpz_t()); }

private:
    mpfr_t v_;
};

}  // namespace trimbirk
