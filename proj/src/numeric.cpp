#include "trimbirk/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "trimbirk/error.hpp"

namespace trimbirk {

std::string to_string(const Integer& v) { return v.get_str(); }

std::string to_string(const Rational& v) {
    Rational c = v;
    c.canonicalize();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

std::string to_string(u128 v) { return from_u128(v).get_str(); }

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_integer_literal(std::string_view s) {
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

Integer parse_integer(std::string_view text) {
    auto s = trim(text);
    if (!is_integer_literal(s)) {
        throw ValidationError("not an integer: '" + std::string(text) + "'");
    }
    if (s.front() == '+') s.remove_prefix(1);
    return Integer(std::string(s), 10);
}

Rational parse_rational(std::string_view text) {
    auto s = trim(text);
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) {
        return Rational(parse_integer(s));
    }
    Integer num = parse_integer(s.substr(0, slash));
    Integer den = parse_integer(s.substr(slash + 1));
    if (den == 0) {
        throw ValidationError("zero denominator in '" + std::string(text) + "'");
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Integer floor_div(const Integer& a, const Integer& b) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

Integer ceil_div(const Integer& a, const Integer& b) {
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

Integer floor_of(const Rational& r) { return floor_div(r.get_num(), r.get_den()); }
Integer ceil_of(const Rational& r) { return ceil_div(r.get_num(), r.get_den()); }

Integer isqrt(const Integer& n) {
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

bool is_perfect_square(const Integer& n) { return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0; }

Integer pow(const Integer& base, unsigned long exponent) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exponent);
    return r;
}

double to_double(const Rational& r) {
    mpfr_t t;
    mpfr_init2(t, 53);
    mpfr_set_q(t, r.get_mpq_t(), MPFR_RNDN);
    const double d = mpfr_get_d(t, MPFR_RNDN);
    mpfr_clear(t);
    return d;
}

double to_double(const Integer& v) {
    mpfr_t t;
    mpfr_init2(t, 53);
    mpfr_set_z(t, v.get_mpz_t(), MPFR_RNDN);
    const double d = mpfr_get_d(t, MPFR_RNDN);
    mpfr_clear(t);
    return d;
}

double log_of(const Integer& v) {
    if (v <= 0) {
        throw DomainError("logarithm of non-positive integer " + v.get_str());
    }
    long exp2 = 0;
    const double mant = mpz_get_d_2exp(&exp2, v.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp2) * std::log(2.0);
}

bool fits_u128(const Integer& v) { return v >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 128; }

u128 to_u128(const Integer& v) {
    if (!fits_u128(v)) {
        throw RangeError("integer does not fit 128 bits: " + v.get_str());
    }
    Integer hi = v >> 64;
    Integer lo = v - (hi << 64);
    u128 r = static_cast<u128>(mpz_get_ui(hi.get_mpz_t()));
    r = (r << 64) | static_cast<u128>(mpz_get_ui(lo.get_mpz_t()));
    return r;
}

Integer from_u128(u128 v) {
    Integer hi(static_cast<unsigned long>(v >> 64));
    Integer lo(static_cast<unsigned long>(v & ~std::uint64_t{0}));
    return (hi << 64) + lo;
}

Integer BigFloat::floor() const {
    Integer r;
    mpfr_get_z(r.get_mpz_t(), v_, MPFR_RNDD);
    return r;
}

Integer BigFloat::ceil() const {
    Integer r;
    mpfr_get_z(r.get_mpz_t(), v_, MPFR_RNDU);
    return r;
}

}  // namespace trimbirk
