#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "trimbirk/numeric.hpp"

namespace trimbirk::observables {

/// f(x) = c1 x^-beta + c2 (1-x)^-beta on (0,1), with f(0) = 0.
class PowerObservable {
public:
    explicit PowerObservable(double beta = 1.0, double c1 = 1.0, double c2 = 0.0);

    /// Parses "pow:beta=<b>,c1=<v>,c2=<v>"; omitted keys keep their defaults.
    static PowerObservable parse(std::string_view text);

    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double c1() const noexcept { return c1_; }
    [[nodiscard]] double c2() const noexcept { return c2_; }
    [[nodiscard]] bool one_sided() const noexcept { return c2_ == 0.0; }
    [[nodiscard]] std::string describe() const;

    /// Value at an exact point of [0,1). x is rounded once, correctly.
    [[nodiscard]] double operator()(const Rational& x) const;

    /// Value at pos/D for integers 0 <= pos < D. Used by the orbit loops.
    template <class UInt>
    [[nodiscard]] double at(UInt pos, UInt D) const noexcept {
        if (pos == 0) return 0.0;
        if (D < (UInt(1) << 53)) {
            const double d = static_cast<double>(D);
            return from_ratios(d / static_cast<double>(pos), c2_ == 0.0 ? 0.0 : d / static_cast<double>(D - pos));
        }
        const long double d = static_cast<long double>(D);
        return from_ratios(static_cast<double>(d / static_cast<long double>(pos)),
                           c2_ == 0.0 ? 0.0 : static_cast<double>(d / static_cast<long double>(D - pos)));
    }

    /// Point of (0,1) where f is smallest.
    [[nodiscard]] double minimizer() const;
    [[nodiscard]] double min_value() const;
    /// Value on (0,1) as a real function, for bisection and quadrature.
    [[nodiscard]] double real(double x) const;

private:
    friend class TruncatedObservable;
    struct Unchecked {};
    PowerObservable(double beta, double c1, double c2, Unchecked) : beta_(beta), c1_(c1), c2_(c2) {}

    // r0 = 1/x, r1 = 1/(1-x)
    [[nodiscard]] double from_ratios(double r0, double r1) const noexcept {
        double v = c1_ * power(r0);
        if (c2_ != 0.0) v += c2_ * power(r1);
        return v;
    }
    [[nodiscard]] double power(double r) const noexcept {
        if (beta_ == 1.0) return r;
        if (beta_ == 2.0) return r * r;
        return std::pow(r, beta_);
    }

    double beta_;
    double c1_;
    double c2_;
};

/// f_t: the c1 part vanishes on [0,t), the c2 part on (1-t,1).
class TruncatedObservable {
public:
    TruncatedObservable(PowerObservable base, Rational t);

    [[nodiscard]] const PowerObservable& base() const noexcept { return base_; }
    [[nodiscard]] const Rational& threshold() const noexcept { return t_; }

    [[nodiscard]] double operator()(const Rational& x) const;

    /// Integer cut points on the grid 1/D: the c1 part is active for
    /// pos >= lo_cut, the c2 part for 0 < pos <= hi_cut.
    struct Cuts {
        u128 lo_cut = 0;
        u128 hi_cut = 0;
    };
    [[nodiscard]] Cuts cuts(const Integer& D) const;

    template <class UInt>
    [[nodiscard]] double at(UInt pos, UInt D, const Cuts& c) const noexcept {
        if (pos == 0) return 0.0;
        const bool left = static_cast<u128>(pos) >= c.lo_cut;
        const bool right = base_.c2() != 0.0 && static_cast<u128>(pos) <= c.hi_cut;
        if (left && (right || base_.c2() == 0.0)) return base_.at(pos, D);
        if (left) return left_.at(pos, D);
        if (right) return right_.at(pos, D);
        return 0.0;
    }

    /// Integral over [0,1).
    [[nodiscard]] double integral() const;
    /// Total variation on the interval [0,1), the point value f(0) = 0 included.
    [[nodiscard]] double variation() const;
    /// Total variation as a function on the circle, where 1 is glued to 0.
    [[nodiscard]] double circle_variation() const;

private:
    PowerObservable base_;
    PowerObservable left_;   // c1 part only
    PowerObservable right_;  // c2 part only
    Rational t_;
    double td_;
};

TruncatedObservable truncate(const PowerObservable& obs, const Rational& t);

/// int_t^1 x^-beta dx
double tail_integral(double beta, double t);

double normalizer_1x(double N);
double normalizer_beta(double N, double k, double beta);

/// Lebesgue measure of {x in (0,1) : f(x) > s}.
double tail_measure(const PowerObservable& obs, double s);

/// d_N as used by the law experiments.
struct Normalizer {
    enum class Kind { n_log_n, beta, constant };
    Kind kind = Kind::n_log_n;
    double beta = 1.0;
    double value = 1.0;  // for Kind::constant

    [[nodiscard]] double operator()(double N, double k) const;
    [[nodiscard]] std::string describe() const;
    static Normalizer parse(std::string_view text);
};

struct WeakgenPoint {
    double N = 0;
    double c = 0;
    double value = 0;  // N * lambda(f > c d_N / k(N))
};

struct WeakgenTrajectory {
    double c = 0;
    std::vector<WeakgenPoint> points;
    bool decays = false;
};

/// N * lambda(f > c d_N/k(N)) along a grid of N, for each c.
std::vector<WeakgenTrajectory> weakgen_check(const PowerObservable& obs, const std::function<double(double)>& k,
                                             const Normalizer& d, const std::vector<double>& N_grid,
                                             const std::vector<double>& c_list);

}  // namespace trimbirk::observables
