#include "trimbirk/observables.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "trimbirk/error.hpp"

namespace trimbirk::observables {

namespace {

double parse_double(std::string_view key, std::string_view text) {
    try {
        std::size_t used = 0;
        const std::string s(text);
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ValidationError("bad value for " + std::string(key) + ": '" + std::string(text) + "'");
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

PowerObservable::PowerObservable(double beta, double c1, double c2) : beta_(beta), c1_(c1), c2_(c2) {
    if (!std::isfinite(beta) || beta < 1.0) {
        throw DomainError("beta must be a finite number >= 1, got " + fmt(beta));
    }
    if (beta != 1.0 && std::fabs(beta - 1.0) < 1e-6) {
        throw DomainError("beta within 1e-6 of 1 is ambiguous; use beta = 1 exactly");
    }
    if (!(c1 > 0.0) || !std::isfinite(c1)) {
        throw DomainError("c1 must be positive, got " + fmt(c1));
    }
    if (!(c2 >= 0.0) || !std::isfinite(c2)) {
        throw DomainError("c2 must be nonnegative, got " + fmt(c2));
    }
}

PowerObservable PowerObservable::parse(std::string_view text) {
    constexpr std::string_view prefix = "pow:";
    if (text.substr(0, prefix.size()) != prefix) {
        throw ValidationError("observable must start with 'pow:', got '" + std::string(text) + "'");
    }
    text.remove_prefix(prefix.size());
    double beta = 1.0, c1 = 1.0, c2 = 0.0;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const std::string_view item = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("expected key=value in observable, got '" + std::string(item) + "'");
        }
        const auto key = item.substr(0, eq);
        const auto val = item.substr(eq + 1);
        if (key == "beta") beta = parse_double(key, val);
        else if (key == "c1") c1 = parse_double(key, val);
        else if (key == "c2") c2 = parse_double(key, val);
        else throw ValidationError("unknown observable parameter '" + std::string(key) + "'");
    }
    return PowerObservable(beta, c1, c2);
}

std::string PowerObservable::describe() const {
    return "pow:beta=" + fmt(beta_) + ",c1=" + fmt(c1_) + ",c2=" + fmt(c2_);
}

double PowerObservable::operator()(const Rational& x) const {
    if (x < 0 || x >= 1) {
        throw DomainError("observable evaluated outside [0,1): " + to_string(x));
    }
    if (x == 0) return 0.0;
    const double r0 = to_double(Rational(1 / x));
    const double r1 = c2_ == 0.0 ? 0.0 : to_double(Rational(1 / (1 - x)));
    return from_ratios(r0, r1);
}

double PowerObservable::real(double x) const {
    double v = c1_ * std::pow(x, -beta_);
    if (c2_ != 0.0) v += c2_ * std::pow(1.0 - x, -beta_);
    return v;
}

double PowerObservable::minimizer() const {
    if (c2_ == 0.0) return 1.0;
    return 1.0 / (1.0 + std::pow(c2_ / c1_, 1.0 / (beta_ + 1.0)));
}

double PowerObservable::min_value() const {
    if (c2_ == 0.0) return c1_;
    return real(minimizer());
}

TruncatedObservable::TruncatedObservable(PowerObservable base, Rational t)
    : base_(base),
      left_(base.beta(), base.c1(), 0.0, PowerObservable::Unchecked{}),
      right_(base.beta(), 0.0, base.c2(), PowerObservable::Unchecked{}),
      t_(std::move(t)) {
    t_.canonicalize();
    if (t_ <= 0 || t_ >= 1) {
        throw DomainError("truncation threshold must lie in (0,1), got " + to_string(t_));
    }
    if (base_.c2() != 0.0 && 2 * t_ > 1) {
        throw DomainError("two-sided truncation needs t <= 1/2, got " + to_string(t_));
    }
    td_ = to_double(t_);
}

TruncatedObservable truncate(const PowerObservable& obs, const Rational& t) { return TruncatedObservable(obs, t); }

double TruncatedObservable::operator()(const Rational& x) const {
    if (x < 0 || x >= 1) {
        throw DomainError("observable evaluated outside [0,1): " + to_string(x));
    }
    if (x == 0) return 0.0;
    const bool left = x >= t_;
    const bool right = base_.c2() != 0.0 && x <= 1 - t_;
    if (left && (right || base_.c2() == 0.0)) return base_(x);
    if (left) return left_(x);
    if (right) return right_(x);
    return 0.0;
}

TruncatedObservable::Cuts TruncatedObservable::cuts(const Integer& D) const {
    Cuts c;
    c.lo_cut = to_u128(ceil_of(Rational(t_ * D)));
    c.hi_cut = to_u128(floor_of(Rational((1 - t_) * D)));
    return c;
}

double tail_integral(double beta, double t) {
    if (beta == 1.0) return -std::log(t);
    return (std::pow(t, 1.0 - beta) - 1.0) / (beta - 1.0);
}

double TruncatedObservable::integral() const {
    return (base_.c1() + base_.c2()) * tail_integral(base_.beta(), td_);
}

double TruncatedObservable::circle_variation() const {
    const double b = base_.beta();
    const double c1 = base_.c1();
    const double c2 = base_.c2();
    const double t = td_;
    if (c2 == 0.0) {
        // 0 -> c1 t^-b at t, down to c1 at 1-, back to 0 across the glued point.
        return 2.0 * c1 * std::pow(t, -b);
    }
    const double s = 1.0 - t;
    const double m = std::clamp(base_.minimizer(), t, s);
    const double mid = base_.real(t) + base_.real(s) - 2.0 * base_.real(m);
    return (c1 + c2)                               // point value f(0) = 0 between c1 and c2
           + c2 * (std::pow(s, -b) - 1.0)          // c2 part rising on (0,t)
           + c1 * std::pow(t, -b)                  // c1 part switching on at t
           + mid                                   // both parts on [t,1-t]
           + c2 * std::pow(t, -b)                  // c2 part switching off after 1-t
           + c1 * (std::pow(s, -b) - 1.0);         // c1 part falling on (1-t,1)
}

double TruncatedObservable::variation() const { return circle_variation() - base_.c1(); }

double normalizer_1x(double N) {
    if (N < 2) {
        throw DomainError("N log N normalizer needs N >= 2");
    }
    return N * std::log(N);
}

double normalizer_beta(double N, double k, double beta) {
    if (beta == 1.0) {
        throw DomainError("beta = 1: use the N log N normalizer");
    }
    if (!(beta > 1.0)) {
        throw DomainError("beta must exceed 1");
    }
    if (k < 1 || k > N) {
        throw DomainError("normalizer needs 1 <= k <= N");
    }
    // exp of the log form keeps N^beta from overflowing for large N.
    return std::exp(beta * std::log(N) + (1.0 - beta) * std::log(k)) / (beta - 1.0);
}

double tail_measure(const PowerObservable& obs, double s) {
    if (!(s > 0.0)) return 1.0;
    if (obs.one_sided()) {
        return std::min(1.0, std::pow(obs.c1() / s, 1.0 / obs.beta()));
    }
    if (s < obs.min_value()) return 1.0;
    const double xs = obs.minimizer();
    // f decreases on (0, xs] and increases on [xs, 1).
    auto solve = [&](double lo, double hi, bool decreasing) {
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const bool above = obs.real(mid) > s;
            if (above == decreasing) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double xl = solve(0.0, xs, true);
    const double xr = solve(xs, 1.0, false);
    return std::clamp(xl + (1.0 - xr), 0.0, 1.0);
}

double Normalizer::operator()(double N, double k) const {
    switch (kind) {
        case Kind::n_log_n: return normalizer_1x(N);
        case Kind::beta: return normalizer_beta(N, k, beta);
        case Kind::constant: return value;
    }
    return 0.0;
}

std::string Normalizer::describe() const {
    switch (kind) {
        case Kind::n_log_n: return "nlogn";
        case Kind::beta: return "beta:" + fmt(beta);
        case Kind::constant: return "const:" + fmt(value);
    }
    return "?";
}

Normalizer Normalizer::parse(std::string_view text) {
    Normalizer d;
    if (text == "nlogn") return d;
    if (text.substr(0, 5) == "beta:") {
        d.kind = Kind::beta;
        d.beta = parse_double("beta", text.substr(5));
        if (!(d.beta > 1.0) || std::fabs(d.beta - 1.0) < 1e-6) {
            throw DomainError("beta normalizer needs beta > 1");
        }
        return d;
    }
    if (text.substr(0, 6) == "const:") {
        d.kind = Kind::constant;
        d.value = parse_double("const", text.substr(6));
        return d;
    }
    throw ValidationError("unknown normalizer '" + std::string(text) + "' (nlogn | beta:<b> | const:<v>)");
}

std::vector<WeakgenTrajectory> weakgen_check(const PowerObservable& obs, const std::function<double(double)>& k,
                                             const Normalizer& d, const std::vector<double>& N_grid,
                                             const std::vector<double>& c_list) {
    std::vector<WeakgenTrajectory> out;
    for (double c : c_list) {
        WeakgenTrajectory tr;
        tr.c = c;
        for (double N : N_grid) {
            const double kN = k(N);
            double value = 0.0;
            if (kN > 0) {
                const double level = c * d(N, kN) / kN;
                value = N * tail_measure(obs, level);
            }
            tr.points.push_back({N, c, value});
        }
        const std::size_t n = tr.points.size();
        if (n >= 2) {
            const std::size_t half = n / 2;
            double first_max = 0.0, second_max = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                (i < half ? first_max : second_max) = std::max(i < half ? first_max : second_max, tr.points[i].value);
            }
            tr.decays = tr.points.back().value < tr.points.front().value && second_max <= first_max;
        }
        out.push_back(std::move(tr));
    }
    return out;
}

}  // namespace trimbirk::observables
