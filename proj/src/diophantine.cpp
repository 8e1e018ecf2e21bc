#include "trimbirk/diophantine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>

#include "trimbirk/error.hpp"

namespace trimbirk::diophantine {

using contfrac::CoefficientStream;
using contfrac::ConvergentTable;

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

std::uint64_t to_u64(const Integer& v, const char* what) {
    if (v < 0 || !v.fits_ulong_p()) {
        throw RangeError(std::string(what) + " does not fit in 64 bits: " + to_string(v));
    }
    return v.get_ui();
}

// Exact ceil(N^(num/den)) for num >= 0.
std::uint64_t ceil_rational_power(std::uint64_t N, const Rational& theta) {
    const unsigned long num = theta.get_num().get_ui();
    const unsigned long den = theta.get_den().get_ui();
    Integer base = pow(Integer(static_cast<unsigned long>(N)), num);
    Integer root;
    const bool exact = mpz_root(root.get_mpz_t(), base.get_mpz_t(), den) != 0;
    if (!exact) root += 1;
    return to_u64(root, "k(N)");
}

std::uint64_t ceil_log_pow(std::uint64_t N, double p) {
    if (N <= 1) return 0;
    const double v = std::pow(std::log(static_cast<double>(N)), p);
    const double nearest = std::round(v);
    if (std::fabs(v - nearest) > 1e-9 * std::max(1.0, v)) {
        return static_cast<std::uint64_t>(std::ceil(v));
    }
    // Close to an integer: settle the ceiling at high precision.
    BigFloat x(Integer(static_cast<unsigned long>(N)), MPFR_RNDN, 256);
    BigFloat l = BigFloat::log(x, MPFR_RNDN);
    BigFloat e(p, 256);
    return to_u64(BigFloat::pow(l, e, MPFR_RNDN).ceil(), "k(N)");
}

// x^(num/den) with directed rounding, x > 0.
BigFloat pow_directed(const BigFloat& x, const Rational& e, mpfr_rnd_t rnd) {
    const mpfr_prec_t prec = mpfr_get_prec(x.get());
    const Integer num = e.get_num();
    const unsigned long den = e.get_den().get_ui();
    const bool negative = num < 0;
    const mpfr_rnd_t inner = negative ? (rnd == MPFR_RNDD ? MPFR_RNDU : MPFR_RNDD) : rnd;
    const Integer mag = negative ? Integer(-num) : num;
    BigFloat t(prec);
    mpfr_pow_ui(t.get(), x.get(), mag.get_ui(), inner);
    BigFloat r(prec);
    mpfr_rootn_ui(r.get(), t.get(), den, inner);
    if (!negative) return r;
    BigFloat out(prec);
    mpfr_ui_div(out.get(), 1, r.get(), rnd);
    return out;
}

class WindowParser {
public:
    WindowParser(std::string_view text, const std::map<std::string, Rational>& params) : s_(text), params_(params) {}

    bool at_end() {
        skip();
        return pos_ >= s_.size();
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    bool accept_word(std::string_view w) {
        skip();
        if (s_.substr(pos_, w.size()) == w) {
            pos_ += w.size();
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError("growth bound '" + std::string(s_) + "': " + what + " at offset " + std::to_string(pos_));
    }

    std::optional<Rational> number() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == start) return std::nullopt;
        Rational v(Integer(std::string(s_.substr(start, pos_ - start))));
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            const std::size_t fs = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ == fs) fail("digits expected after '.'");
            const std::string frac(s_.substr(fs, pos_ - fs));
            v += Rational(Integer(frac), pow(Integer(10), frac.size()));
        }
        if (pos_ < s_.size() && s_[pos_] == '/') {
            ++pos_;
            const std::size_t ds = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ == ds) fail("denominator expected");
            const Integer d(std::string(s_.substr(ds, pos_ - ds)));
            if (d == 0) fail("zero denominator");
            v /= d;
        }
        v.canonicalize();
        return v;
    }

    std::string identifier() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    Rational atom() {
        if (auto v = number()) return *v;
        const std::string name = identifier();
        if (name.empty()) fail("number or parameter expected");
        const auto it = params_.find(name);
        if (it == params_.end()) fail("unbound parameter '" + name + "'");
        return it->second;
    }

    Rational exponent() {
        if (!accept('(')) {
            const bool neg = accept('-');
            const Rational v = atom();
            return neg ? Rational(-v) : v;
        }
        Rational total = accept('-') ? Rational(-atom()) : atom();
        for (;;) {
            if (accept('+')) total += atom();
            else if (accept('-')) total -= atom();
            else break;
        }
        expect(')');
        return total;
    }

    std::size_t pos() const { return pos_; }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    std::string_view s_;
    const std::map<std::string, Rational>& params_;
    std::size_t pos_ = 0;
};

Integer max_digit_below(const ConvergentTable& table, std::size_t n) {
    Integer m = 0;
    for (std::size_t j = 1; j + 1 <= n && j <= table.depth(); ++j) m = std::max(m, table.a(j));
    return m;
}

void summarize(ConditionTrajectory& tr) {
    if (tr.points.empty()) return;
    double mn = tr.points.front().ratio;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& pt : tr.points) {
        mn = std::min(mn, pt.ratio);
        const double x = log_of(pt.N);
        sx += x;
        sy += pt.ratio;
        sxx += x * x;
        sxy += x * pt.ratio;
    }
    tr.min_ratio = mn;
    const double n = static_cast<double>(tr.points.size());
    const double den = n * sxx - sx * sx;
    tr.trend_slope = den > 0 ? (n * sxy - sx * sy) / den : 0.0;
    if (tr.points.size() >= 2) {
        const std::size_t half = tr.points.size() / 2;
        double head = tr.points.front().ratio, tail = tr.points.back().ratio;
        for (std::size_t i = 0; i < half; ++i) head = std::min(head, tr.points[i].ratio);
        for (std::size_t i = half; i < tr.points.size(); ++i) tail = std::min(tail, tr.points[i].ratio);
        tr.grows = tail > head;
    }
}

// q_{j-1}, q_j for the digit index j, from a_1..a_{j-1}.
std::pair<Integer, Integer> last_two_q(std::span<const Integer> previous) {
    Integer q_prev = 0, q = 1;
    for (const auto& a : previous) {
        Integer next = a * q + q_prev;
        q_prev = std::move(q);
        q = std::move(next);
    }
    return {q_prev, q};
}

std::vector<Integer> parse_digit_list(const std::string& text, bool allow_zero = false) {
    std::vector<Integer> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
                   item.end());
        if (item.empty() || item == "[" || item == "]") continue;
        if (item.front() == '[') item.erase(0, 1);
        if (!item.empty() && item.back() == ']') item.pop_back();
        const Integer v = parse_integer(item);
        if (v < 0 || (v == 0 && !allow_zero)) throw DomainError("digits must be positive, got " + item);
        out.push_back(v);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- trimming

TrimmingSequence TrimmingSequence::constant(std::uint64_t c) {
    TrimmingSequence t;
    t.kind_ = Kind::constant;
    t.c_ = c;
    return t;
}

TrimmingSequence TrimmingSequence::ceil_log_power(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("log power must be positive, got " + fmt(p));
    TrimmingSequence t;
    t.kind_ = Kind::ceil_log_power;
    t.p_ = p;
    return t;
}

TrimmingSequence TrimmingSequence::ceil_power(const Rational& theta) {
    Rational th = theta;
    th.canonicalize();
    if (th < 0 || th > 1) throw DomainError("power exponent must lie in [0,1], got " + to_string(th));
    if (!th.get_den().fits_ulong_p() || !th.get_num().fits_ulong_p()) {
        throw DomainError("power exponent has oversized terms: " + to_string(th));
    }
    TrimmingSequence t;
    t.kind_ = Kind::ceil_power;
    t.theta_ = th;
    return t;
}

TrimmingSequence TrimmingSequence::table(std::vector<std::uint64_t> values, bool monotone) {
    TrimmingSequence t;
    t.kind_ = Kind::table;
    t.table_ = std::move(values);
    t.monotone_ = monotone;
    for (std::size_t i = 0; i < t.table_.size(); ++i) {
        if (t.table_[i] > i + 1) {
            throw ValidationError("table entry k(" + std::to_string(i + 1) + ") = " + std::to_string(t.table_[i]) +
                                  " exceeds N");
        }
    }
    if (monotone) t.verify_monotone(t.table_.size());
    return t;
}

TrimmingSequence TrimmingSequence::parse(std::string_view text) {
    auto after = [&](std::string_view prefix) { return text.substr(prefix.size()); };
    if (text == "none" || text == "zero") return constant(0);
    if (text == "log") return ceil_log_power(1.0);
    if (text.rfind("const:", 0) == 0) {
        const Integer c = parse_integer(after("const:"));
        return constant(to_u64(c, "constant trimming"));
    }
    if (text.rfind("logpow:", 0) == 0) {
        const std::string body(after("logpow:"));
        std::size_t used = 0;
        double p = 0.0;
        try {
            p = std::stod(body, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != body.size()) throw ValidationError("bad log power '" + body + "'");
        return ceil_log_power(p);
    }
    if (text.rfind("pow:", 0) == 0) return ceil_power(parse_rational(after("pow:")));
    if (text.rfind("table:", 0) == 0) {
        std::string_view body = after("table:");
        bool monotone = false;
        if (const auto semi = body.find(';'); semi != std::string_view::npos) {
            if (body.substr(semi + 1) != "monotone") {
                throw ValidationError("table trimming accepts only the ';monotone' flag");
            }
            monotone = true;
            body = body.substr(0, semi);
        }
        std::vector<std::uint64_t> values;
        for (const auto& v : parse_digit_list(std::string(body), true)) values.push_back(to_u64(v, "table entry"));
        return table(std::move(values), monotone);
    }
    throw ValidationError("unknown trimming rule '" + std::string(text) +
                          "' (none | const:<c> | log | logpow:<p> | pow:<p/q> | table:<v,...>[;monotone])");
}

std::string TrimmingSequence::describe() const {
    switch (kind_) {
        case Kind::constant: return "const:" + std::to_string(c_);
        case Kind::ceil_log_power: return p_ == 1.0 ? "log" : "logpow:" + fmt(p_);
        case Kind::ceil_power: return "pow:" + to_string(theta_);
        case Kind::table: {
            std::string s = "table:";
            for (std::size_t i = 0; i < table_.size(); ++i) s += (i ? "," : "") + std::to_string(table_[i]);
            if (monotone_) s += ";monotone";
            return s;
        }
    }
    return "?";
}

std::uint64_t TrimmingSequence::raw(std::uint64_t N) const {
    switch (kind_) {
        case Kind::constant: return c_;
        case Kind::ceil_log_power: return ceil_log_pow(N, p_);
        case Kind::ceil_power: return N == 0 ? 0 : ceil_rational_power(N, theta_);
        case Kind::table:
            if (N == 0) return 0;
            if (N > table_.size()) {
                throw LengthError("trimming table has " + std::to_string(table_.size()) + " entries, asked for N = " +
                                  std::to_string(N));
            }
            return table_[N - 1];
    }
    return 0;
}

std::uint64_t TrimmingSequence::operator()(std::uint64_t N) const {
    const std::uint64_t k = raw(N);
    if (k > N) {
        throw ValidationError("trimming " + describe() + " gives k(" + std::to_string(N) + ") = " + std::to_string(k) +
                              " > N");
    }
    return k;
}

std::uint64_t TrimmingSequence::clamped(std::uint64_t N) const { return std::min(raw(N), N); }

Integer TrimmingSequence::at(const Integer& N) const {
    if (N < 0) throw DomainError("k(N) needs N >= 0");
    Integer k;
    if (N.fits_ulong_p()) {
        k = Integer(static_cast<unsigned long>(raw(N.get_ui())));
    } else {
        switch (kind_) {
            case Kind::constant: k = Integer(static_cast<unsigned long>(c_)); break;
            case Kind::ceil_log_power: {
                BigFloat l = BigFloat::log(BigFloat(N, MPFR_RNDN, 256), MPFR_RNDN);
                k = BigFloat::pow(l, BigFloat(p_, 256), MPFR_RNDN).ceil();
                break;
            }
            case Kind::ceil_power: {
                Integer base = pow(N, theta_.get_num().get_ui());
                const bool exact = mpz_root(k.get_mpz_t(), base.get_mpz_t(), theta_.get_den().get_ui()) != 0;
                if (!exact) k += 1;
                break;
            }
            case Kind::table:
                throw LengthError("trimming table has " + std::to_string(table_.size()) + " entries, asked for N = " +
                                  to_string(N));
        }
    }
    if (k > N) {
        throw ValidationError("trimming " + describe() + " gives k(" + to_string(N) + ") = " + to_string(k) + " > N");
    }
    return k;
}

void TrimmingSequence::verify_monotone(std::uint64_t N_max) const {
    if (N_max == 0) return;
    std::uint64_t prev = raw(1);
    for (std::uint64_t N = 2; N <= N_max; ++N) {
        const std::uint64_t cur = raw(N);
        if (cur < prev) {
            throw ValidationError("trimming " + describe() + " is not monotone: k(" + std::to_string(N) + ") = " +
                                  std::to_string(cur) + " < k(" + std::to_string(N - 1) + ") = " +
                                  std::to_string(prev));
        }
        prev = cur;
    }
}

// ---------------------------------------------------------------- iterated logs

double iterated_log(unsigned k, double x) {
    if (k == 0) throw DomainError("iterated log level must be positive");
    double v = x;
    for (unsigned level = 1; level <= k; ++level) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError("log_" + std::to_string(k) + "(" + fmt(x) + ") is undefined: level " +
                              std::to_string(level) + " receives " + fmt(v));
        }
        v = std::log(v);
    }
    return v;
}

// ---------------------------------------------------------------- growth bounds

GrowthBound GrowthBound::infinity() {
    GrowthBound g;
    g.infinite_ = true;
    g.text_ = "inf";
    return g;
}

GrowthBound GrowthBound::parse(std::string_view text, const std::map<std::string, Rational>& params) {
    GrowthBound g;
    g.text_ = std::string(text);
    WindowParser p(text, params);
    if (p.accept_word("inf") && p.at_end()) {
        g.infinite_ = true;
        return g;
    }
    WindowParser parser(text, params);
    do {
        Factor f;
        if (parser.accept_word("ln(q)")) {
            f.kind = Factor::Kind::log;
            f.level = 1;
        } else if (parser.accept_word("log(q)")) {
            f.kind = Factor::Kind::log;
            f.level = 1;
        } else if (parser.accept_word("log")) {
            const auto lv = parser.number();
            if (!lv || lv->get_den() != 1 || *lv < 1 || *lv > 8) parser.fail("log level 1..8 expected");
            f.kind = Factor::Kind::log;
            f.level = static_cast<unsigned>(lv->get_num().get_ui());
            if (!parser.accept_word("(q)")) parser.fail("'(q)' expected");
        } else if (parser.accept_word("q")) {
            f.kind = Factor::Kind::q;
        } else if (auto c = parser.number()) {
            if (*c <= 0) parser.fail("constant factors must be positive");
            f.kind = Factor::Kind::constant;
            f.value = *c;
        } else {
            parser.fail("factor expected (q, ln(q), log<k>(q) or a positive constant)");
        }
        if (parser.accept('^')) {
            f.exponent = parser.exponent();
            if (!f.exponent.get_den().fits_ulong_p() || !f.exponent.get_num().fits_slong_p()) {
                parser.fail("exponent too large");
            }
        }
        g.factors_.push_back(std::move(f));
    } while (parser.accept('*'));
    if (!parser.at_end()) parser.fail("unexpected trailing input");
    return g;
}

Enclosure GrowthBound::evaluate(const Integer& q) const {
    if (infinite_) throw DomainError("the infinite bound has no enclosure");
    if (q <= 0) throw DomainError("growth bounds need q >= 1, got " + to_string(q));
    Enclosure total{BigFloat(1.0), BigFloat(1.0)};
    for (const auto& f : factors_) {
        BigFloat lo, hi;
        switch (f.kind) {
            case Factor::Kind::q:
                lo = BigFloat(q, MPFR_RNDD);
                hi = BigFloat(q, MPFR_RNDU);
                break;
            case Factor::Kind::constant:
                lo = BigFloat(f.value, MPFR_RNDD);
                hi = BigFloat(f.value, MPFR_RNDU);
                break;
            case Factor::Kind::log: {
                lo = BigFloat(q, MPFR_RNDD);
                hi = BigFloat(q, MPFR_RNDU);
                for (unsigned level = 1; level <= f.level; ++level) {
                    lo = BigFloat::log(lo, MPFR_RNDD);
                    hi = BigFloat::log(hi, MPFR_RNDU);
                    if (!lo.is_positive()) {
                        throw DomainError("log_" + std::to_string(level) + "(" + to_string(q) +
                                          ") is not positive; " + text_ + " is below its validity threshold");
                    }
                }
                break;
            }
        }
        if (f.exponent != 1) {
            if (f.exponent >= 0) {
                lo = pow_directed(lo, f.exponent, MPFR_RNDD);
                hi = pow_directed(hi, f.exponent, MPFR_RNDU);
            } else {
                BigFloat nlo = pow_directed(hi, f.exponent, MPFR_RNDD);
                hi = pow_directed(lo, f.exponent, MPFR_RNDU);
                lo = std::move(nlo);
            }
        }
        total.lo = BigFloat::mul(total.lo, lo, MPFR_RNDD);
        total.hi = BigFloat::mul(total.hi, hi, MPFR_RNDU);
    }
    return total;
}

double GrowthBound::approx(const Integer& q) const {
    if (infinite_) return HUGE_VAL;
    const Enclosure e = evaluate(q);
    return BigFloat::add(e.lo, e.hi, MPFR_RNDN).to_double() / 2.0;
}

GrowthWindow GrowthWindow::parse(std::string_view lower, std::string_view upper,
                                 const std::map<std::string, Rational>& params) {
    GrowthWindow w{GrowthBound::parse(lower, params), GrowthBound::parse(upper, params)};
    if (w.lower.is_infinite()) throw DomainError("the lower bound of a window must be finite");
    return w;
}

std::string GrowthWindow::describe() const { return "(" + lower.text() + ", " + upper.text() + ")"; }

DigitRange window_digits(const GrowthWindow& window, const Integer& q_n, const Integer& q_prev) {
    const Enclosure lower = window.lower.evaluate(q_n);
    auto ratio = [&](const BigFloat& bound, mpfr_rnd_t rnd) {
        BigFloat shifted(BigFloat::sub(bound, BigFloat(q_prev, rnd == MPFR_RNDU ? MPFR_RNDD : MPFR_RNDU), rnd));
        BigFloat r;
        mpfr_div_z(r.get(), shifted.get(), q_n.get_mpz_t(), rnd);
        return r;
    };
    DigitRange out;
    // a q_n + q_{n-1} > lower: every a > (lower - q_{n-1})/q_n qualifies.
    out.a_min = std::max(Integer(1), Integer(ratio(lower.hi, MPFR_RNDU).floor() + 1));
    if (window.upper.is_infinite()) {
        out.chosen = out.a_min;
        return out;
    }
    const Enclosure upper = window.upper.evaluate(q_n);
    if (compare(lower.lo, upper.hi) >= 0) {
        throw ConstructionError("degenerate window " + window.describe() + " at q = " + to_string(q_n) +
                                ": lower bound is not below the upper bound");
    }
    out.a_max = ratio(upper.lo, MPFR_RNDD).ceil() - 1;
    if (*out.a_max < out.a_min) {
        throw ConstructionError("window " + window.describe() + " leaves no integer digit at q = " + to_string(q_n) +
                                " (a_min = " + to_string(out.a_min) + ", a_max = " + to_string(*out.a_max) + ")");
    }
    BigFloat lr, ur;
    mpfr_div_z(lr.get(), lower.lo.get(), q_n.get_mpz_t(), MPFR_RNDN);
    mpfr_div_z(ur.get(), upper.hi.get(), q_n.get_mpz_t(), MPFR_RNDN);
    const Integer mean = BigFloat::sqrt(BigFloat::mul(lr, ur, MPFR_RNDN), MPFR_RNDN).ceil();
    out.chosen = std::clamp(mean, out.a_min, *out.a_max);
    return out;
}

CoefficientStream construct_alpha_in_window(const GrowthWindow& window, std::vector<Integer> seed) {
    for (const auto& a : seed) {
        if (a <= 0) throw DomainError("seed digits must be positive");
    }
    const std::size_t seed_len = seed.size();
    auto rule = [window, seed_len](std::size_t index, std::span<const Integer> previous) -> Integer {
        const auto [q_prev, q] = last_two_q(previous);
        try {
            return window_digits(window, q, q_prev).chosen;
        } catch (const DomainError& e) {
            throw ConstructionError("level " + std::to_string(index) + " (q = " + to_string(q) + ", seed length " +
                                    std::to_string(seed_len) + "): " + e.what());
        } catch (const ConstructionError& e) {
            throw ConstructionError("level " + std::to_string(index) + ": " + e.what());
        }
    };
    std::string desc = "window" + window.describe() + " seed [";
    for (std::size_t i = 0; i < seed.size(); ++i) desc += (i ? "," : "") + to_string(seed[i]);
    desc += "]";
    return CoefficientStream::generated(std::move(seed), rule, desc);
}

std::vector<WindowLevelCheck> verify_window(const CoefficientStream& stream, const GrowthWindow& window,
                                            std::size_t first, std::size_t count) {
    const ConvergentTable table = contfrac::convergents(stream, first + count);
    std::vector<WindowLevelCheck> out;
    for (std::size_t n = first; n < first + count; ++n) {
        WindowLevelCheck c;
        c.level = n;
        c.q_n = table.q(n);
        c.q_next = table.q(n + 1);
        c.above_lower = compare(window.lower.evaluate(c.q_n).hi, c.q_next) < 0;
        c.below_upper = window.upper.is_infinite() || compare(window.upper.evaluate(c.q_n).lo, c.q_next) > 0;
        out.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------- Liouville construction

DominatingRule DominatingRule::parse(std::string_view name) {
    DominatingRule r;
    if (name == "zero" || name == "0") r.kind = Kind::zero;
    else if (name == "nlog" || name == "N/ln(N)") r.kind = Kind::n_over_log;
    else if (name == "sqrt") r.kind = Kind::sqrt;
    else if (name == "linear" || name == "N") r.kind = Kind::linear;
    else throw ValidationError("unknown dominating rule '" + std::string(name) + "' (zero | nlog | sqrt | linear)");
    return r;
}

std::string DominatingRule::describe() const {
    switch (kind) {
        case Kind::zero: return "zero";
        case Kind::n_over_log: return "nlog";
        case Kind::sqrt: return "sqrt";
        case Kind::linear: return "linear";
    }
    return "?";
}

Integer DominatingRule::value(const Integer& m) const {
    switch (kind) {
        case Kind::zero: return 0;
        case Kind::linear: return m;
        case Kind::sqrt: {
            Integer r = isqrt(m);
            if (r * r < m) r += 1;
            return r;
        }
        case Kind::n_over_log: {
            if (m <= 2) return m;
            BigFloat x(m, MPFR_RNDN, 256);
            BigFloat v = BigFloat::div(x, BigFloat::log(x, MPFR_RNDN), MPFR_RNDN);
            return v.ceil();
        }
    }
    return 0;
}

std::optional<Rational> DominatingRule::envelope(const Integer& m) const {
    switch (kind) {
        case Kind::zero: return Rational(0);
        case Kind::linear: return Rational(1);
        case Kind::sqrt: {
            if (m < 1) return std::nullopt;
            // ceil(sqrt m)/m <= 1/sqrt(m) + 1/m <= 1/isqrt(m) + 1/m, both decreasing.
            Rational r = Rational(1, 1) / Rational(isqrt(m)) + Rational(1) / Rational(m);
            r.canonicalize();
            return r;
        }
        case Kind::n_over_log: {
            if (m < 3) return std::nullopt;
            // ceil(m/ln m)/m <= 1/ln m + 1/m, decreasing for m >= 3.
            BigFloat lg = BigFloat::log(BigFloat(m, MPFR_RNDD), MPFR_RNDD);
            BigFloat inv;
            mpfr_ui_div(inv.get(), 1, lg.get(), MPFR_RNDU);
            Rational r;
            mpfr_get_q(r.get_mpq_t(), inv.get());
            r += Rational(1) / Rational(m);
            r.canonicalize();
            return r;
        }
    }
    return std::nullopt;
}

Integer u_of_eps(const DominatingRule& l, const Rational& eps, std::uint64_t budget) {
    if (eps <= 0) throw DomainError("u(eps) needs eps > 0");
    auto certified = [&](std::uint64_t m) {
        const auto env = l.envelope(Integer(static_cast<unsigned long>(m)));
        return env && *env < eps;
    };
    // Smallest m0 from which the envelope certifies l(m) < eps m for all m >= m0.
    std::uint64_t hi = 1;
    while (!certified(hi)) {
        if (hi >= budget) {
            throw BudgetError("u(" + to_string(eps) + ") for l = " + l.describe() + " not certified within " +
                              std::to_string(budget) + " candidates");
        }
        hi = std::min<std::uint64_t>(budget, hi * 2);
    }
    std::uint64_t lo = hi / 2;  // not certified (or 0)
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (certified(mid) ? hi : lo) = mid;
    }
    const Integer num = eps.get_num(), den = eps.get_den();
    // Below m0 the condition is checked one m at a time, top down.
    for (std::uint64_t m = hi; m-- > 1;) {
        const Integer M(static_cast<unsigned long>(m));
        if (!(l.value(M) * den < num * M)) return Integer(static_cast<unsigned long>(m + 1));
    }
    return 1;
}

CoefficientStream construct_alpha_seq1xrem(const DominatingRule& l, std::vector<Integer> seed, std::uint64_t budget) {
    for (const auto& a : seed) {
        if (a <= 0) throw DomainError("seed digits must be positive");
    }
    if (l.kind == DominatingRule::Kind::linear) {
        throw BudgetError("l(N) = N is not o(N); u(eps) does not exist for eps <= 1");
    }
    struct Cache {
        std::mutex mu;
        std::map<Integer, Integer> u;
    };
    auto cache = std::make_shared<Cache>();
    auto rule = [l, budget, cache](std::size_t, std::span<const Integer> previous) -> Integer {
        const auto [q_prev, q] = last_two_q(previous);
        Integer u;
        {
            std::lock_guard lock(cache->mu);
            if (auto it = cache->u.find(q); it != cache->u.end()) u = it->second;
        }
        if (u == 0) {
            u = u_of_eps(l, Rational(Integer(1), Integer(q * q)), budget);
            std::lock_guard lock(cache->mu);
            cache->u.emplace(q, u);
        }
        // Smallest a with a q + q_prev > q^2 u.
        return std::max(Integer(1), Integer(floor_div(q * q * u - q_prev, q) + 1));
    };
    std::string desc = "seq1x(l=" + l.describe() + ") seed [";
    for (std::size_t i = 0; i < seed.size(); ++i) desc += (i ? "," : "") + to_string(seed[i]);
    desc += "]";
    return CoefficientStream::generated(std::move(seed), rule, desc);
}

// ---------------------------------------------------------------- classifiers

DiophantineReport roth_profile(const ConvergentTable& table) {
    if (table.source() == contfrac::StreamSource::finite_rational) {
        throw DomainError("Roth profile needs an irrational angle; got a finite expansion");
    }
    if (table.top() < 4) {
        throw LengthError("Roth profile needs at least 3 levels, table reaches q_" + std::to_string(table.top()));
    }
    DiophantineReport r;
    r.horizon = table.top();
    for (std::size_t n = 1; n + 1 <= table.top(); ++n) {
        if (table.q(n) < 2) continue;
        r.ratios.emplace_back(n, log_of(table.q(n + 1)) / log_of(table.q(n)));
    }
    r.max_digit = 0;
    for (const auto& a : table.digits()) r.max_digit = std::max(r.max_digit, a);

    const std::size_t m = r.ratios.size();
    if (m >= 3) {
        const std::size_t third = std::max<std::size_t>(1, m / 3);
        double head = 0.0, tail = 0.0;
        for (std::size_t i = 0; i < third; ++i) head = std::max(head, r.ratios[i].second - 1.0);
        for (std::size_t i = m - third; i < m; ++i) tail = std::max(tail, r.ratios[i].second - 1.0);
        r.roth_consistent_on_prefix = tail <= 0.5 * head;
    }
    const auto& d = table.digits();
    const std::size_t half = d.size() / 2;
    Integer first = 0, second = 0;
    for (std::size_t i = 0; i < d.size(); ++i) (i < half ? first : second) = std::max(i < half ? first : second, d[i]);
    r.bounded_on_prefix = half > 0 && second <= first;
    return r;
}

ConditionTrajectory condition_III(const TrimmingSequence& k, const ConvergentTable& table,
                                  const std::vector<Integer>& N_range) {
    ConditionTrajectory tr;
    for (const auto& N : N_range) {
        if (N < 1) throw DomainError("condition (III) needs N >= 1");
        const std::size_t n = table.level_of(N);
        ConditionPoint pt;
        pt.N = N;
        pt.level = n;
        const Integer b_n = floor_div(N, table.q(n));
        pt.denominator = std::max(b_n, max_digit_below(table, n));
        pt.k = k.at(N);
        pt.ratio = to_double(pt.k) / to_double(pt.denominator);
        tr.points.push_back(std::move(pt));
    }
    summarize(tr);
    return tr;
}

ConditionTrajectory condition_D(const TrimmingSequence& k, const ConvergentTable& table,
                                const std::vector<Integer>& subsequence, const Rational& margin) {
    if (margin <= 0 || margin >= 1) throw DomainError("margin must lie in (0,1), got " + to_string(margin));
    ConditionTrajectory tr;
    for (const auto& N : subsequence) {
        if (N < 1) throw DomainError("condition (D) needs N >= 1");
        const std::size_t n = table.level_of(N);
        if (Rational(N) > (1 - margin) * Rational(table.q(n + 1))) {
            throw ValidationError("N = " + to_string(N) + " exceeds (1 - " + to_string(margin) + ") q_" +
                                  std::to_string(n + 1) + " = " + to_string(table.q(n + 1)));
        }
        ConditionPoint pt;
        pt.N = N;
        pt.level = n;
        pt.denominator = floor_div(N, table.q(n));
        pt.k = k.at(N);
        pt.ratio = to_double(pt.k) / to_double(pt.denominator);
        tr.points.push_back(std::move(pt));
    }
    summarize(tr);
    return tr;
}

std::vector<Integer> canonical_subsequence(const ConvergentTable& table) {
    std::vector<Integer> out;
    for (std::size_t n = 1; n <= table.depth(); ++n) {
        if (table.a(n) <= 2 || table.q(n) == 0) continue;
        const Integer reps = ceil_div(table.a(n), 2);
        for (Integer s = 1; s <= reps; ++s) {
            const Integer N = s * table.q(n);
            if (N >= table.q(table.top())) return out;
            out.push_back(N);
        }
    }
    return out;
}

// ---------------------------------------------------------------- named rules

CoefficientStream named_rule(const std::string& name, const std::map<std::string, std::string>& params) {
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        const auto it = params.find(key);
        if (it == params.end()) return std::nullopt;
        return it->second;
    };
    auto require_known = [&](std::initializer_list<std::string_view> keys, bool allow_others) {
        if (allow_others) return;
        for (const auto& [k, v] : params) {
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
                throw ValidationError("rule " + name + " does not take parameter '" + k + "'");
            }
        }
    };

    if (name == "window") {
        const auto lower = get("lower");
        const auto upper = get("upper");
        if (!lower || !upper) throw ValidationError("rule window needs lower=<bound> and upper=<bound>");
        std::map<std::string, Rational> bindings;
        for (const auto& [k, v] : params) {
            if (k == "lower" || k == "upper" || k == "seed") continue;
            bindings[k] = parse_rational(v);
        }
        const std::vector<Integer> seed = get("seed") ? parse_digit_list(*get("seed")) : std::vector<Integer>{};
        return construct_alpha_in_window(GrowthWindow::parse(*lower, *upper, bindings), seed);
    }
    if (name == "seq1x") {
        require_known({"l", "seed", "budget"}, false);
        const auto rule = DominatingRule::parse(get("l").value_or("zero"));
        const std::vector<Integer> seed = get("seed") ? parse_digit_list(*get("seed")) : std::vector<Integer>{};
        const std::uint64_t budget =
            get("budget") ? to_u64(parse_integer(*get("budget")), "budget") : default_scan_budget;
        return construct_alpha_seq1xrem(rule, seed, budget);
    }
    if (name == "bounded") {
        require_known({"max", "seed"}, false);
        const std::uint64_t bound = to_u64(parse_integer(get("max").value_or("5")), "max");
        const std::uint64_t seed = to_u64(parse_integer(get("seed").value_or("1")), "seed");
        if (bound < 1) throw DomainError("bounded rule needs max >= 1");
        auto rule = [bound, seed](std::size_t index, std::span<const Integer>) -> Integer {
            std::mt19937_64 gen(seed * 0x9E3779B97F4A7C15ULL + index);
            std::uniform_int_distribution<std::uint64_t> dist(1, bound);
            return Integer(static_cast<unsigned long>(dist(gen)));
        };
        return CoefficientStream::generated({}, rule,
                                            "bounded(max=" + std::to_string(bound) + ";seed=" + std::to_string(seed) +
                                                ")");
    }
    if (name == "e_minus_2") {
        require_known({}, false);
        // e - 2 = [0; 1, 2, 1, 1, 4, 1, 1, 6, ...]
        auto rule = [](std::size_t index, std::span<const Integer>) -> Integer {
            if (index == 1) return 1;
            const std::size_t i = index - 2;
            return i % 3 == 0 ? Integer(static_cast<unsigned long>(2 * (i / 3 + 1))) : Integer(1);
        };
        return CoefficientStream::generated({}, rule, "e_minus_2");
    }
    if (name == "constant") {
        require_known({"a"}, false);
        const Integer a = parse_integer(get("a").value_or("1"));
        if (a < 1) throw DomainError("constant rule needs a >= 1");
        auto rule = [a](std::size_t, std::span<const Integer>) -> Integer { return a; };
        return CoefficientStream::generated({}, rule, "constant(a=" + to_string(a) + ")");
    }
    throw ValidationError("unknown digit rule '" + name + "' (window | seq1x | bounded | e_minus_2 | constant)");
}

}  // namespace trimbirk::diophantine
