#include "trimbirk/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "trimbirk/angle.hpp"
#include "trimbirk/error.hpp"
#include "trimbirk/experiments.hpp"
#include "trimbirk/report.hpp"
#include "trimbirk/suites.hpp"

namespace trimbirk::cli {

namespace {

using experiments::u64;
using orbit::RotationContext;
using report::json;

// ------------------------------------------------------------ value parsing

// Non-negative integer written plainly or in scientific form ("1e6").
Integer parse_count(const std::string& key, const std::string& text) {
    const auto e = text.find_first_of("eE");
    if (e == std::string::npos) {
        const Integer v = parse_integer(text);
        if (v < 0) throw ValidationError("--" + key + " must be non-negative, got " + text);
        return v;
    }
    const Rational mantissa = parse_rational(text.substr(0, e));
    const Integer exponent = parse_integer(text.substr(e + 1));
    if (exponent < 0 || exponent > 1000) throw ValidationError("--" + key + ": exponent out of range in " + text);
    Rational v = mantissa * Rational(pow(Integer(10), exponent.get_ui()));
    v.canonicalize();
    if (v.get_den() != 1 || v < 0) throw ValidationError("--" + key + " must be a non-negative integer, got " + text);
    return v.get_num();
}

u64 parse_u64(const std::string& key, const std::string& text) {
    const Integer v = parse_count(key, text);
    if (!v.fits_ulong_p()) throw ValidationError("--" + key + " is too large: " + text);
    return v.get_ui();
}

double parse_real(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw ValidationError("--" + key + " expects a number, got '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// a:b:log[:m] (m points per decade), a:b:lin:step, or v1,v2,...
std::vector<u64> parse_grid(const std::string& text) {
    const auto parts = split(text, ':');
    std::vector<u64> out;
    if (parts.size() == 1) {
        for (const auto& v : split(text, ',')) out.push_back(parse_u64("grid", v));
    } else if (parts.size() >= 3 && parts[2] == "log") {
        const u64 a = parse_u64("grid", parts[0]);
        const u64 b = parse_u64("grid", parts[1]);
        const u64 m = parts.size() == 4 ? parse_u64("grid", parts[3]) : 1;
        if (parts.size() > 4 || a < 1 || b < a || m < 1) throw ValidationError("bad log grid '" + text + "'");
        for (u64 i = 0;; ++i) {
            const double v = std::round(static_cast<double>(a) * std::pow(10.0, static_cast<double>(i) / m));
            if (v >= static_cast<double>(b)) break;
            const auto N = static_cast<u64>(v);
            if (out.empty() || out.back() < N) out.push_back(N);
        }
        out.push_back(b);
    } else if (parts.size() == 4 && parts[2] == "lin") {
        const u64 a = parse_u64("grid", parts[0]);
        const u64 b = parse_u64("grid", parts[1]);
        const u64 step = parse_u64("grid", parts[3]);
        if (step == 0 || b < a) throw ValidationError("bad linear grid '" + text + "'");
        for (u64 N = a; N <= b; N += step) out.push_back(N);
    } else {
        throw ValidationError("bad grid '" + text + "' (a:b:log[:m] | a:b:lin:step | v1,v2,...)");
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i] <= out[i - 1]) throw ValidationError("grid '" + text + "' is not strictly increasing");
    if (out.empty() || out.front() == 0) throw ValidationError("grid '" + text + "' needs positive values");
    return out;
}

// ------------------------------------------------------------ option table

struct Spec {
    const char* key;
    const char* names;  // CLI11 name string
    const char* help;
    bool flag = false;
};

const std::map<std::string, std::vector<Spec>>& command_options() {
    static const Spec alpha{"alpha", "--alpha", "angle specification"};
    static const Spec config{"config", "--config", "INI configuration file"};
    static const Spec budget{"budget", "--budget", "maximum orbit-point evaluations"};
    static const Spec out{"out", "--out,-o", "output path (default: stdout)"};
    static const Spec format{"format", "--format", "json | csv"};
    static const Spec N{"N", "--N", "orbit length"};
    static const Spec x{"x", "--x", "start point: a/q | auto:i/G | alpha"};
    static const Spec seed{"seed", "--seed", "design seed"};
    static const Spec obs{"obs", "--obs", "observable pow:beta=<b>,c1=<v>,c2=<v>"};
    static const std::map<std::string, std::vector<Spec>> table = {
        {"cfe", {alpha, config, out, format, {"depth", "--depth", "number of digits"}}},
        {"ostrowski", {alpha, config, out, format, N}},
        {"diophantine",
         {alpha, config, out, {"format", "--report,--format", "json | csv"}, {"depth", "--depth", "number of digits"},
          {"k", "--k", "trimming rule for condition (III)"}, {"grid", "--grid", "N range for condition (III)"}}},
        {"orbit",
         {alpha, config, budget, out, format, x, N, seed, {"k", "--k", "number of smallest positions"},
          {"fast", "--fast", "use the gap-structure selection", true}}},
        {"sum",
         {alpha, config, budget, out, format, x, N, seed, obs, {"k", "--k", "trimming count or rule"},
          {"trunc", "--trunc", "also sum the truncation at t=<rational>"}}},
        {"law",
         {alpha, config, budget, out, format, obs, seed, {"kind", "--kind", "strong | weak"},
          {"k", "--k", "trimming rule"}, {"grid", "--grid", "a:b:log[:m] | a:b:lin:step | v1,v2,..."},
          {"samples", "--samples", "number of strata G"}, {"norm", "--norm", "nlogn | beta:<b> | const:<v>"},
          {"eps", "--eps", "comma-separated epsilons"}}},
        {"oscillate",
         {alpha, config, budget, out, format, N, x, seed, {"kind", "--kind", "1x | beta | point"},
          {"n", "--n", "CFE level"}, {"gamma", "--gamma", "growth exponent (1x)"},
          {"beta", "--beta", "observable exponent (beta)"}, {"eps", "--eps", "epsilon (beta)"},
          {"khat", "--khat", "k-hat (beta)"}, {"psi", "--psi", "iterated log level (point)"},
          {"samples", "--samples", "samples per set"},
          {"allow-failed-hypotheses", "--allow-failed-hypotheses", "compute even when hypotheses fail", true}}},
    };
    return table;
}

// INI keys (section.key) and the option each one feeds.
const std::map<std::string, std::string>& config_keys() {
    static const std::map<std::string, std::string> m = {
        {"angle.spec", "alpha"},    {"observable.spec", "obs"}, {"observable.trunc", "trunc"},
        {"trimming.rule", "k"},     {"grid.N", "N"},            {"grid.grid", "grid"},
        {"grid.samples", "samples"}, {"grid.seed", "seed"},      {"grid.eps", "eps"},
        {"grid.x", "x"},            {"grid.depth", "depth"},    {"budget.max", "budget"},
        {"output.path", "out"},     {"output.format", "format"}, {"run.kind", "kind"},
        {"run.n", "n"},             {"run.gamma", "gamma"},     {"run.beta", "beta"},
        {"run.N", "N"},             {"run.khat", "khat"},       {"run.x", "x"},
        {"run.psi", "psi"},         {"run.norm", "norm"},       {"run.depth", "depth"},
        {"run.fast", "fast"},
    };
    return m;
}

struct Invocation {
    std::string command;
    std::map<std::string, std::string> values;
    u64 budget = experiments::default_budget;
    std::set<std::string> flag_keys;
    std::string positional;
    bool check = false;

    [[nodiscard]] bool has(const std::string& k) const { return values.count(k) != 0; }
    [[nodiscard]] std::optional<std::string> get(const std::string& k) const {
        const auto it = values.find(k);
        return it == values.end() ? std::nullopt : std::optional<std::string>(it->second);
    }
    [[nodiscard]] std::string get_or(const std::string& k, const std::string& fallback) const {
        return get(k).value_or(fallback);
    }
    [[nodiscard]] std::string require(const std::string& k) const {
        if (auto v = get(k)) return *v;
        throw ValidationError("missing required option --" + k + " for '" + command + "'");
    }
    [[nodiscard]] bool flag(const std::string& k) const {
        const auto v = get(k);
        return v && *v != "0" && *v != "false";
    }

    /// Normalized argv: the command, then every option except output and
    /// config paths in key order, with the resolved budget.
    [[nodiscard]] json echo() const {
        json argv = json::array();
        argv.push_back(command);
        for (const auto& [k, v] : values) {
            if (k == "out" || k == "config" || k == "budget") continue;
            if (flag_keys.count(k)) {
                if (flag(k)) argv.push_back("--" + k);
                continue;
            }
            argv.push_back("--" + k);
            argv.push_back(v);
        }
        argv.push_back("--budget");
        argv.push_back(std::to_string(budget));
        return {{"argv", std::move(argv)}, {"budget", budget}};
    }
};

bool command_has(const std::string& command, const std::string& key) {
    const auto& opts = command_options().at(command);
    return std::any_of(opts.begin(), opts.end(), [&](const Spec& s) { return key == s.key; });
}

void apply_config(Invocation& inv, std::map<std::string, std::string>& from_config) {
    const auto path = inv.get("config");
    if (!path) return;
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(*path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        if (e.line() == 0) throw IoError("cannot read config '" + *path + "': " + e.message());
        throw ValidationError("config '" + *path + "' line " + std::to_string(e.line()) + ": " + e.message());
    }
    for (const auto& [section, body] : tree) {
        for (const auto& [key, node] : body) {
            const std::string full = section + "." + key;
            const auto it = config_keys().find(full);
            if (it == config_keys().end()) throw ValidationError("config '" + *path + "': unknown key " + full);
            if (!command_has(inv.command, it->second)) continue;
            from_config[it->second] = node.get_value<std::string>();
        }
    }
}

// CLI flag > TRIMBIRK_BUDGET > [budget] max > default.
void resolve_budget(Invocation& inv, const std::map<std::string, std::string>& from_config,
                    const std::optional<std::string>& env_budget) {
    if (auto v = inv.get("budget")) {
        inv.budget = parse_u64("budget", *v);
    } else if (env_budget) {
        inv.budget = parse_u64("budget", *env_budget);
    } else if (auto it = from_config.find("budget"); it != from_config.end()) {
        inv.budget = parse_u64("budget", it->second);
    }
}

// ------------------------------------------------------------ angle helpers

struct Angle {
    std::string spec;
    contfrac::CoefficientStream stream;
};

Angle angle_of(const Invocation& inv) {
    const auto spec = inv.get("alpha");
    if (!spec) throw ValidationError("missing --alpha: every '" + inv.command + "' run needs an angle specification");
    return {*spec, parse_angle(*spec)};
}

RotationContext context_for(const Angle& a, const Integer& N_budget) {
    if (a.stream.is_finite()) {
        const Rational v = a.stream.exact_value()->rational_part();
        return RotationContext::rational(v.get_num(), v.get_den());
    }
    return RotationContext::make(a.stream, std::max(N_budget, Integer(1)));
}

Rational parse_x(const Invocation& inv, const RotationContext& ctx) {
    const std::string text = inv.get_or("x", "auto:0/1");
    if (text == "alpha") return ctx.alpha_proxy();
    if (text.rfind("auto:", 0) == 0) {
        const auto parts = split(text.substr(5), '/');
        if (parts.size() != 2) throw ValidationError("--x auto:i/G expected, got '" + text + "'");
        const u64 i = parse_u64("x", parts[0]);
        const u64 G = parse_u64("x", parts[1]);
        if (i >= G) throw ValidationError("--x auto:i/G needs i < G, got '" + text + "'");
        const auto design = experiments::SampleDesign::make(G, parse_u64("seed", inv.get_or("seed", "0")));
        return design.points(ctx)[i];
    }
    Rational x = parse_rational(text);
    if (x < 0 || x >= 1) throw DomainError("--x must lie in [0,1), got " + text);
    return x;
}

json angle_json(const RotationContext& ctx, const std::string& spec) {
    return report::to_json(experiments::AngleInfo::of(ctx, spec));
}

// Angle block for commands without an orbit: the guard level is the table depth.
json table_angle_json(const contfrac::ConvergentTable& t, const std::string& spec) {
    experiments::AngleInfo a;
    a.spec = spec;
    a.guard_level = t.top();
    a.fingerprint = orbit::fingerprint(t.digits(), t.top());
    a.proxy = to_string(t.p(t.top())) + "/" + to_string(t.q(t.top()));
    return report::to_json(a);
}

std::string format_of(const Invocation& inv) {
    const std::string f = inv.get_or("format", "json");
    if (f != "json" && f != "csv") throw ValidationError("--format must be json or csv, got '" + f + "'");
    return f;
}

// ------------------------------------------------------------ commands

struct Output {
    std::string text;
};

Output finish(const Invocation& inv, const json& angle, const json& result) {
    return {report::envelope(inv.command, inv.echo(), angle, result).dump(2) + "\n"};
}

Output cmd_cfe(const Invocation& inv) {
    const Angle a = angle_of(inv);
    const u64 depth = parse_u64("depth", inv.get_or("depth", "20"));
    if (depth < 1 || depth > 100000) throw ValidationError("--depth must be in [1, 100000]");
    std::size_t usable = depth;
    if (auto len = a.stream.available_length()) usable = std::min<std::size_t>(usable, *len);
    const bool exact = a.stream.exact_value().has_value();
    // without a closed form the reference is a convergent two levels deeper
    const auto deep = contfrac::convergents(a.stream, exact ? usable : usable + 2);
    const auto table = contfrac::convergents(a.stream, usable);
    const auto ref = exact ? *a.stream.exact_value()
                           : contfrac::QuadraticNumber(Rational(deep.p(deep.top()), deep.q(deep.top())));
    const auto deltas = contfrac::delta_table(deep, ref);

    if (format_of(inv) == "csv") {
        std::ostringstream s;
        s << "n,a_n,p_n,q_n,delta_n(num),delta_n(den)\n";
        for (std::size_t n = 1; n <= usable; ++n) {
            const auto& d = deltas[n];
            s << n << ',' << table.a(n) << ',' << table.p(n) << ',' << table.q(n) << ',';
            if (d.is_rational()) s << d.rational_part().get_num() << ',' << d.rational_part().get_den() << '\n';
            else s << '"' << d.to_string() << "\",\n";
        }
        return {s.str()};
    }
    json rows = json::array();
    for (std::size_t n = 1; n <= usable; ++n) {
        const auto& d = deltas[n];
        rows.push_back({{"n", n},
                        {"a_n", report::exact(table.a(n))},
                        {"p_n", report::exact(table.p(n))},
                        {"q_n", report::exact(table.q(n))},
                        {"delta_n", d.is_rational() ? report::exact(d.rational_part()) : json(d.to_string())}});
    }
    json result = {{"source", contfrac::to_string(a.stream.source())},
                   {"depth", usable},
                   {"delta_reference", exact ? "exact" : "convergent p_" + std::to_string(deep.top())},
                   {"rows", std::move(rows)}};
    return finish(inv, table_angle_json(table, a.spec), result);
}

contfrac::ConvergentTable table_beyond(const contfrac::CoefficientStream& s, const Integer& N) {
    std::size_t depth = 8;
    while (true) {
        if (auto len = s.available_length(); len && depth > *len) depth = *len;
        auto t = contfrac::convergents(s, depth);
        if (t.q(t.top()) > N) return t;
        if (auto len = s.available_length(); len && depth == *len)
            throw LengthError("the expansion ends before q_n exceeds " + N.get_str());
        depth *= 2;
    }
}

Output cmd_ostrowski(const Invocation& inv) {
    const Angle a = angle_of(inv);
    const Integer N = parse_count("N", inv.require("N"));
    if (N < 1) throw ValidationError("--N must be positive");
    const auto table = table_beyond(a.stream, N);
    const auto d = contfrac::ostrowski_expand(N, table);
    const auto w = contfrac::weighted_log_sums(d, table);
    if (format_of(inv) == "csv") {
        std::ostringstream s;
        s << "j,b_j,q_j\n";
        for (std::size_t j = 1; j <= d.level(); ++j) s << j << ',' << d[j] << ',' << table.q(j) << '\n';
        return {s.str()};
    }
    json digits = json::array();
    for (std::size_t j = 1; j <= d.level(); ++j) digits.push_back(report::exact(d[j]));
    const double Nd = to_double(N);
    json result = {{"N", report::exact(N)},
                   {"level", d.level()},
                   {"digits", std::move(digits)},
                   {"value", report::exact(contfrac::ostrowski_value(d, table))},
                   {"digit_sum", report::exact(w.digit_sum)},
                   {"main_term", report::number(w.main_term)},
                   {"digit_log_term", report::number(w.digit_log_term)},
                   {"N_log_N", report::number(Nd * std::log(Nd))}};
    return finish(inv, table_angle_json(table, a.spec), result);
}

Output cmd_diophantine(const Invocation& inv) {
    const Angle a = angle_of(inv);
    const u64 depth = parse_u64("depth", inv.get_or("depth", "30"));
    if (depth < 3 || depth > 100000) throw ValidationError("--depth must be in [3, 100000]");
    std::size_t usable = depth;
    if (auto len = a.stream.available_length()) usable = std::min<std::size_t>(usable, *len);
    const auto table = contfrac::convergents(a.stream, usable);
    const auto profile = diophantine::roth_profile(table);

    std::optional<diophantine::ConditionTrajectory> cond;
    if (auto k = inv.get("k")) {
        std::vector<Integer> range;
        if (auto g = inv.get("grid")) {
            for (u64 N : parse_grid(*g)) range.push_back(Integer(static_cast<unsigned long>(N)));
        } else {
            for (std::size_t n = 3; n < table.top(); ++n) range.push_back(table.q(n));
        }
        cond = diophantine::condition_III(diophantine::TrimmingSequence::parse(*k), table, range);
    }
    if (format_of(inv) == "csv") {
        std::ostringstream s;
        s << "n,a_n,q_n,log_ratio\n";
        for (const auto& [n, r] : profile.ratios) s << n << ',' << table.a(n) << ',' << table.q(n) << ',' << r << '\n';
        return {s.str()};
    }
    json result = {{"profile", report::to_json(profile)}};
    if (cond) result["condition_III"] = report::to_json(*cond);
    return finish(inv, table_angle_json(table, a.spec), result);
}

Output cmd_orbit(const Invocation& inv) {
    const Angle a = angle_of(inv);
    const u64 N = parse_u64("N", inv.require("N"));
    const u64 k = parse_u64("k", inv.get_or("k", "10"));
    if (N < 1) throw ValidationError("--N must be positive");
    experiments::require_budget("orbit scan", static_cast<long double>(N), inv.budget);
    const auto ctx = context_for(a, Integer(static_cast<unsigned long>(N)));
    ctx.require_valid(Integer(static_cast<unsigned long>(N)));
    const Rational x = parse_x(inv, ctx);
    std::vector<orbit::OrbitPoint> pts;
    json fast = nullptr;
    if (inv.flag("fast")) {
        auto sel = orbit::k_smallest_fast(ctx, x, N, k);
        pts = std::move(sel.points);
        fast = {{"used_fallback", sel.used_fallback}, {"notice", sel.notice}};
    } else {
        pts = orbit::k_smallest_positive(ctx, x, N, k);
    }
    if (format_of(inv) == "csv") {
        std::ostringstream s;
        s << "j,numerator,denominator,signed\n";
        for (const auto& p : pts)
            s << p.index << ',' << p.numerator << ',' << p.denominator << ',' << to_string(p.signed_position()) << '\n';
        return {s.str()};
    }
    json points = json::array();
    for (const auto& p : pts) {
        points.push_back({{"j", p.index},
                          {"numerator", report::exact(p.numerator)},
                          {"denominator", report::exact(p.denominator)},
                          {"signed", report::exact(p.signed_position())}});
    }
    json result = {{"N", N}, {"k", k}, {"x", report::exact(x)}, {"points", std::move(points)}};
    if (!fast.is_null()) result["fast"] = fast;
    return finish(inv, angle_json(ctx, a.spec), result);
}

Output cmd_sum(const Invocation& inv) {
    const Angle a = angle_of(inv);
    const auto obs = observables::PowerObservable::parse(inv.get_or("obs", "pow:beta=1,c1=1,c2=0"));
    const u64 N = parse_u64("N", inv.require("N"));
    if (N < 1) throw ValidationError("--N must be positive");
    const std::string ktext = inv.get_or("k", "0");
    const bool plain = !ktext.empty() && std::all_of(ktext.begin(), ktext.end(), ::isdigit);
    const u64 k = plain ? parse_u64("k", ktext) : diophantine::TrimmingSequence::parse(ktext).clamped(N);
    const bool with_trunc = inv.has("trunc");
    experiments::require_budget("trimmed sum", static_cast<long double>(N) * (with_trunc ? 2 : 1), inv.budget);
    const auto ctx = context_for(a, Integer(static_cast<unsigned long>(N)));
    const Rational x = parse_x(inv, ctx);
    const auto r = trimsum::trimmed_sum(ctx, obs, x, N, k);
    if (format_of(inv) == "csv") return {report::sum_csv(r)};
    json result = report::to_json(r);
    result["observable"] = obs.describe();
    if (with_trunc) {
        std::string t = *inv.get("trunc");
        if (t.rfind("t=", 0) == 0) t = t.substr(2);
        const auto f = observables::truncate(obs, parse_rational(t));
        result["truncation"] = report::exact(parse_rational(t));
        result["truncated_sum"] = report::number(trimsum::birkhoff_sum(ctx, f, x, N));
    }
    return finish(inv, angle_json(ctx, a.spec), result);
}

Output cmd_law(const Invocation& inv) {
    const Angle a = angle_of(inv);
    const std::string kind = inv.get_or("kind", "strong");
    if (kind != "strong" && kind != "weak") throw ValidationError("--kind must be strong or weak, got '" + kind + "'");
    experiments::LawConfig c;
    c.obs = observables::PowerObservable::parse(inv.get_or("obs", "pow:beta=1,c1=1,c2=0"));
    c.trim = diophantine::TrimmingSequence::parse(inv.get_or("k", "const:0"));
    if (auto n = inv.get("norm")) {
        c.d = observables::Normalizer::parse(*n);
    } else if (c.obs.beta() != 1.0) {
        c.d = observables::Normalizer{observables::Normalizer::Kind::beta, c.obs.beta(), 1.0};
    }
    c.grid = parse_grid(inv.get_or("grid", "1000:1000000:log"));
    c.design = experiments::SampleDesign::make(parse_u64("samples", inv.get_or("samples", "1000")),
                                               parse_u64("seed", inv.get_or("seed", "0")));
    if (auto e = inv.get("eps")) {
        c.epsilons.clear();
        for (const auto& v : split(*e, ',')) c.epsilons.push_back(parse_real("eps", v));
    }
    c.budget = inv.budget;
    experiments::require_budget("law run", static_cast<long double>(c.design.G) * c.grid.back(), inv.budget);
    const auto ctx = context_for(a, Integer(static_cast<unsigned long>(c.grid.back())));
    const auto r = kind == "strong" ? experiments::strong_law_run(ctx, a.spec, c)
                                    : experiments::weak_law_run(ctx, a.spec, c);
    if (format_of(inv) == "csv") return {report::law_csv(r)};
    return finish(inv, angle_json(ctx, a.spec), report::to_json(r));
}

Output cmd_oscillate(const Invocation& inv) {
    const Angle a = angle_of(inv);
    const std::string kind = inv.get_or("kind", "1x");
    const u64 n = parse_u64("n", inv.require("n"));
    if (n < 2) throw ValidationError("--n must be at least 2");
    const auto table = contfrac::convergents(a.stream, n + 1);
    const Integer q_next = table.q(n + 1);
    const std::string format = format_of(inv);
    if (format == "csv" && kind != "1x") throw ValidationError("csv output is available for --kind 1x only");
    const u64 seed = parse_u64("seed", inv.get_or("seed", "0"));

    if (kind == "1x") {
        const auto ctx = context_for(a, q_next - 1);
        experiments::Osc1xConfig c;
        c.gamma = parse_rational(inv.get_or("gamma", "1"));
        c.n = n;
        c.samples = parse_u64("samples", inv.get_or("samples", "200"));
        c.seed = seed;
        c.require_hypotheses = !inv.flag("allow-failed-hypotheses");
        c.budget = inv.budget;
        const auto r = experiments::oscillation_1x(ctx, a.spec, c);
        if (format == "csv") return {report::oscillation_csv(r)};
        return finish(inv, angle_json(ctx, a.spec), report::to_json(r));
    }
    if (kind == "beta") {
        const auto ctx = context_for(a, q_next - 1);
        experiments::OscBetaConfig c;
        c.beta = parse_real("beta", inv.get_or("beta", "2"));
        c.epsilon = parse_rational(inv.get_or("eps", "1/200"));
        c.n = n;
        if (auto N = inv.get("N")) c.N = parse_u64("N", *N);
        c.k_hat = parse_rational(inv.get_or("khat", "2"));
        c.samples = parse_u64("samples", inv.get_or("samples", "200"));
        c.seed = seed;
        c.budget = inv.budget;
        const auto r = experiments::oscillation_beta(ctx, a.spec, c);
        return finish(inv, angle_json(ctx, a.spec), report::to_json(r));
    }
    if (kind == "point") {
        experiments::PointOscConfig c;
        c.n = n;
        c.psi_level = static_cast<unsigned>(parse_u64("psi", inv.get_or("psi", "2")));
        if (auto N = inv.get("N")) c.N = parse_u64("N", *N);
        Integer need = q_next - 1;
        if (c.N && Integer(static_cast<unsigned long>(*c.N)) > need) need = Integer(static_cast<unsigned long>(*c.N));
        experiments::require_budget("point oscillation", to_double(need), inv.budget);
        const auto ctx = context_for(a, need);
        c.x = inv.has("x") ? parse_x(inv, ctx) : ctx.alpha_proxy();
        const auto r = experiments::point_osc(ctx, a.spec, c);
        return finish(inv, angle_json(ctx, a.spec), report::to_json(r));
    }
    throw ValidationError("--kind must be 1x, beta or point, got '" + kind + "'");
}

// ------------------------------------------------------------ dispatch

int exit_for(const Error& e) {
    switch (e.kind()) {
        case Error::Kind::budget: return over_budget;
        case Error::Kind::io: return io_failure;
        default: return invalid;
    }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             const std::optional<std::string>& env_budget, bool allow_out);

int cmd_verify(const Invocation& inv, std::ostream& out) {
    bool pass = true;
    for (const auto& r : suites::run_named(inv.positional)) {
        for (const auto& line : r.checks) {
            out << (line.pass ? "PASS " : "FAIL ") << r.suite << ": " << line.name << ": " << line.detail << '\n';
        }
        pass = pass && r.pass();
    }
    out << (pass ? "verify " + inv.positional + ": all checks passed\n" : "verify " + inv.positional + ": FAILED\n");
    return pass ? ok : check_failed;
}

int cmd_replay(const Invocation& inv, std::ostream& out, std::ostream& err) {
    const std::string original = report::read_file(inv.positional);
    json doc;
    try {
        doc = json::parse(original);
    } catch (const json::exception& e) {
        throw ValidationError("'" + inv.positional + "' is not a JSON report: " + e.what());
    }
    if (!doc.contains("schema") || doc["schema"] != report::schema_version || !doc.contains("config") ||
        !doc["config"].contains("argv")) {
        throw ValidationError("'" + inv.positional + "' has no " + std::string(report::schema_version) +
                              " config echo");
    }
    std::vector<std::string> args;
    for (const auto& v : doc["config"]["argv"]) args.push_back(v.get<std::string>());
    std::ostringstream regenerated;
    const int code = dispatch(args, regenerated, err, std::nullopt, false);
    if (code != ok) return code;
    if (!inv.check) {
        out << regenerated.str();
        return ok;
    }
    if (regenerated.str() == original) {
        out << "replay: identical (" << original.size() << " bytes)\n";
        return ok;
    }
    out << "replay: differs from " << inv.positional << '\n';
    return check_failed;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             const std::optional<std::string>& env_budget, bool allow_out) {
    CLI::App app{"Trimmed Birkhoff sums over irrational rotations", "trimbirk"};
    app.require_subcommand(1, 1);

    Invocation inv;
    std::map<std::string, std::map<std::string, std::string>> storage;
    std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> registered;
    std::map<std::string, std::map<std::string, bool>> flags;
    for (const auto& [name, specs] : command_options()) {
        static const std::map<std::string, std::string> about = {
            {"cfe", "digits, convergents and delta_n of an angle"},
            {"ostrowski", "Ostrowski digits of N"},
            {"diophantine", "Roth profile and condition (III) on a prefix"},
            {"orbit", "k smallest positive orbit positions"},
            {"sum", "trimmed Birkhoff sum at one point"},
            {"law", "strong or weak law run over a stratified design"},
            {"oscillate", "oscillation constructions for Liouville-type angles"},
        };
        auto* sub = app.add_subcommand(name, about.at(name));
        for (const auto& s : specs) {
            CLI::Option* o = s.flag ? sub->add_flag(s.names, flags[name][s.key], s.help)
                                    : sub->add_option(s.names, storage[name][s.key], s.help);
            registered[name].emplace_back(s.key, o);
        }
    }
    auto* verify = app.add_subcommand("verify", "run an invariant suite");
    verify->add_option("suite", inv.positional, "contfrac | ostrowski | bounds | law | oscillation | structural | all")
        ->required();
    auto* replay = app.add_subcommand("replay", "re-run the config echo of a JSON report");
    replay->add_option("report", inv.positional, "report file")->required();
    replay->add_flag("--check", inv.check, "compare the regenerated bytes with the file");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return ok;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return ok;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return usage;
    }

    try {
        if (verify->parsed()) {
            inv.command = "verify";
            return cmd_verify(inv, out);
        }
        if (replay->parsed()) {
            inv.command = "replay";
            return cmd_replay(inv, out, err);
        }
        for (const auto& [name, opts] : registered) {
            if (!app.get_subcommand(name)->parsed()) continue;
            inv.command = name;
            for (const auto& [key, value] : flags[name]) inv.flag_keys.insert(key);
            for (const auto& [key, opt] : opts) {
                if (opt->count() == 0) continue;
                auto fit = flags[name].find(key);
                inv.values[key] = fit != flags[name].end() ? "1" : storage[name][key];
            }
        }
        std::map<std::string, std::string> from_config;
        apply_config(inv, from_config);
        resolve_budget(inv, from_config, env_budget);
        for (const auto& [k, v] : from_config)
            if (k != "budget" && !inv.has(k)) inv.values[k] = v;
        if (command_has(inv.command, "budget")) inv.values["budget"] = std::to_string(inv.budget);
        if (!allow_out) inv.values.erase("out");

        Output o;
        if (inv.command == "cfe") o = cmd_cfe(inv);
        else if (inv.command == "ostrowski") o = cmd_ostrowski(inv);
        else if (inv.command == "diophantine") o = cmd_diophantine(inv);
        else if (inv.command == "orbit") o = cmd_orbit(inv);
        else if (inv.command == "sum") o = cmd_sum(inv);
        else if (inv.command == "law") o = cmd_law(inv);
        else if (inv.command == "oscillate") o = cmd_oscillate(inv);

        if (auto path = inv.get("out")) {
            report::write_file(*path, o.text);
        } else {
            out << o.text;
        }
        return ok;
    } catch (const Error& e) {
        err << "trimbirk " << inv.command << ": " << e.what() << '\n';
        return exit_for(e);
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::optional<std::string>& env_budget) {
    return dispatch(args, out, err, env_budget, true);
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::optional<std::string> env;
    if (const char* v = std::getenv("TRIMBIRK_BUDGET")) env = std::string(v);
    return run(args, std::cout, std::cerr, env);
}

}  // namespace trimbirk::cli
