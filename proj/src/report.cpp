#include "trimbirk/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "trimbirk/error.hpp"

namespace trimbirk::report {

namespace {

std::string csv_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json doubles(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

json strings(const std::vector<std::string>& v) {
    json out = json::array();
    for (const auto& s : v) out.push_back(s);
    return out;
}

json optional_bool(const std::optional<bool>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json exact(const Rational& v) {
    Rational c = v;
    c.canonicalize();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

json exact(const Integer& v) { return v.get_str(); }

json to_json(const experiments::AngleInfo& a) {
    return {{"spec", a.spec}, {"fingerprint", a.fingerprint}, {"guard_level", a.guard_level}, {"proxy", a.proxy}};
}

json to_json(const experiments::SampleDesign& d) {
    return {{"G", d.G}, {"seed", d.seed}, {"offset", exact(d.offset)}};
}

json to_json(const trimsum::TrimmedSumResult& r) {
    json removed = json::array();
    for (const auto& t : r.removed) removed.push_back({{"j", t.j}, {"value", number(t.value)}});
    return {{"N", r.N},
            {"k", r.k},
            {"x", exact(r.x)},
            {"total", number(r.total)},
            {"trimmed", number(r.trimmed)},
            {"removed", std::move(removed)},
            {"residual", number(r.residual)}};
}

json to_json(const trimsum::ClusterGapReport& r) {
    return {{"level", r.level},
            {"N", r.N},
            {"k", r.k},
            {"b", r.b},
            {"cluster_size", r.cluster_size},
            {"epsilon", exact(r.epsilon)},
            {"measured", number(r.measured)},
            {"harmonic_bound", number(r.harmonic_bound)},
            {"hypotheses_hold", r.hypotheses_hold},
            {"note", r.note},
            {"verdict", optional_bool(r.verdict)}};
}

json to_json(const experiments::LawReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"N", row.N},
                        {"k", row.k},
                        {"d", number(row.d)},
                        {"max_deviation", number(row.max_deviation)},
                        {"mean_ratio", number(row.mean_ratio)},
                        {"lambda_hat", doubles(row.lambda_hat)},
                        {"ratios", doubles(row.ratios)}});
    }
    return {{"kind", r.kind},
            {"observable", r.observable},
            {"trimming", r.trimming},
            {"normalizer", r.normalizer},
            {"design", to_json(r.design)},
            {"epsilons", doubles(r.epsilons)},
            {"rows", std::move(rows)}};
}

json to_json(const experiments::IntervalUnion& u) {
    json arcs = json::array();
    for (const auto& a : u.arcs) arcs.push_back({exact(a.lo), exact(a.hi)});
    return arcs;
}

namespace {

json samples_json(const std::vector<experiments::SetSample>& samples) {
    json out = json::array();
    for (const auto& s : samples) out.push_back({{"x", exact(s.x)}, {"member", s.member}, {"sums", doubles(s.sums)}});
    return out;
}

}  // namespace

json to_json(const experiments::OscillationReport& r) {
    return {{"kind", r.kind},
            {"mirrored", r.mirrored},
            {"level", r.level},
            {"q_n", exact(r.q_n)},
            {"q_next", exact(r.q_next)},
            {"gamma", exact(r.gamma)},
            {"N", r.N},
            {"k_max", r.k_max},
            {"failed_hypotheses", strings(r.failed_hypotheses)},
            {"A", to_json(r.A)},
            {"B", to_json(r.B)},
            {"measure_A", exact(r.measure_A)},
            {"measure_B", exact(r.measure_B)},
            {"measure_target", exact(r.measure_target)},
            {"threshold_A", number(r.threshold_A)},
            {"threshold_B", number(r.threshold_B)},
            {"min_A", number(r.min_A)},
            {"max_B", number(r.max_B)},
            {"violations_A", r.violations_A},
            {"violations_B", r.violations_B},
            {"largest_k_all_A", r.largest_k_all_A ? json(*r.largest_k_all_A) : json(nullptr)},
            {"pass", r.pass},
            {"notes", strings(r.notes)},
            {"samples_A", samples_json(r.samples_A)},
            {"samples_B", samples_json(r.samples_B)}};
}

json to_json(const experiments::OscBetaReport& r) {
    return {{"kind", "beta"},
            {"mirrored", r.mirrored},
            {"level", r.level},
            {"q_n", exact(r.q_n)},
            {"q_next", exact(r.q_next)},
            {"N", r.N},
            {"k", r.k},
            {"k_hat", exact(r.k_hat)},
            {"epsilon", exact(r.epsilon)},
            {"beta", number(r.beta)},
            {"A_prime", to_json(r.A_prime)},
            {"measure_A_prime", exact(r.measure_A_prime)},
            {"measure_floor", exact(r.measure_floor)},
            {"shift", exact(r.shift)},
            {"s0", number(r.s0)},
            {"count_A", r.count_A},
            {"count_B", r.count_B},
            {"gap", number(r.gap)},
            {"scale", number(r.scale)},
            {"fitted_c", number(r.fitted_c)},
            {"notes", strings(r.notes)}};
}

json to_json(const experiments::PointOscReport& r) {
    return {{"kind", "point"},
            {"level", r.level},
            {"q_n", exact(r.q_n)},
            {"q_next", exact(r.q_next)},
            {"N", r.N},
            {"scale", r.generalized_scale ? "generalized-scale" : "literal"},
            {"psi_level", r.psi_level},
            {"failed_hypotheses", strings(r.failed_hypotheses)},
            {"cluster", to_json(r.cluster)},
            {"half_N_log_N", number(r.half_N_log_N)},
            {"verdict", optional_bool(r.verdict)}};
}

namespace {

json qn_row(const experiments::QnBoundRow& row) {
    return {{"n", row.n},       {"q_n", exact(row.q_n)},        {"x_index", row.x_index}, {"x", exact(row.x)},
            {"lhs", number(row.lhs)}, {"bound", number(row.bound)}, {"pass", row.pass}};
}

}  // namespace

json to_json(const experiments::QnBoundSuite& s) {
    json failures = json::array();
    for (const auto& row : s.failures) failures.push_back(qn_row(row));
    double worst = 0.0;
    for (const auto& row : s.rows) worst = std::max(worst, row.lhs / row.bound);
    return {{"bound_scale", number(s.bound_scale)},
            {"design", to_json(s.design)},
            {"checks", s.rows.size()},
            {"worst_ratio", number(worst)},
            {"failures", std::move(failures)}};
}

json to_json(const std::vector<experiments::LogPropPoint>& points) {
    json out = json::array();
    for (const auto& p : points)
        out.push_back({{"N", exact(p.N)}, {"ratio", number(p.ratio)}, {"witness", p.witness}, {"level", p.level}});
    return out;
}

json to_json(const diophantine::DiophantineReport& r) {
    json ratios = json::array();
    for (const auto& [n, v] : r.ratios) ratios.push_back({{"n", n}, {"ratio", number(v)}});
    return {{"horizon", r.horizon},
            {"max_digit", exact(r.max_digit)},
            {"roth_consistent_on_prefix", r.roth_consistent_on_prefix},
            {"bounded_on_prefix", r.bounded_on_prefix},
            {"ratios", std::move(ratios)}};
}

json to_json(const diophantine::ConditionTrajectory& t) {
    json points = json::array();
    for (const auto& p : t.points) {
        points.push_back({{"N", exact(p.N)},
                          {"level", p.level},
                          {"denominator", exact(p.denominator)},
                          {"k", exact(p.k)},
                          {"ratio", number(p.ratio)}});
    }
    return {{"min_ratio", number(t.min_ratio)},
            {"trend_slope", number(t.trend_slope)},
            {"grows", t.grows},
            {"points", std::move(points)}};
}

json envelope(const std::string& command, const json& config, const json& angle, const json& result) {
    return {{"schema", schema_version},
            {"tool_version", tool_version},
            {"command", command},
            {"config", config},
            {"angle", angle},
            {"result", result}};
}

std::string law_csv(const experiments::LawReport& r) {
    std::ostringstream out;
    out << "N,x_index,ratio,k,d\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.ratios.size(); ++i) {
            out << row.N << ',' << i << ',' << csv_double(row.ratios[i]) << ',' << row.k << ','
                << csv_double(row.d) << '\n';
        }
    }
    return out.str();
}

std::string oscillation_csv(const experiments::OscillationReport& r) {
    std::ostringstream out;
    out << "set,index,x,member,k,sum\n";
    auto emit = [&](const char* set, const std::vector<experiments::SetSample>& samples) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            const std::string x = exact(s.x).get<std::string>();
            for (std::size_t k = 0; k < s.sums.size(); ++k) {
                out << set << ',' << i << ',' << x << ',' << (s.member ? 1 : 0) << ',' << k << ','
                    << csv_double(s.sums[k]) << '\n';
            }
        }
    };
    emit("A", r.samples_A);
    emit("B", r.samples_B);
    return out.str();
}

std::string sum_csv(const trimsum::TrimmedSumResult& r) {
    std::ostringstream out;
    out << "rank,j,value\n";
    for (std::size_t i = 0; i < r.removed.size(); ++i)
        out << i + 1 << ',' << r.removed[i].j << ',' << csv_double(r.removed[i].value) << '\n';
    return out.str();
}

std::string qn_csv(const experiments::QnBoundSuite& s) {
    std::ostringstream out;
    out << "n,q_n,x_index,x,lhs,bound,pass\n";
    for (const auto& row : s.rows) {
        out << row.n << ',' << row.q_n.get_str() << ',' << row.x_index << ',' << exact(row.x).get<std::string>()
            << ',' << csv_double(row.lhs) << ',' << csv_double(row.bound) << ',' << (row.pass ? 1 : 0) << '\n';
    }
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace trimbirk::report
