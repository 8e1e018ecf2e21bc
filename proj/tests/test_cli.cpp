#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trimbirk/cli.hpp"

using trimbirk::cli::run;
using json = nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result call(std::vector<std::string> args, std::optional<std::string> env = std::nullopt) {
    std::ostringstream out, err;
    const int code = run(args, out, err, env);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "trimbirk_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

const std::vector<std::string> law_args = {"law",    "--kind", "strong", "--alpha",   "surd:(-1+1*sqrt(5))/2",
                                           "--obs",  "pow:beta=1,c1=1,c2=0", "--k", "const:1",
                                           "--grid", "1e3:1e5:log",          "--samples", "20"};

}  // namespace

TEST_CASE("missing --alpha is a validation error") {
    const auto r = call({"law", "--kind", "strong", "--grid", "1000"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--alpha") != std::string::npos);
    CHECK(r.out.empty());
    CHECK(call({"sum", "--N", "10"}).code == 2);
}

TEST_CASE("usage errors exit 64") {
    CHECK(call({"law", "--alpha", "golden", "--bogus", "1"}).code == 64);
    CHECK(call({"frobnicate"}).code == 64);
    CHECK(call({}).code == 64);
    CHECK(call({"verify"}).code == 64);
    CHECK(call({"--help"}).code == 0);
}

TEST_CASE("law run end to end") {
    const auto r = call(law_args);
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["schema"] == "trimbirk-report/1");
    CHECK(doc["command"] == "law");
    CHECK(doc["angle"]["fingerprint"].get<std::string>().size() == 16);
    CHECK(doc["config"]["budget"] == 500000000);
    const auto& rows = doc["result"]["rows"];
    REQUIRE(rows.size() == 3);
    CHECK(rows[0]["N"] == 1000);
    CHECK(rows[2]["N"] == 100000);
    for (const auto& row : rows) CHECK(row["ratios"].size() == 20);
    CHECK(rows[2]["max_deviation"].get<double>() < rows[0]["max_deviation"].get<double>());
    CHECK(doc["result"]["design"]["offset"] == "1/2");
}

TEST_CASE("replay reproduces the report byte for byte") {
    const auto path = scratch("law.json");
    auto args = law_args;
    args.insert(args.end(), {"--out", path.string()});
    REQUIRE(call(args).code == 0);
    const auto original = slurp(path);
    CHECK(original == call(law_args).out);

    const auto r = call({"replay", path.string(), "--check"});
    CHECK(r.code == 0);
    CHECK(r.out.find("identical") != std::string::npos);
    CHECK(call({"replay", path.string()}).out == original);

    // replay ignores the environment: the echo carries the resolved budget
    CHECK(call({"replay", path.string(), "--check"}, std::string("10")).code == 0);

    auto doc = json::parse(original);
    doc["result"]["rows"][0]["ratios"][0] = 0.5;
    const auto tampered = scratch("tampered.json");
    std::ofstream(tampered) << doc.dump(2) << "\n";
    CHECK(call({"replay", tampered.string(), "--check"}).code == 1);

    // flags survive the echo
    const auto orbit_path = scratch("orbit.json");
    REQUIRE(call({"orbit", "--alpha", "golden", "--x", "auto:2/7", "--N", "500", "--k", "4", "--fast", "--out",
                  orbit_path.string()})
                .code == 0);
    CHECK(call({"replay", orbit_path.string(), "--check"}).code == 0);

    const auto junk = scratch("junk.json");
    std::ofstream(junk) << "not json";
    CHECK(call({"replay", junk.string()}).code == 2);
    CHECK(call({"replay", scratch("absent.json").string()}).code == 74);
}

TEST_CASE("CSV exports") {
    auto args = law_args;
    args.insert(args.end(), {"--format", "csv"});
    const auto law = call(args);
    REQUIRE(law.code == 0);
    CHECK(law.out.rfind("N,x_index,ratio,k,d\n", 0) == 0);
    CHECK(count_lines(law.out) == 1 + 3 * 20);

    const auto orbit =
        call({"orbit", "--alpha", "golden", "--x", "0", "--N", "5", "--k", "1", "--format", "csv"});
    REQUIRE(orbit.code == 0);
    // golden orbit of 0: the smallest positive point among j < 5 is j = 2
    CHECK(orbit.out.rfind("j,numerator,denominator,signed\n2,", 0) == 0);

    const auto cfe = call({"cfe", "--alpha", "rational:5/7", "--format", "csv"});
    REQUIRE(cfe.code == 0);
    CHECK(cfe.out == "n,a_n,p_n,q_n,delta_n(num),delta_n(den)\n1,1,0,1,1,1\n2,2,1,1,5,7\n3,2,2,3,2,7\n");

    const auto osc = call({"oscillate", "--kind", "beta", "--alpha", "golden", "--n", "5", "--format", "csv"});
    CHECK(osc.code == 2);
}

TEST_CASE("sum report schema and trimming endpoints") {
    const auto r = call({"sum", "--alpha", "golden", "--x", "1/3", "--N", "1000", "--k", "3"});
    REQUIRE(r.code == 0);
    const auto res = json::parse(r.out)["result"];
    for (const char* key : {"N", "k", "total", "trimmed", "removed", "residual"}) CHECK(res.contains(key));
    CHECK(res["removed"].size() == 3);
    double removed = 0;
    for (const auto& t : res["removed"]) removed += t["value"].get<double>();
    CHECK(res["total"].get<double>() - res["trimmed"].get<double>() == doctest::Approx(removed).epsilon(1e-12));

    const auto all = json::parse(call({"sum", "--alpha", "golden", "--x", "1/3", "--N", "50", "--k", "50"}).out);
    CHECK(all["result"]["trimmed"] == 0.0);

    const auto rule = json::parse(call({"sum", "--alpha", "golden", "--x", "1/3", "--N", "10000", "--k", "log"}).out);
    CHECK(rule["result"]["k"] == 10);  // ceil(ln 10^4) = 10

    CHECK(call({"sum", "--alpha", "golden", "--x", "3/2", "--N", "10"}).code == 2);
    CHECK(call({"sum", "--alpha", "rational:2/5", "--x", "0", "--N", "6"}).code == 2);  // beyond the period
}

TEST_CASE("budget precedence: flag over environment over config") {
    const auto ini = scratch("run.ini");
    std::ofstream(ini) << "[angle]\nspec = golden\n[trimming]\nrule = const:1\n[grid]\ngrid = 1000,10000\nsamples = 5\n"
                          "[budget]\nmax = 1000\n";
    const std::vector<std::string> base = {"law", "--config", ini.string()};
    CHECK(call(base).code == 3);
    const auto env = call(base, std::string("100000"));
    REQUIRE(env.code == 0);
    CHECK(json::parse(env.out)["config"]["budget"] == 100000);
    auto flagged = base;
    flagged.insert(flagged.end(), {"--budget", "200000"});
    const auto f = call(flagged, std::string("10"));
    REQUIRE(f.code == 0);
    CHECK(json::parse(f.out)["config"]["budget"] == 200000);
    CHECK(call(base, std::string("lots")).code == 2);

    const auto bad = scratch("bad.ini");
    std::ofstream(bad) << "[angle]\nshape = round\n";
    CHECK(call({"law", "--config", bad.string()}).code == 2);
    CHECK(call({"law", "--config", scratch("missing.ini").string()}).code == 74);
}

TEST_CASE("output and input errors") {
    CHECK(call({"sum", "--alpha", "golden", "--N", "10", "--out", "/nonexistent-dir/r.json"}).code == 74);
    CHECK(call({"law", "--alpha", "golden", "--grid", "100:10:log"}).code == 2);
    CHECK(call({"law", "--alpha", "golden", "--grid", "10,5"}).code == 2);
    CHECK(call({"law", "--alpha", "golden", "--kind", "medium"}).code == 2);
    CHECK(call({"cfe", "--alpha", "digits:[1,0,2]"}).code == 2);
    CHECK(call({"oscillate", "--alpha", "rule:seq1x(l=zero)", "--n", "5"}).code == 2);
}

TEST_CASE("verify suites") {
    const auto r = call({"verify", "contfrac"});
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 11);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(call({"verify", "ostrowski"}).code == 0);
    CHECK(call({"verify", "nonsense"}).code == 2);
}

TEST_CASE("diophantine and ostrowski reports") {
    const auto d = call({"diophantine", "--alpha", "golden", "--depth", "25", "--k", "log"});
    REQUIRE(d.code == 0);
    const auto doc = json::parse(d.out);
    CHECK(doc["result"]["profile"]["bounded_on_prefix"] == true);
    CHECK(doc["result"]["condition_III"]["grows"] == true);

    const auto o = call({"ostrowski", "--alpha", "silver", "--N", "11"});
    REQUIRE(o.code == 0);
    const auto res = json::parse(o.out)["result"];
    CHECK(res["digits"] == json::array({"1", "0", "2"}));
    CHECK(res["value"] == "11");
}
