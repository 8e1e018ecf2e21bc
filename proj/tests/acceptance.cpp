// Acceptance runner: one PASS/FAIL line per criterion, followed by the
// individual checks. With an argument A1..A8 only that criterion runs.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "trimbirk/error.hpp"
#include "trimbirk/suites.hpp"

using namespace trimbirk;
using namespace trimbirk::suites;

namespace {

struct Criterion {
    const char* id;
    const char* title;
    std::function<std::vector<SuiteReport>()> run;
};

std::vector<Criterion> criteria() {
    return {
        {"A1", "exact identities on 10 angles, n <= 30", [] { return std::vector{identity_suite(30)}; }},
        {"A2", "Ostrowski codec on 10^4 N per angle", [] { return std::vector{ostrowski_suite(10000)}; }},
        {"A3", "|S^1_{q_n} - q_n ln q_n| <= 7 q_n, q_n <= 10^7, 100 x",
         [] { return std::vector{qn_suite(Integer(10000000), 100, 5'000'000'000ULL)}; }},
        {"A4", "strong law trend for 1/x, golden, k = 1", [] { return std::vector{strong_1x_suite(20, 1000000)}; }},
        {"A5", "beta = 2 strong law, k = ceil(ln N), and the brute-force oracle",
         [] { return std::vector{beta_suite(20, 1000000, 1000)}; }},
        {"A6", "oscillation counterexample at q_n = 1009", [] { return std::vector{oscillation_suite(200)}; }},
        {"A7", "weak-law dichotomy at eps = 1/4",
         [] { return std::vector{weak_dichotomy_suite(1000, 1000000, 2'000'000'000ULL)}; }},
        {"A8", "structural checkers", [] { return std::vector{structural_suite(StructuralSizes{})}; }},
    };
}

}  // namespace

int main(int argc, char** argv) {
    const std::string only = argc > 1 ? argv[1] : "";
    bool all_pass = true;
    bool matched = false;
    for (const auto& c : criteria()) {
        if (!only.empty() && only != c.id) continue;
        matched = true;
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<SuiteReport> reports;
        std::string error;
        try {
            reports = c.run();
        } catch (const Error& e) {
            error = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = error.empty();
        for (const auto& r : reports) pass = pass && r.pass();
        std::printf("%s %s  %s  (%.1f s)\n", c.id, pass ? "PASS" : "FAIL", c.title, secs);
        for (const auto& r : reports)
            for (const auto& line : r.checks)
                std::printf("    [%s] %s: %s\n", line.pass ? "ok" : "FAIL", line.name.c_str(), line.detail.c_str());
        if (!error.empty()) std::printf("    error: %s\n", error.c_str());
        std::fflush(stdout);
        all_pass = all_pass && pass;
    }
    if (!matched) {
        std::fprintf(stderr, "unknown criterion '%s' (A1..A8)\n", only.c_str());
        return 64;
    }
    return all_pass ? 0 : 1;
}
