#pragma once

// Invariant and acceptance suites. Each suite runs a fixed, seeded campaign
// and returns one line per check; `trimbirk verify` runs them at small sizes
// and the acceptance binary at full size.

#include <cstdint>
#include <string>
#include <vector>

#include "trimbirk/numeric.hpp"

namespace trimbirk::suites {

using u64 = std::uint64_t;

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckLine> checks;

    [[nodiscard]] bool pass() const;
    /// Adds a line and returns its verdict.
    bool add(std::string name, bool pass, std::string detail);
};

/// The ten angles of the identity suite, as angle specifications.
std::vector<std::string> identity_angles();

/// Remainder recursion, delta bounds and 2 q_{n+1} >= sum a_j q_j, exactly,
/// for n <= max_level.
SuiteReport identity_suite(std::size_t max_level = 30);

/// Ostrowski round trip, admissibility, top digit and the log sandwich for
/// `samples` random N per angle.
SuiteReport ostrowski_suite(u64 samples, u64 seed = 1);

/// |S^1_{q_n}(1/x) - q_n ln q_n| <= 7 q_n for golden, silver and e - 2.
SuiteReport qn_suite(const Integer& q_limit, u64 G, u64 budget);

/// Strong law trend for 1/x with k = 1 on the golden angle, N = 10^3..N_max.
SuiteReport strong_1x_suite(u64 G, u64 N_max);

/// beta = 2 law with k = ceil(ln N), the condition (III) certificate and the
/// brute-force oracle for the trimmed sum.
SuiteReport beta_suite(u64 G, u64 N_max, u64 oracle_instances);

/// Oscillation counterexample at q_n = 1009 with gamma = 1.
SuiteReport oscillation_suite(u64 samples);

/// Weak-law dichotomy: golden vs the Liouville angle of the l = 0 construction.
SuiteReport weak_dichotomy_suite(u64 G, u64 N_golden, u64 budget);

struct StructuralSizes {
    u64 sandwich_x = 50;
    u64 sandwich_N = 20;
    u64 N_max = 100000;
    u64 count_instances = 1000;
    u64 j1_instances = 10000;
    u64 fast_instances = 1000;
};

/// errlem sandwich, the digit bound, at most one point near 0 per q_n
/// window, the j1 implication, fast selection vs the heap, and the
/// generalized-scale point oscillation.
SuiteReport structural_suite(const StructuralSizes& sizes);

/// Names accepted by run_named: contfrac, ostrowski, bounds, law, oscillation,
/// structural, all.
std::vector<std::string> suite_names();
/// Small-size run for `trimbirk verify`. Throws ValidationError on an unknown name.
std::vector<SuiteReport> run_named(const std::string& name);

}  // namespace trimbirk::suites
