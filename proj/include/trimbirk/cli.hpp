#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace trimbirk::cli {

/// Exit statuses of the command-line tool.
enum Exit : int {
    ok = 0,
    check_failed = 1,  // a verify suite failed or a replay differs
    invalid = 2,       // validation, precondition, domain, range, length, construction
    over_budget = 3,
    usage = 64,
    io_failure = 74,
};

/// Runs one invocation. `args` excludes the program name. `env_budget` is the
/// value of TRIMBIRK_BUDGET, when set.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::optional<std::string>& env_budget);

/// Entry point for main(): reads the environment and uses std::cout/std::cerr.
int run_cli(int argc, char** argv);

}  // namespace trimbirk::cli
