#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cbc::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kDeadlock = 2;
inline constexpr int kAssignmentDeadlock = 3;
inline constexpr int kCapacityExceeded = 4;
inline constexpr int kPropertyViolation = 5;

struct Options {
    /// Flips the engine's feasibility verdict inside `verify`; only the
    /// fault-injection build sets this.
    bool invert_engine_feasibility = false;
};

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Options& options = {});

}  // namespace cbc::cli
