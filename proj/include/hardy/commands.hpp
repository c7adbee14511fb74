#pragma once

// Command dispatch for the command-line tool. Every command writes its CSV
// files, summary.txt and manifest.txt into the output directory.

#include <iosfwd>
#include <string>
#include <vector>

#include "hardy/config.hpp"

namespace hardy {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;       // an inequality or identity fails beyond tolerance
inline constexpr int kExitUsage = 2;         // invalid input or unwritable output
inline constexpr int kExitNonConvergence = 3;

/// One line of summary.txt.
struct ResultRow {
    std::string id;       // e.g. "nct1", "identity_I416", "infimum_zero"
    std::string subject;  // test function, weight or parameter the row refers to
    bool pass = true;
    std::string detail;
};

/// Equation tag printed next to a result id, or "-" for ids without one.
std::string equation_tag(const std::string& id);

/// Runs cfg.command and returns the exit code. Messages go to `out` and `err`.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Combines exit codes: usage errors dominate, then non-convergence, then failures.
int combine_exit_codes(int a, int b);

}  // namespace hardy
