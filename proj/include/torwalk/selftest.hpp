#pragma once
// Reduced-size invariant suites behind the `selftest` subcommand.

#include <iosfwd>

namespace torwalk {

/// Runs every suite, printing one line per check group; returns the number
/// of failed checks (0 = pass).
int run_selftest(std::ostream& out);

}  // namespace torwalk
