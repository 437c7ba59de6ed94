#pragma once

// Command-line front end: run, compare, study and bounds subcommands.

#include <iosfwd>

namespace rssvrg::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 bad flags or configuration.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rssvrg::cli
