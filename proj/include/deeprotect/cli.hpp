#pragma once

#include <string>
#include <vector>

namespace deeprotect {

// Command-line entry point (subcommands: gen, train, perturb, eval, bench,
// budget, registry). Returns the process exit code: 0 on success, 2 for
// validation/usage errors, 1 for runtime errors. Library errors print as a
// single "ERROR <code>: <detail>" line on stderr.
int run_cli(int argc, const char* const* argv);

// Testing convenience: argv without the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace deeprotect
