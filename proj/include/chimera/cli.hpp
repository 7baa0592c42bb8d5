#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chimera {

/// Command-line entry point: generate, fit, detect, predict, evaluate, tune and
/// bench. `args` excludes the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chimera
