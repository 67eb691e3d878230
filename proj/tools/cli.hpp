#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace strn {

// Runs the command-line interface on already-split arguments (no program
// name). Returns the process exit code: for `solve`, the termination code
// 0-6; for every other subcommand 0 on success; 64 for usage errors and 65
// for data or parse errors throughout.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace strn
