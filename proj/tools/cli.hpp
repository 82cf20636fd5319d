#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace namecalc {

/// Runs the command line `args` (without the program name). Returns the
/// process exit code: 0 ok, 1 usage or document error, 2 evaluation errors,
/// 3 lint errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace namecalc
