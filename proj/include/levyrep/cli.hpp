#pragma once

#include <iosfwd>

namespace levyrep {

/// Exit codes: 0 every requested check passed, 1 some check failed,
/// 2 usage, config or computation error.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

const char* version();

}  // namespace levyrep
