#pragma once

#include <string>
#include <vector>

namespace gsim {

/// Parse and execute a command line (without the program name).
/// Returns the process exit code: 0 on success, 1 for bad input or
/// malformed configuration, 2 when a numerical sanity guard rejects the
/// requested computation, 3 for filesystem and archive failures.
int run_cli(std::vector<std::string> args);

} // namespace gsim
