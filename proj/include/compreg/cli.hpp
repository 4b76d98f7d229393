#pragma once

#include <string>
#include <vector>

namespace compreg {

/// Full command-line entry point (parse, dispatch, error-to-exit-code
/// mapping). Returns the process exit code; library errors map to their
/// family's code, CLI usage errors to the invalid_argument code.
int cli_run(int argc, const char* const* argv);

/// Convenience overload for in-process tests; args excludes argv[0].
int cli_run(const std::vector<std::string>& args);

}  // namespace compreg
