#pragma once

namespace hypgrid {

/**
 * Entry point of the command-line tool.  Returns the process exit code:
 * 0 on success, 1 on usage errors (with a synopsis on the error stream),
 * 2 on runtime errors.
 */
int run_cli(int argc, const char* const* argv);

}  // namespace hypgrid
