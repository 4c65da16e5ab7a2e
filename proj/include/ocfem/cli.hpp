#pragma once

namespace ocfem {

// Entry point of the command-line tool; exposed for tests. Returns 0 on
// success, 1 on configuration or usage errors, 2 on numerical failures.
int cli_main(int argc, const char* const* argv);

}  // namespace ocfem
