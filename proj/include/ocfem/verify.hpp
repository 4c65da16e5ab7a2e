#pragma once

#include <iosfwd>

#include "ocfem/config.hpp"

namespace ocfem {

// Runs the library's property suite at desk scale, printing one line per
// check. Returns true when every check passes.
bool run_verify(const StudyConfig& cfg, std::ostream& out);

}  // namespace ocfem
