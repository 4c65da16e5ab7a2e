#pragma once

#include <stdexcept>
#include <string>

namespace ocfem {

// Invalid input data: bad mesh, bad problem parameters, bad config.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical procedure failed to reach its advertised tolerance.
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ocfem
