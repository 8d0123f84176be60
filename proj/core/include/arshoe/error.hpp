#pragma once

#include <stdexcept>
#include <string>

namespace arshoe {

enum class Errc {
  invalid_rotation,
  behind_camera,
  invalid_argument,
  invalid_geometry,
  undefined_direction,
  insufficient_data,
  non_convergence,
  invalid_depth,
  no_matches,
  degenerate_blend,
  topology,
  missing_opening,
  degenerate_geometry,
  format,
  config,
};

const char* to_string(Errc code) noexcept;

// Base class for every failure raised by the library. The code lets callers
// (notably the CLI) map failures to exit statuses without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace arshoe
