#pragma once

#include <stdexcept>
#include <string>

namespace scriptorium {

enum class ErrorKind {
  Io,                 // file missing, unreadable or unwritable
  UnsupportedFormat,  // readable file in a format we do not decode
  InvalidArgument,    // caller-supplied value outside its contract
  EmptyInput,
  Degenerate,         // geometrically degenerate input (zero-length cycle, ...)
  OutOfBounds,
  NotThin,
  InfeasibleLabel,
  Diverged,
  DimensionMismatch,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace scriptorium
