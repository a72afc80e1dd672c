#pragma once

#include <stdexcept>
#include <string>

namespace bhm {

enum class ErrorKind {
  Parameter,   // invalid constructor arguments
  Admissibility,
  Resolution,
  Shape,
  Config,
  State,
  Numeric,
  Data,
  Window,
  Domain,
};

/// Base error for the library. The kind selects the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Admissibility: return "admissibility";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Config: return "config";
    case ErrorKind::State: return "state";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Data: return "data";
    case ErrorKind::Window: return "window";
    case ErrorKind::Domain: return "domain";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace bhm
