#pragma once

#include <stdexcept>
#include <string>

namespace dmpfem {

enum class ErrorKind {
  InvalidArgument,
  Computation,
  Mesh,
  DegenerateCoefficient,
  Internal,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` lets callers map faults to
/// exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Computation: return "computation fault";
    case ErrorKind::Mesh: return "mesh fault";
    case ErrorKind::DegenerateCoefficient: return "degenerate coefficient";
    case ErrorKind::Internal: return "internal fault";
    case ErrorKind::Io: return "i/o fault";
  }
  return "unknown";
}

}  // namespace dmpfem
