#pragma once

#include <stdexcept>
#include <string>

namespace plasmon {

/// Failure categories. Each maps to one process exit code of the CLI.
enum class ErrorKind {
  Input,      // malformed or invalid user input (exit 1)
  Io,         // file system failure (exit 2)
  Numerical,  // solver failure (exit 3)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  int exit_code() const noexcept {
    switch (kind_) {
      case ErrorKind::Input: return 1;
      case ErrorKind::Io: return 2;
      case ErrorKind::Numerical: return 3;
    }
    return 1;
  }

 private:
  ErrorKind kind_;
};

/// Reasons a surface mesh can be rejected.
enum class MeshErrorCode {
  Parse,
  NonManifold,
  OpenBoundary,
  InconsistentOrientation,
  Degenerate,
  OutOfRange,
};

class MeshError : public Error {
 public:
  MeshError(MeshErrorCode code, const std::string& what)
      : Error(ErrorKind::Input, what), code_(code) {}

  MeshErrorCode code() const noexcept { return code_; }

 private:
  MeshErrorCode code_;
};

class ParseError : public MeshError {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : MeshError(MeshErrorCode::Parse,
                  "parse error at line " + std::to_string(line) + ": " + msg),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace plasmon
