#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fdaer {

enum class ErrorKind {
  Format,
  UnsupportedCodec,
  EmptySignal,
  TooShort,
  Parameter,
  Shape,
  DegenerateSignal,
  InsufficientData,
  InsufficientClasses,
  EmptyManifest,
  Duplicate,
  Protocol,
  Model,
  Io,
  Empty,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. The kind decides the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fdaer
