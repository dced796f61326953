#include "fdaer/error.hpp"

namespace fdaer {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Format: return "format";
    case ErrorKind::UnsupportedCodec: return "unsupported-codec";
    case ErrorKind::EmptySignal: return "empty-signal";
    case ErrorKind::TooShort: return "too-short";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::DegenerateSignal: return "degenerate-signal";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::InsufficientClasses: return "insufficient-classes";
    case ErrorKind::EmptyManifest: return "empty-manifest";
    case ErrorKind::Duplicate: return "duplicate";
    case ErrorKind::Protocol: return "protocol";
    case ErrorKind::Model: return "model";
    case ErrorKind::Io: return "io";
    case ErrorKind::Empty: return "empty";
  }
  return "unknown";
}

}  // namespace fdaer
