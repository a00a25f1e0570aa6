#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scpau {

enum class ErrorKind {
  invalid_position,
  syntax_error,
  arity_mismatch,
  unknown_symbol,
  vp_self_loop,
  duplicate_entry,
  invalid_signature,
  invalid_theory,
  unsafe_theory,
  disjointness_violation,
  invalid_tagging,
  partition_invalid,
  resource_limit,
  no_composition,
  timeout,
  io_error,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_position: return "invalid-position";
    case ErrorKind::syntax_error: return "syntax-error";
    case ErrorKind::arity_mismatch: return "arity-mismatch";
    case ErrorKind::unknown_symbol: return "unknown-symbol";
    case ErrorKind::vp_self_loop: return "vp-self-loop";
    case ErrorKind::duplicate_entry: return "duplicate-entry";
    case ErrorKind::invalid_signature: return "invalid-signature";
    case ErrorKind::invalid_theory: return "invalid-theory";
    case ErrorKind::unsafe_theory: return "unsafe-theory";
    case ErrorKind::disjointness_violation: return "disjointness-violation";
    case ErrorKind::invalid_tagging: return "invalid-tagging";
    case ErrorKind::partition_invalid: return "partition-invalid";
    case ErrorKind::resource_limit: return "resource-limit";
    case ErrorKind::no_composition: return "no-composition";
    case ErrorKind::timeout: return "timeout";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Byte range [start, end) into a parsed input.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, SourceSpan span, const std::string& what)
      : Error(kind, what + " at offset " + std::to_string(span.start)), span_(span) {}

  SourceSpan span() const noexcept { return span_; }

 private:
  SourceSpan span_;
};

}  // namespace scpau
