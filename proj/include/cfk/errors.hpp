#pragma once

#include <stdexcept>
#include <string>

namespace cfk {

// Error taxonomy. Domain errors are things a caller can provoke with bad
// input; InternalError means an invariant the algorithms rely on was broken
// and indicates a bug upstream.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DivisionByZero : DomainError {
  DivisionByZero() : DomainError("division by zero in F_p") {}
};

struct ParityError : DomainError {
  explicit ParityError(const std::string& msg) : DomainError(msg) {}
};

struct NotZGradable : DomainError {
  explicit NotZGradable(const std::string& msg) : DomainError(msg) {}
};

struct NotChainMap : DomainError {
  explicit NotChainMap(const std::string& msg) : DomainError(msg) {}
};

struct BadFlip : DomainError {
  explicit BadFlip(const std::string& msg) : DomainError(msg) {}
};

struct TruncationError : DomainError {
  explicit TruncationError(const std::string& msg) : DomainError(msg) {}
};

struct Corrupt : DomainError {
  explicit Corrupt(const std::string& msg) : DomainError(msg) {}
};

struct AdmissibilityBudgetExceeded : DomainError {
  explicit AdmissibilityBudgetExceeded(const std::string& msg) : DomainError(msg) {}
};

struct ParseError : DomainError {
  explicit ParseError(const std::string& msg) : DomainError(msg) {}
};

struct InternalError : std::logic_error {
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace cfk
