#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace sdtl {

/// Raised by the parser. Carries a 1-based source position.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(int line, int column, const std::string& msg)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column),
        message_(msg) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

/// A run-time error of the concrete interpreter. The innermost syntax node
/// being evaluated when the error surfaced is attached on the way out.
class RuntimeError : public std::runtime_error {
 public:
  explicit RuntimeError(const std::string& msg) : std::runtime_error(msg), message_(msg) {}

  const std::string& message() const { return message_; }
  std::optional<std::uint32_t> node() const { return node_; }

  void tag(std::uint32_t node) {
    if (!node_) node_ = node;
  }

  std::string describe() const {
    if (!node_) return message_;
    return "node " + std::to_string(*node_) + ": " + message_;
  }

 private:
  std::string message_;
  std::optional<std::uint32_t> node_;
};

/// The concrete run used up its statement or call-depth budget. Kept apart
/// from ordinary run-time errors so harnesses can skip such runs.
class BudgetExceeded : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

/// Failure of the abstract fixed-point engines (iteration cap hit).
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lookup of an unregistered function sid: an internal bug, never a user error.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sdtl
