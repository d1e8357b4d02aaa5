//===-- errors.hpp - Error types shared across ir-forge ---------*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include <stdexcept>
#include <string>

namespace irforge {

enum class ErrorKind {
  Parse,           // malformed input text
  Validation,      // well-formed input violating a contract
  NotFound,        // named entity absent
  Corrupt,         // data present but structurally damaged
  Analysis,        // IR analysis failed (undefined label etc.)
  Tool,            // external tool ran and failed
  ToolUnavailable, // external tool not configured or not executable
  Io,              // filesystem failure
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

/// Parse failures carry the 1-based line of the offending input.
class ParseError : public Error {
public:
  ParseError(std::string message, std::size_t line)
      : Error(ErrorKind::Parse,
              "line " + std::to_string(line) + ": " + std::move(message)),
        line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

} // namespace irforge
