#pragma once

#include <stdexcept>
#include <string>

namespace stmon {

// Base error for every failure the library raises on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Raised when a representation budget (region parts, enumeration paths) is exceeded.
struct BudgetError : Error {
  explicit BudgetError(const std::string &msg) : Error(msg) {}
};

// Raised by the formula parser with 1-based position information.
struct ParseError : Error {
  int line;
  int col;
  ParseError(const std::string &msg, int line_, int col_)
      : Error("parse error at " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
        line(line_), col(col_) {}
};

}  // namespace stmon
