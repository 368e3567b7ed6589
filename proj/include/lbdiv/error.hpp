#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lbdiv {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two inputs that must agree in length (or shape) do not.
class DimensionError : public Error {
 public:
  DimensionError(const std::string& what, std::size_t expected, std::size_t got)
      : Error(what + ": expected length " + std::to_string(expected) + ", got " +
              std::to_string(got)),
        expected_(expected),
        got_(got) {}
  explicit DimensionError(const std::string& what) : Error(what) {}

  std::size_t expected() const { return expected_; }
  std::size_t got() const { return got_; }

 private:
  std::size_t expected_ = 0;
  std::size_t got_ = 0;
};

// An argument violates a documented precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An exhaustive computation would exceed its configured size limit.
class LimitError : public Error {
 public:
  using Error::Error;
};

// TieRule::Reject met equal entries. Items are 1-based.
class TieError : public Error {
 public:
  explicit TieError(std::vector<std::size_t> items)
      : Error(describe(items)), items_(std::move(items)) {}

  const std::vector<std::size_t>& tied_items() const { return items_; }

 private:
  static std::string describe(const std::vector<std::size_t>& items) {
    std::string s = "tied scores at items {";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(items[i]);
    }
    return s + "}";
  }
  std::vector<std::size_t> items_;
};

// Malformed textual input. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(decorate(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string decorate(const std::string& what, std::size_t line,
                              std::size_t column) {
    if (line == 0) return what;
    std::string s = "line " + std::to_string(line);
    if (column) s += ", column " + std::to_string(column);
    return s + ": " + what;
  }
  std::size_t line_;
  std::size_t column_;
};

}  // namespace lbdiv
