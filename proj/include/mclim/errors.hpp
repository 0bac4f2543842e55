#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mclim {

// Syntax or dimension problem in a model file. Line and token are 1-based;
// zero means "not tied to a position".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t token, const std::string& what)
      : std::runtime_error(locate(line, token) + what), line_(line), token_(token) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t token() const noexcept { return token_; }

 private:
  static std::string locate(std::size_t line, std::size_t token) {
    if (line == 0) return {};
    std::string s = "line " + std::to_string(line);
    if (token != 0) s += ", token " + std::to_string(token);
    return s + ": ";
  }

  std::size_t line_;
  std::size_t token_;
};

// A model that parsed but breaks a chain invariant (diagonal, row sums, ...).
class ModelError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Row maximum attained in more than one column.
class TieError : public std::runtime_error {
 public:
  TieError(std::size_t row, const std::string& what) : std::runtime_error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class UnknownStateError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class StateSetMismatch : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Embedded chain is not strongly connected.
class ReducibleChainError : public std::runtime_error {
 public:
  ReducibleChainError(std::size_t from, std::size_t to, const std::string& what)
      : std::runtime_error(what), from_(from), to_(to) {}
  std::size_t from() const noexcept { return from_; }
  std::size_t to() const noexcept { return to_; }

 private:
  std::size_t from_;
  std::size_t to_;
};

// Stationary entry rate into one side of a partition is zero.
class NonAlternatingError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mclim
