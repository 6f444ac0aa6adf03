#ifndef TRAJREC_ERROR_HPP_
#define TRAJREC_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trajrec {

// Invalid arguments or malformed in-memory inputs.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed text input; carries the 1-based line number.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Data that is well formed but violates the attack's dataset requirements.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trajrec

#endif  // TRAJREC_ERROR_HPP_
