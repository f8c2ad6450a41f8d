#ifndef FAMREL_ERROR_H_
#define FAMREL_ERROR_H_

#include <stdexcept>
#include <string>

namespace famrel {

// Input violates a cross-reference or schema rule (CLI exit code 1).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A line-oriented input (rule file, lexicon) failed to parse.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string &source, int line, const std::string &what)
      : ValidationError(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// File could not be read or written (CLI exit code 2).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace famrel

#endif  // FAMREL_ERROR_H_
