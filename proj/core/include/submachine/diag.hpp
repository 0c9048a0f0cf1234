#pragma once

#include <stdexcept>
#include <string>

namespace submachine {

// Error thrown by the text-format front ends (class tables, machines,
// grammars, simper sources).  Carries a 1-based source position; the
// what() string already includes it.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int col)
      : std::runtime_error("line " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + message),
        line_(line),
        col_(col) {}

  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }

 private:
  int line_;
  int col_;
};

// One validation finding: the subject is a rendered rule, class, state or
// variable name; the message says what is wrong with it.
struct Diagnostic {
  std::string subject;
  std::string message;
};

}  // namespace submachine
