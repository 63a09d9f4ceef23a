#ifndef RLFI_ERRORS_HPP_
#define RLFI_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace rlfi {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document. `line` is 1-based for syntax errors and 0 for
// schema errors, whose message carries the offending JSON path instead.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line),
        message_(message) {}

  int line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  std::string message_;
};

class SteppedTerminal : public Error {
 public:
  explicit SteppedTerminal(int state)
      : Error("step called in terminal state " + std::to_string(state)),
        state_(state) {}
  int state() const { return state_; }

 private:
  int state_;
};

class InvalidAction : public Error {
 public:
  InvalidAction(int action, int num_actions)
      : Error("action " + std::to_string(action) + " outside [0, " +
              std::to_string(num_actions) + ")") {}
};

class MissingLearningRate : public Error {
 public:
  explicit MissingLearningRate(double lr)
      : Error("learning rate " + std::to_string(lr) + " not present in sweep") {}
};

class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : Error("length mismatch: " + std::to_string(a) + " vs " +
              std::to_string(b)) {}
};

class LandingMismatch : public Error {
 public:
  LandingMismatch(int state, int action, int landing)
      : Error("landing state " + std::to_string(landing) +
              " is not reachable from state " + std::to_string(state) +
              " under action " + std::to_string(action)) {}
};

class UnboundPlaceholder : public Error {
 public:
  explicit UnboundPlaceholder(const std::string& name)
      : Error("placeholder {" + name + "} has no value in the command context"),
        name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class DuplicateRecord : public Error {
 public:
  using Error::Error;
};

class RunnerFailure : public Error {
 public:
  RunnerFailure(std::size_t step, int status)
      : Error("step " + std::to_string(step) + " exited with status " +
              std::to_string(status)),
        step_(step),
        status_(status) {}
  std::size_t step() const { return step_; }
  int status() const { return status_; }

 private:
  std::size_t step_;
  int status_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rlfi

#endif  // RLFI_ERRORS_HPP_
