#ifndef PREFIA_ERROR_HPP
#define PREFIA_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prefia {

enum class ErrorCode {
  InvalidArgument,
  ConflictingJudgment,
  TieInStrictMode,
  NoCompleteTriples,
  NotComplete,
  NotTransitive,
  DuplicateItems,
  TooFewItems,
  PairAlreadyDetermined,
  UnknownPair,
  SessionNotDone,
  ParseError,
  UnknownRelationSymbol,
  SelfPair,
};

const char* to_string(ErrorCode code);

// Input-level failure. Carries a machine-readable code; `line` is set for
// errors raised while reading a file (1-based, 0 when not applicable).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), code_(code), line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::size_t line_;
};

// An internal invariant did not hold. Never caused by bad input; the CLI
// maps it to exit code 2.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace prefia

#endif  // PREFIA_ERROR_HPP
