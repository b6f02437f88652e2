#pragma once

#include <stdexcept>
#include <string>

namespace medchain {

enum class ErrorCode {
  parse,
  validation,
  illegal_action,
  terminal_state,
  no_feasible_chain,
  undefined_bearing,
  no_session,
  unknown_request,
  infeasible,
  stale_fix,
  unknown_entity,
  io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message) : Error(ErrorCode::parse, message) {}
};

// Carries the JSON-style path of the offending field, e.g. "watercraft[0].helipad".
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(ErrorCode::validation, field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

#define MEDCHAIN_SIMPLE_ERROR(Name, Code)                                   \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& message) : Error(Code, message) {}     \
  };

MEDCHAIN_SIMPLE_ERROR(IllegalAction, ErrorCode::illegal_action)
MEDCHAIN_SIMPLE_ERROR(TerminalState, ErrorCode::terminal_state)
MEDCHAIN_SIMPLE_ERROR(NoFeasibleChain, ErrorCode::no_feasible_chain)
MEDCHAIN_SIMPLE_ERROR(UndefinedBearing, ErrorCode::undefined_bearing)
MEDCHAIN_SIMPLE_ERROR(NoSession, ErrorCode::no_session)
MEDCHAIN_SIMPLE_ERROR(UnknownRequest, ErrorCode::unknown_request)
MEDCHAIN_SIMPLE_ERROR(Infeasible, ErrorCode::infeasible)
MEDCHAIN_SIMPLE_ERROR(StaleFix, ErrorCode::stale_fix)
MEDCHAIN_SIMPLE_ERROR(UnknownEntity, ErrorCode::unknown_entity)
MEDCHAIN_SIMPLE_ERROR(IoError, ErrorCode::io)

#undef MEDCHAIN_SIMPLE_ERROR

}  // namespace medchain
