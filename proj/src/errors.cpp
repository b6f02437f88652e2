#include "medchain/errors.hpp"

namespace medchain {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse: return "ParseError";
    case ErrorCode::validation: return "ValidationError";
    case ErrorCode::illegal_action: return "IllegalAction";
    case ErrorCode::terminal_state: return "TerminalState";
    case ErrorCode::no_feasible_chain: return "NoFeasibleChain";
    case ErrorCode::undefined_bearing: return "UndefinedBearing";
    case ErrorCode::no_session: return "NoSession";
    case ErrorCode::unknown_request: return "UnknownRequest";
    case ErrorCode::infeasible: return "Infeasible";
    case ErrorCode::stale_fix: return "StaleFix";
    case ErrorCode::unknown_entity: return "UnknownEntity";
    case ErrorCode::io: return "IoError";
  }
  return "Error";
}

}  // namespace medchain
