#include "lacuna/errors.hpp"

namespace lacuna {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::Unsupported: return "unsupported-operation";
    case ErrorCode::WrongVariant: return "wrong-variant";
    case ErrorCode::DanglingReference: return "dangling-reference";
    case ErrorCode::VerificationFailed: return "verification-failed";
    case ErrorCode::LimitExceeded: return "limit-exceeded";
    case ErrorCode::NonConvergence: return "nonconvergence";
  }
  return "unknown";
}

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::VerificationFailed: return 2;
    case ErrorCode::LimitExceeded: return 3;
    case ErrorCode::NonConvergence: return 4;
    default: return 1;
  }
}

Error::Error(ErrorCode code, const std::string& message, nlohmann::json detail)
    : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

nlohmann::json Error::to_json() const {
  nlohmann::json j;
  j["error"] = error_code_name(code_);
  j["message"] = what();
  if (!detail_.is_null()) j["detail"] = detail_;
  return j;
}

void fail(ErrorCode code, const std::string& message, nlohmann::json detail) {
  throw Error(code, message, std::move(detail));
}

}  // namespace lacuna
