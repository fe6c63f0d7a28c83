#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

namespace lacuna {

enum class ErrorCode {
  InvalidInput,
  Unsupported,
  WrongVariant,
  DanglingReference,
  VerificationFailed,
  LimitExceeded,
  NonConvergence,
};

const char* error_code_name(ErrorCode code);

// CLI exit status for an error category: 1 malformed input, 2 verification
// failure, 3 guard or limit, 4 nonconvergence.
int exit_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, nlohmann::json detail = {});

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& detail() const noexcept { return detail_; }
  nlohmann::json to_json() const;

 private:
  ErrorCode code_;
  nlohmann::json detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message, nlohmann::json detail = {});

}  // namespace lacuna
