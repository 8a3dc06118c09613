#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace grapes {

// All failures surface as an Error with a stable machine-readable code
// ("input", "shape", "parse", "config", "contract", "io") plus a human
// message. The CLI turns these into structured error records.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

inline Error input_error(const std::string& msg) { return Error("input", msg); }
inline Error shape_error(const std::string& msg) { return Error("shape", msg); }
inline Error parse_error(const std::string& msg) { return Error("parse", msg); }
inline Error config_error(const std::string& msg) { return Error("config", msg); }
inline Error contract_error(const std::string& msg) { return Error("contract", msg); }
inline Error io_error(const std::string& msg) { return Error("io", msg); }

}  // namespace grapes
