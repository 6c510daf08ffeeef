#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wot {

enum class ErrorCode {
  InvalidArgument,
  Length,
  InvalidCharacter,
  ZeroAmount,
  InsufficientBalance,
  BadSignature,
  Mislinked,
  Malformed,
  Oversize,
  Duplicate,
  Authentication,
  InvalidProof,
  SignerMismatch,
  Config,
  Parse,
  Io,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries a code; `position` is set for
// errors that point into textual or binary input (hex index, CSV line, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::size_t position = npos)
      : std::runtime_error(what), code_(code), position_(position) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t position() const noexcept { return position_; }
  bool has_position() const noexcept { return position_ != npos; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  ErrorCode code_;
  std::size_t position_;
};

}  // namespace wot
