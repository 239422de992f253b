#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hetviz {

enum class ErrorCode {
  Parse,            // malformed CSV / JSON / scheme document
  Schema,           // dataset or scheme invariant violated
  TypeViolation,    // operation not permitted for the measurement type
  UnknownValue,     // value with no code, absent from an order, unmapped color
  UnknownAttribute,
  InvalidArgument,
  NotFound,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Engine error. Every failure raised by the library carries one code so the
/// service layer can map it onto a single API error.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message, std::string attribute = {},
        std::string value = {})
      : std::runtime_error(message), code_(code), attribute_(std::move(attribute)),
        value_(std::move(value)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& attribute() const noexcept { return attribute_; }
  const std::string& value() const noexcept { return value_; }

private:
  ErrorCode code_;
  std::string attribute_;
  std::string value_;
};

} // namespace hetviz
