#pragma once

#include <stdexcept>
#include <string>

namespace iflow {

enum class ErrorKind {
  Validation,
  Parse,
  Schema,
  Storage,
  NotFound,
  UnknownInstance,
  InvalidTransition,
  InvalidWeights,
  InvalidRegex,
  UnknownAttribute,
  InvalidArgument,
};

const char* to_string(ErrorKind kind) noexcept;

// Base for every error raised by the engine. `detail` carries a location
// (document path, line, parameter name) when one is known.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string detail = {})
      : std::runtime_error(message), kind_(kind), detail_(std::move(detail)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

#define IFLOW_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& message, std::string detail = {})  \
        : Error(ErrorKind::Kind, message, std::move(detail)) {}          \
  };

IFLOW_DEFINE_ERROR(ValidationError, Validation)
IFLOW_DEFINE_ERROR(ParseError, Parse)
IFLOW_DEFINE_ERROR(SchemaError, Schema)
IFLOW_DEFINE_ERROR(StorageError, Storage)
IFLOW_DEFINE_ERROR(NotFound, NotFound)
IFLOW_DEFINE_ERROR(UnknownInstance, UnknownInstance)
IFLOW_DEFINE_ERROR(InvalidTransition, InvalidTransition)
IFLOW_DEFINE_ERROR(InvalidWeights, InvalidWeights)
IFLOW_DEFINE_ERROR(InvalidRegex, InvalidRegex)
IFLOW_DEFINE_ERROR(UnknownAttribute, UnknownAttribute)
IFLOW_DEFINE_ERROR(InvalidArgument, InvalidArgument)

#undef IFLOW_DEFINE_ERROR

}  // namespace iflow
