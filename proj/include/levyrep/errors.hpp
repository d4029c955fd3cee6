#pragma once

#include <stdexcept>
#include <string>

namespace levyrep {

// Base of every error raised by the library. The CLI maps these onto a
// structured error message and a nonzero exit status.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "Error"; }
};

#define LEVYREP_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(what) {}        \
    const char* kind() const noexcept override { return #Name; }   \
  };

// Argument outside the domain of the operation (e.g. a complex point
// where the exponential moment diverges).
LEVYREP_DEFINE_ERROR(DomainError)
LEVYREP_DEFINE_ERROR(QuadratureError)
LEVYREP_DEFINE_ERROR(TruncationError)
// Tail behaviour could not be classified within the maximum grid extent.
LEVYREP_DEFINE_ERROR(InconclusiveError)
LEVYREP_DEFINE_ERROR(ParameterError)
LEVYREP_DEFINE_ERROR(AssumptionError)
LEVYREP_DEFINE_ERROR(SchemeError)
LEVYREP_DEFINE_ERROR(ConfigError)

#undef LEVYREP_DEFINE_ERROR

}  // namespace levyrep
