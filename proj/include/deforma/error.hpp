#pragma once

#include <stdexcept>
#include <string>

namespace deforma {

// Base of every error raised by the library. `kind()` is the stable name
// printed by the command-line tool.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define DEFORMA_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                       \
   public:                                                          \
    using Error::Error;                                             \
    const char* kind() const noexcept override { return #Name; }    \
  };

DEFORMA_DEFINE_ERROR(FormatError)
DEFORMA_DEFINE_ERROR(ValidationError)
DEFORMA_DEFINE_ERROR(IoError)
DEFORMA_DEFINE_ERROR(DomainError)
DEFORMA_DEFINE_ERROR(DegenerateError)
DEFORMA_DEFINE_ERROR(SingularError)
DEFORMA_DEFINE_ERROR(ShapeError)
DEFORMA_DEFINE_ERROR(WeightError)

#undef DEFORMA_DEFINE_ERROR

}  // namespace deforma
