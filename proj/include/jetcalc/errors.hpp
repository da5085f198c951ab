#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jetcalc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text; `position` is a 0-based byte offset.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(const std::string& name, std::size_t position)
      : Error("unknown identifier '" + name + "' at offset " + std::to_string(position)),
        name_(name),
        position_(position) {}
  const std::string& name() const noexcept { return name_; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::string name_;
  std::size_t position_;
};

#define JETCALC_SIMPLE_ERROR(Name)  \
  class Name : public Error {       \
   public:                          \
    using Error::Error;             \
  }

JETCALC_SIMPLE_ERROR(CyclicSubstitution);
JETCALC_SIMPLE_ERROR(NonPolynomialInScalar);
JETCALC_SIMPLE_ERROR(NonlocalVariablePresent);
JETCALC_SIMPLE_ERROR(NotInternal);
JETCALC_SIMPLE_ERROR(DimensionMismatch);
JETCALC_SIMPLE_ERROR(RegimeMismatch);
JETCALC_SIMPLE_ERROR(DegreeOverflow);
JETCALC_SIMPLE_ERROR(NotVariational);
JETCALC_SIMPLE_ERROR(NotConserved);
JETCALC_SIMPLE_ERROR(NotGeneratingFunction);
JETCALC_SIMPLE_ERROR(NonlinearInUnknowns);
JETCALC_SIMPLE_ERROR(ScopeError);
JETCALC_SIMPLE_ERROR(PreconditionFailed);
JETCALC_SIMPLE_ERROR(VerificationFailed);
JETCALC_SIMPLE_ERROR(InvalidContext);

#undef JETCALC_SIMPLE_ERROR

}  // namespace jetcalc
