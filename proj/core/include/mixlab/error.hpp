#pragma once

#include <stdexcept>
#include <string>

namespace mixlab {

// Broad classes used by the CLI to pick an exit code.
enum class ErrorClass { precondition, numerical_guard, verification };

class Error : public std::runtime_error {
 public:
  Error(std::string kind, ErrorClass cls, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)), class_(cls) {}
  const std::string& kind() const noexcept { return kind_; }
  ErrorClass error_class() const noexcept { return class_; }

 private:
  std::string kind_;
  ErrorClass class_;
};

#define MIXLAB_DEFINE_ERROR(Name, Class)                                   \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& message)                              \
        : Error(#Name, ErrorClass::Class, message) {}                      \
  };

MIXLAB_DEFINE_ERROR(NonStochasticRow, precondition)
MIXLAB_DEFINE_ERROR(NotIrreducible, precondition)
MIXLAB_DEFINE_ERROR(NotReversible, precondition)
MIXLAB_DEFINE_ERROR(NotLazy, precondition)
MIXLAB_DEFINE_ERROR(DimensionMismatch, precondition)
MIXLAB_DEFINE_ERROR(ZeroStationaryMass, precondition)
MIXLAB_DEFINE_ERROR(DenseLimitExceeded, precondition)
MIXLAB_DEFINE_ERROR(TooLargeForExact, precondition)
MIXLAB_DEFINE_ERROR(EmptyTargetSet, precondition)
MIXLAB_DEFINE_ERROR(TargetMismatch, precondition)
MIXLAB_DEFINE_ERROR(PreconditionFailed, precondition)
MIXLAB_DEFINE_ERROR(NotBirthDeath, precondition)
MIXLAB_DEFINE_ERROR(OddDepth, precondition)
MIXLAB_DEFINE_ERROR(SizeOverflow, precondition)
MIXLAB_DEFINE_ERROR(Disconnected, precondition)
MIXLAB_DEFINE_ERROR(InvalidArgument, precondition)
MIXLAB_DEFINE_ERROR(EigenSolverFailure, numerical_guard)
MIXLAB_DEFINE_ERROR(ComplexEigenvalue, numerical_guard)
MIXLAB_DEFINE_ERROR(HorizonCap, numerical_guard)
MIXLAB_DEFINE_ERROR(ExpanderSearchExhausted, numerical_guard)
MIXLAB_DEFINE_ERROR(NotLumpable, numerical_guard)
MIXLAB_DEFINE_ERROR(NoRoot, numerical_guard)
MIXLAB_DEFINE_ERROR(HorizonExceeded, numerical_guard)

#undef MIXLAB_DEFINE_ERROR

}  // namespace mixlab
