#pragma once

#include <stdexcept>
#include <string>

namespace ife {

/// Base of every error raised by the library. `module()` names the
/// component that raised it so front ends can report provenance.
class Error : public std::runtime_error {
public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

private:
  std::string module_;
};

#define IFE_DEFINE_ERROR(Name)                                                 \
  class Name : public Error {                                                  \
  public:                                                                      \
    using Error::Error;                                                        \
  }

IFE_DEFINE_ERROR(NotHermitian);
IFE_DEFINE_ERROR(NoConvergence);
IFE_DEFINE_ERROR(DimensionMismatch);
IFE_DEFINE_ERROR(InvalidArgument);
IFE_DEFINE_ERROR(EvaluationFailure);
IFE_DEFINE_ERROR(IndexOutOfRange);
IFE_DEFINE_ERROR(LengthMismatch);
IFE_DEFINE_ERROR(InvalidDepth);
IFE_DEFINE_ERROR(CutoffTooSmall);
IFE_DEFINE_ERROR(BadOrdering);
IFE_DEFINE_ERROR(ParseError);
IFE_DEFINE_ERROR(UnknownModel);

#undef IFE_DEFINE_ERROR

} // namespace ife
