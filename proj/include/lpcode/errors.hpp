#pragma once

#include <stdexcept>
#include <string>

namespace lpcode {

/// Base of every error raised by the library. The CLI maps these to the
/// "data error" exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LPCODE_DEFINE_ERROR(Name)                 \
  class Name : public Error {                     \
   public:                                        \
    explicit Name(const std::string& what)        \
        : Error(std::string(#Name ": ") + what) {} \
  }

LPCODE_DEFINE_ERROR(ParseError);
LPCODE_DEFINE_ERROR(InvalidUnit);
LPCODE_DEFINE_ERROR(DegenerateInput);
LPCODE_DEFINE_ERROR(EmptyInput);
LPCODE_DEFINE_ERROR(InsufficientNegatives);
LPCODE_DEFINE_ERROR(TooFewInstances);
LPCODE_DEFINE_ERROR(InvalidGroups);
LPCODE_DEFINE_ERROR(InvalidDegrees);
LPCODE_DEFINE_ERROR(SingleClassInput);
LPCODE_DEFINE_ERROR(NonFiniteFeature);
LPCODE_DEFINE_ERROR(DimensionMismatch);
LPCODE_DEFINE_ERROR(LengthMismatch);
LPCODE_DEFINE_ERROR(TreeTooLarge);
LPCODE_DEFINE_ERROR(EmptyCorpus);
LPCODE_DEFINE_ERROR(MissingGenerator);
LPCODE_DEFINE_ERROR(FormatError);

#undef LPCODE_DEFINE_ERROR

}  // namespace lpcode
