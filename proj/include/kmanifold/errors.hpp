#pragma once

#include <stdexcept>
#include <string>

namespace kmanifold {

/// Base class for every error raised by the library. `kind()` is a stable,
/// machine-readable name used in serialized run results.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define KMANIFOLD_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(#Name, what) {}    \
  };

KMANIFOLD_DEFINE_ERROR(InvalidArgument)
KMANIFOLD_DEFINE_ERROR(DegenerateRetraction)
KMANIFOLD_DEFINE_ERROR(NonInteriorPoint)
KMANIFOLD_DEFINE_ERROR(SingularSystem)
KMANIFOLD_DEFINE_ERROR(BracketingFailure)
KMANIFOLD_DEFINE_ERROR(NoProgress)
KMANIFOLD_DEFINE_ERROR(InvalidInit)
KMANIFOLD_DEFINE_ERROR(RankNotOverparameterized)
KMANIFOLD_DEFINE_ERROR(CoefficientNegative)
KMANIFOLD_DEFINE_ERROR(NotOnManifold)
KMANIFOLD_DEFINE_ERROR(DegenerateClustering)
KMANIFOLD_DEFINE_ERROR(LabelRangeMismatch)
KMANIFOLD_DEFINE_ERROR(DimensionTooSmall)
KMANIFOLD_DEFINE_ERROR(ParseError)
KMANIFOLD_DEFINE_ERROR(RaggedRows)

#undef KMANIFOLD_DEFINE_ERROR

}  // namespace kmanifold
