#pragma once

#include <stdexcept>
#include <string>

namespace oscint {

// Base for all domain errors thrown by the library. The concrete class name
// is the error name surfaced by the CLI.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual const char* name() const noexcept { return "Error"; }
};

#define OSCINT_DEFINE_ERROR(Name)                                       \
    struct Name : Error {                                               \
        explicit Name(const std::string& msg) : Error(msg) {}           \
        const char* name() const noexcept override { return #Name; }    \
    }

OSCINT_DEFINE_ERROR(NonPositiveParameter);
OSCINT_DEFINE_ERROR(OutOfWindow);
OSCINT_DEFINE_ERROR(OutOfRootRange);
OSCINT_DEFINE_ERROR(SingularMatrix);
OSCINT_DEFINE_ERROR(CausticSingularity);
OSCINT_DEFINE_ERROR(DegenerateComposition);
OSCINT_DEFINE_ERROR(DimensionMismatch);
OSCINT_DEFINE_ERROR(IndexOutOfRange);
OSCINT_DEFINE_ERROR(NonNormalizableState);
OSCINT_DEFINE_ERROR(IoError);

#undef OSCINT_DEFINE_ERROR

} // namespace oscint
