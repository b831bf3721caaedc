#pragma once

#include <stdexcept>
#include <string>

namespace wsie {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};

struct ParameterError : Error {
    using Error::Error;
};

struct GridMismatchError : Error {
    using Error::Error;
};

// Raised by exact_line_integral when the kernel carries no primitive.
struct NoClosedFormError : Error {
    using Error::Error;
};

struct NormalizationError : Error {
    using Error::Error;
};

// iteration is -1 when the solve happened outside a solver loop.
struct SingularMatrixError : Error {
    SingularMatrixError(const std::string& what, int iteration = -1)
        : Error(what), iteration(iteration) {}
    int iteration;
};

struct DivergenceError : Error {
    DivergenceError(const std::string& what, int iteration) : Error(what), iteration(iteration) {}
    int iteration;
};

struct InterpolationDegeneracyError : Error {
    InterpolationDegeneracyError(const std::string& what, double s, double denominator)
        : Error(what), s(s), denominator(denominator) {}
    double s;
    double denominator;
};

// Non-fatal parameter advisories go through here; the default sink is stderr.
using WarningSink = void (*)(const std::string&);
WarningSink set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace wsie
