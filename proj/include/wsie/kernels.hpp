#pragma once

#include <functional>
#include <optional>

namespace wsie {

enum class SymmetryClass {
    Decreasing,           // g nonincreasing on (0, b-a]
    SymmetricDecreasing,  // g(r) = g(b-a-r), nonincreasing on (0, (b-a)/2]
};

/// Weakly singular function g(|s-t|) of the distance, integrable at r = 0.
struct SingularKernel {
    std::function<double(double)> eval;                      // defined on (0, interval_length]
    std::optional<std::function<double(double)>> primitive;  // G with G' = g
    SymmetryClass symmetry = SymmetryClass::Decreasing;
    double interval_length = 1.0;
};

/// g replaced by the constant g(delta) near every singular point.
struct TruncatedKernel {
    SingularKernel base;
    double delta;
};

/// Nonlinear factor N(s,t,u) and its partial derivative in u.
struct Nonlinearity {
    std::function<double(double, double, double)> n_eval;
    std::function<double(double, double, double)> dn_du;
};

double eval_truncated(const TruncatedKernel& k, double r);

/// ∫_a^b g(|s-t|) dt from the primitive. Throws NoClosedFormError without one.
double exact_line_integral(const SingularKernel& k, double a, double b, double s);

/// Clausen function Cl_2(theta) = -∫_0^theta log|2 sin(x/2)| dx.
double clausen2(double theta);

namespace kernels {

// g(r) = 1/(2 sqrt r), G(r) = sqrt r.
SingularKernel inverse_sqrt(double interval_length = 1.0);

// g(r) = log 2 - log(1 - cos 2 pi r) on a unit-period interval.
SingularKernel periodic_log();

}  // namespace kernels

}  // namespace wsie
