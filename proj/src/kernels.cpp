#include "wsie/kernels.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "wsie/errors.hpp"

namespace wsie {

double eval_truncated(const TruncatedKernel& k, double r) {
    const double length = k.base.interval_length;
    // distances |s-t| computed from nodes in [a,b] may overshoot by an ulp
    const double slack = 8 * std::numeric_limits<double>::epsilon() * length;
    if (!(r >= 0.0) || r > length + slack) {
        throw DomainError("eval_truncated: distance outside [0, b-a]");
    }
    if (r <= k.delta) return k.base.eval(k.delta);
    if (k.base.symmetry == SymmetryClass::SymmetricDecreasing && r >= length - k.delta) {
        return k.base.eval(k.delta);
    }
    return k.base.eval(r);
}

double exact_line_integral(const SingularKernel& k, double a, double b, double s) {
    if (!k.primitive) throw NoClosedFormError("exact_line_integral: kernel has no primitive");
    if (s < a || s > b) throw DomainError("exact_line_integral: s outside [a,b]");
    const auto& G = *k.primitive;
    return G(s - a) + G(b - s) - 2.0 * G(0.0);
}

double clausen2(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    theta = std::fmod(theta, two_pi);
    if (theta < 0) theta += two_pi;
    if (theta == 0.0) return 0.0;
    if (theta > std::numbers::pi) return -clausen2(two_pi - theta);
    // theta - theta log theta + sum_n zeta(2n)/(n(2n+1)) theta^(2n+1)/(2 pi)^(2n); ratio <= 1/4 on (0, pi]
    static const auto coefficients = [] {
        std::array<double, 40> c{};
        for (int n = 1; n <= 40; ++n) c[n - 1] = std::riemann_zeta(2.0 * n) / (n * (2.0 * n + 1.0));
        return c;
    }();
    const double x2 = (theta / two_pi) * (theta / two_pi);
    double sum = theta - theta * std::log(theta);
    double power = theta;
    for (int n = 1; n <= 40; ++n) {
        power *= x2;
        const double term = coefficients[n - 1] * power;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

namespace kernels {

SingularKernel inverse_sqrt(double interval_length) {
    return SingularKernel{
        .eval = [](double r) { return 0.5 / std::sqrt(r); },
        .primitive = [](double r) { return std::sqrt(r); },
        .symmetry = SymmetryClass::Decreasing,
        .interval_length = interval_length,
    };
}

SingularKernel periodic_log() {
    constexpr double pi = std::numbers::pi;
    return SingularKernel{
        // 1 - cos(2 pi r) written as 2 sin^2(pi r) to keep precision near r = 0 and r = 1
        .eval =
            [](double r) {
                const double sn = std::sin(pi * r);
                return std::numbers::ln2 - std::log(2.0 * sn * sn);
            },
        // g = -2 log sin(pi r), whose antiderivative is Cl_2(2 pi r)/pi + 2 r log 2
        .primitive = [](double r) { return clausen2(2.0 * pi * r) / pi + 2.0 * r * std::numbers::ln2; },
        .symmetry = SymmetryClass::SymmetricDecreasing,
        .interval_length = 1.0,
    };
}

}  // namespace kernels

}  // namespace wsie
