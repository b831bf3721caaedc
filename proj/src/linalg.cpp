#include "wsie/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "wsie/errors.hpp"

namespace wsie {

DenseMatrix DenseMatrix::identity(std::size_t order) {
    DenseMatrix m(order);
    for (std::size_t i = 0; i < order; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
    if (x.size() != order_) throw GridMismatchError("matrix-vector size mismatch");
    std::vector<double> y(order_, 0.0);
    for (std::size_t i = 0; i < order_; ++i) {
        const auto r = row(i);
        double sum = 0.0;
        for (std::size_t j = 0; j < order_; ++j) sum += r[j] * x[j];
        y[i] = sum;
    }
    return y;
}

double sup_norm(std::span<const double> v) {
    if (v.empty()) throw DomainError("sup_norm of an empty vector");
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double interpolate_linear(const GridFunction& f, double s) {
    if (f.values.empty() || f.nodes.size() != f.values.size()) throw GridMismatchError("interpolate_linear: bad grid");
    const auto& t = f.nodes;
    if (s <= t.front()) return f.values.front();
    if (s >= t.back()) return f.values.back();
    const auto j = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), s) - t.begin());
    const double theta = (s - t[j - 1]) / (t[j] - t[j - 1]);
    return (1.0 - theta) * f.values[j - 1] + theta * f.values[j];
}

std::vector<double> lu_solve(DenseMatrix m, std::span<const double> rhs) {
    const std::size_t n = m.order();
    if (rhs.size() != n) throw GridMismatchError("lu_solve: rhs length != matrix order");
    if (n == 0) return {};
#ifndef NDEBUG
    const DenseMatrix original = m;
#endif
    std::vector<double> x(rhs.begin(), rhs.end());
    double scale = 0.0;
    for (double e : m.entries()) scale = std::max(scale, std::abs(e));
    const double tiny = 1e-14 * scale;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(m(i, k)) > std::abs(m(pivot, k))) pivot = i;
        }
        if (!(std::abs(m(pivot, k)) > tiny)) {
            throw SingularMatrixError("lu_solve: singular matrix at column " + std::to_string(k));
        }
        if (pivot != k) {
            std::swap_ranges(m.row(k).begin(), m.row(k).end(), m.row(pivot).begin());
            std::swap(x[k], x[pivot]);
        }
        const auto pivot_row = m.row(k);
        for (std::size_t i = k + 1; i < n; ++i) {
            auto r = m.row(i);
            const double factor = r[k] / pivot_row[k];
            if (factor == 0.0) continue;
            r[k] = factor;
            for (std::size_t j = k + 1; j < n; ++j) r[j] -= factor * pivot_row[j];
            x[i] -= factor * x[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        const auto r = m.row(k);
        double sum = x[k];
        for (std::size_t j = k + 1; j < n; ++j) sum -= r[j] * x[j];
        x[k] = sum / r[k];
    }
#ifndef NDEBUG
    auto back = original.multiply(x);
    for (std::size_t i = 0; i < n; ++i) back[i] -= rhs[i];
    assert(sup_norm(back) <= 1e-10 * (1.0 + sup_norm(rhs)));
#endif
    return x;
}

}  // namespace wsie
