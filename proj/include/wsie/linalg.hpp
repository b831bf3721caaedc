#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wsie {

/// Square matrix, row-major.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t order, double fill = 0.0) : order_(order), entries_(order * order, fill) {}

    static DenseMatrix identity(std::size_t order);

    std::size_t order() const { return order_; }
    double& operator()(std::size_t i, std::size_t j) { return entries_[i * order_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * order_ + j]; }
    std::span<double> row(std::size_t i) { return {entries_.data() + i * order_, order_}; }
    std::span<const double> row(std::size_t i) const { return {entries_.data() + i * order_, order_}; }
    std::span<const double> entries() const { return entries_; }

    std::vector<double> multiply(std::span<const double> x) const;

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t order_ = 0;
    std::vector<double> entries_;
};

/// Values on the nodes of a quadrature rule.
struct GridFunction {
    std::vector<double> nodes;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

double sup_norm(std::span<const double> v);

/// Piecewise-linear through the grid values, constant beyond the end nodes.
double interpolate_linear(const GridFunction& f, double s);

/// Gaussian elimination with partial pivoting. Throws SingularMatrixError when a
/// pivot falls below 1e-14 max|entry|.
std::vector<double> lu_solve(DenseMatrix m, std::span<const double> rhs);

}  // namespace wsie
