#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace deployopt {

/// Dense row-major matrix, just enough for least-squares design matrices.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Relative pivot below which the normal matrix counts as rank-deficient.
inline constexpr double kPivotThreshold = 1e-12;

/// Minimises |y - X theta|^2 + lambda |theta|^2 through the normal equations
/// (X^T X + lambda I) theta = X^T y and a Cholesky factorisation.
///
/// The system is Jacobi-equilibrated (unit diagonal) before factorising.
/// Throws SingularDesignError when lambda == 0 and a pivot of the
/// equilibrated system falls below kPivotThreshold (relative to its largest
/// diagonal, which is 1), or when the factorisation breaks down numerically
/// for lambda > 0. Throws
/// PreconditionError on shape mismatch or negative lambda.
std::vector<double> solve_least_squares(const Matrix& design, std::span<const double> response,
                                        double ridge_lambda);

}  // namespace deployopt
