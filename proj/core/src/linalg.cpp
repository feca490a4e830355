#include "deployopt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deployopt/error.hpp"

namespace deployopt {

std::vector<double> solve_least_squares(const Matrix& x, std::span<const double> y, double lambda) {
    if (x.rows() != y.size()) throw PreconditionError("design rows and response length differ");
    if (!(lambda >= 0.0)) throw PreconditionError("ridge lambda must be non-negative");
    const std::size_t n = x.cols();
    if (n == 0) return {};

    // Lower triangle of A = X^T X + lambda I, and b = X^T y.
    Matrix a(n, n);
    std::vector<double> b(n, 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto row = x.row(r);
        for (std::size_t i = 0; i < n; ++i) {
            if (row[i] == 0.0) continue;
            b[i] += row[i] * y[r];
            for (std::size_t j = 0; j <= i; ++j) a(i, j) += row[i] * row[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) a(i, i) += lambda;

    // Jacobi equilibration: factor D A D with D = diag(A)^-1/2 so that the
    // pivot test sees unit diagonals regardless of feature units.
    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(a(i, i) > 0.0)) {
            throw SingularDesignError("feature column " + std::to_string(i) +
                                      " is identically zero; retry with a positive ridge lambda");
        }
        scale[i] = 1.0 / std::sqrt(a(i, i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        b[i] *= scale[i];
        for (std::size_t j = 0; j <= i; ++j) a(i, j) *= scale[i] * scale[j];
    }

    // In-place Cholesky, D A D = L L^T. Every scaled diagonal is 1, so the
    // relative pivot threshold is absolute here.
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        const bool tiny = lambda == 0.0 ? d <= kPivotThreshold : d <= 0.0;
        if (tiny || !std::isfinite(d)) {
            throw SingularDesignError("normal equations are rank-deficient at column " +
                                      std::to_string(j) + "; retry with a positive ridge lambda");
        }
        const double l = std::sqrt(d);
        a(j, j) = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / l;
        }
    }

    // Forward then back substitution.
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * z[k];
        z[i] = s / a(i, i);
    }
    std::vector<double> theta(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = z[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a(k, i) * theta[k];
        theta[i] = s / a(i, i);
    }
    for (std::size_t i = 0; i < n; ++i) theta[i] *= scale[i];
    return theta;
}

}  // namespace deployopt
