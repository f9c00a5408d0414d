#pragma once

#include <complex>
#include <cstddef>
#include <ostream>

#include <Eigen/Dense>

namespace phm {

using Complex = std::complex<double>;

/// Dense square complex matrix; carrier for H, S, m and M.
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Eigenvalue sign counts of a hermitian matrix.
struct Inertia {
    int positive = 0;
    int negative = 0;
    int zero = 0;

    friend bool operator==(const Inertia&, const Inertia&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Inertia& in) {
    return os << '(' << in.positive << ", " << in.negative << ", " << in.zero << ')';
}

/// Throws DimensionError unless `a` is square, non-empty and finite.
void require_square_finite(const ComplexMatrix& a, const char* what);

/// ‖A − A†‖_F / ‖A‖_F (0 for the zero matrix).
double hermiticity_defect(const ComplexMatrix& a);

/// (A + A†)/2
ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// Ratio of extreme singular values; +inf for singular input.
double condition_number(const ComplexMatrix& a);

}  // namespace phm
