#include "phm/types.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "phm/errors.hpp"

namespace phm {

void require_square_finite(const ComplexMatrix& a, const char* what) {
    if (a.rows() == 0 || a.rows() != a.cols()) {
        throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
    if (!a.allFinite()) {
        throw DimensionError(std::string(what) + ": matrix has non-finite entries");
    }
}

double hermiticity_defect(const ComplexMatrix& a) {
    const double norm = a.norm();
    if (norm == 0.0) return 0.0;
    return (a - a.adjoint()).norm() / norm;
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
    return (a + a.adjoint()) * 0.5;
}

double condition_number(const ComplexMatrix& a) {
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return sv(0) / smin;
}

}  // namespace phm
