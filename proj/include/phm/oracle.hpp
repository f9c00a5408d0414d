#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phm/metric_family.hpp"
#include "phm/spectral.hpp"
#include "phm/types.hpp"

namespace phm {

inline constexpr double kDefaultRankTol = 1e-8;
inline constexpr double kRankAmbiguityRatio = 10.0;
inline constexpr std::size_t kOracleMaxDimension = 32;

/// Real coordinates for hermitian n×n matrices: trace-orthonormal elements ordered as
/// diagonal units, then (e_k e_l† + e_l e_k†)/√2 and i(e_k e_l† − e_l e_k†)/√2 for k < l.
struct HermitianBasis {
    std::size_t n = 0;
    std::vector<ComplexMatrix> elements;
};

HermitianBasis hermitian_basis(std::size_t n);

/// Tr(E_a X) for each basis element (real part; exact for hermitian X).
Eigen::VectorXd hermitian_coordinates(const HermitianBasis& basis, const ComplexMatrix& x);

/// Σ_a c_a E_a
ComplexMatrix from_coordinates(const HermitianBasis& basis, const Eigen::VectorXd& coords);

/// Real n²×n² matrix L with L·coords(M) = coords_{iE}(H†M − MH) for hermitian M.
Eigen::MatrixXd intertwining_operator_matrix(const ComplexMatrix& h, const HermitianBasis& basis);
Eigen::MatrixXd intertwining_operator_matrix(const ComplexMatrix& h);

struct KernelReport {
    std::size_t dimension = 0;
    /// Trace-orthonormal hermitian solutions of H†M = MH.
    std::vector<ComplexMatrix> basis;
    /// Singular values of L, ascending.
    std::vector<double> singular_values;
    /// σ_{dim+1} / σ_dim (ascending order); +inf when either side is absent or σ_dim = 0.
    double gap_ratio = 0.0;
    double rank_tol = kDefaultRankTol;
    std::optional<std::string> warning;
};

/// Numerical kernel of the intertwining operator over hermitian matrices.
KernelReport solution_space(const ComplexMatrix& h, double rank_tol = kDefaultRankTol);

struct FamilyMatch {
    /// Largest relative distance of a sampled family metric from the kernel span.
    double max_projection_defect = 0.0;
    /// Largest relative least-squares defect when fitting kernel elements with (μ, τ).
    double max_recovery_defect = 0.0;
    bool params_recovered = false;
    std::vector<MetricParameters> recovered;
};

inline constexpr double kFamilyMatchTol = 1e-8;

/// Checks that the parametrized family and the kernel span the same space.
FamilyMatch family_vs_kernel(const SpectralData& sd, const KernelReport& report,
                             std::uint64_t seed = 0, std::size_t samples = 8);

}  // namespace phm
