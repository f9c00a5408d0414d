#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "phm/types.hpp"

namespace phm {

inline constexpr double kDefaultSpectralTol = 1e-8;
inline constexpr double kDefaultConditionCap = 1e8;

struct AdmissibilityReport {
    bool is_ph = false;
    /// max_k |Im c_k| / max_k |c_k| over the characteristic polynomial of H / scale.
    double max_imag_coeff = 0.0;
};

/// Checks that det(z − H) has real coefficients, a necessary condition for H to be
/// pseudo-hermitian. Coefficients are expanded from the eigenvalues scaled by max|λ|.
AdmissibilityReport check_ph_admissible(const ComplexMatrix& h, double tol = kDefaultSpectralTol);

/// Monic characteristic polynomial coefficients c_0..c_n (c_n = 1) of ∏(z − λ_k).
std::vector<Complex> characteristic_coefficients(const ComplexVector& values);

struct Eigenpairs {
    ComplexVector values;
    /// Right eigenvectors as columns, unit norm, first nonzero component real positive.
    ComplexMatrix vectors;
    double min_singular_value = 0.0;
    /// ‖H V − V diag(values)‖_F / ‖H‖_F
    double residual = 0.0;
};

Eigenpairs eigendecompose(const ComplexMatrix& h);

struct SpectrumClassification {
    std::vector<std::size_t> real_indices;
    /// (j+, j−) with Im λ(j+) > 0 and λ(j−) ≈ λ(j+)*, ordered by j+.
    std::vector<std::pair<std::size_t, std::size_t>> pair_indices;
    double eps_real = kDefaultSpectralTol;
    double eps_pair = kDefaultSpectralTol;

    std::size_t r() const noexcept { return real_indices.size(); }
    std::size_t p() const noexcept { return pair_indices.size(); }
};

/// max |λ|, or 1 when every value is zero.
double spectral_scale(const ComplexVector& values);

/// Splits eigenvalues into real singles and conjugate pairs by greedy matching;
/// ties go to the smaller index.
SpectrumClassification classify_spectrum(const ComplexVector& values,
                                         double eps_real = kDefaultSpectralTol,
                                         double eps_pair = kDefaultSpectralTol);

/// Returns min_{k≠l} |λ_k − λ_l| (+inf for n < 2); throws DegeneracyError when it is
/// at or below gap_tol · scale.
double assert_nondegenerate(const ComplexVector& values, double gap_tol = kDefaultSpectralTol);

/// Ordered diagonalization H = S⁻¹ diag(lam) S.
///
/// lam = (λ_1 < … < λ_r, z_1, z_1*, …, z_p, z_p*) with Im z_j > 0 and the pairs sorted by
/// (Re z, Im z). Matched eigenvalues are replaced by exact conjugates and real ones by
/// their real parts; the largest such change is kept in `symmetrization_shift`.
struct SpectralData {
    ComplexMatrix h;
    ComplexVector lam;
    ComplexMatrix s;
    /// S⁻¹, i.e. the right eigenvectors as columns.
    ComplexMatrix s_inv;
    std::size_t r = 0;
    std::size_t p = 0;
    double min_gap = 0.0;
    double cond_s = 0.0;
    double symmetrization_shift = 0.0;
    /// ‖H − S⁻¹ diag(lam) S‖_F / ‖H‖_F
    double reconstruction_residual = 0.0;

    std::size_t n() const noexcept { return static_cast<std::size_t>(lam.size()); }
};

SpectralData build_spectral_data(const ComplexMatrix& h, const SpectrumClassification& cls,
                                 const Eigenpairs& eig, double cond_cap = kDefaultConditionCap);

/// max_{μν} |L_μ† R_ν − δ_μν| with R_μ = S⁻¹ê_μ and L_μ = S†ê_μ.
double biorthogonality_check(const SpectralData& sd);

struct SpectralOptions {
    double eps_real = kDefaultSpectralTol;
    double eps_pair = kDefaultSpectralTol;
    double gap_tol = kDefaultSpectralTol;
    double ph_tol = kDefaultSpectralTol;
    double cond_cap = kDefaultConditionCap;
};

/// Admissibility, eigendecomposition, classification, non-degeneracy and ordering in one
/// call. Each stage throws its own error type.
SpectralData analyze_spectrum(const ComplexMatrix& h, const SpectralOptions& opts = {});

}  // namespace phm
