#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "phm/spectral.hpp"
#include "phm/types.hpp"

namespace phm {

inline constexpr double kDefaultHermitianTol = 1e-10;
inline constexpr double kDefaultInertiaTol = 1e-10;

/// Free parameters of the metric family: one real μ per real eigenvalue and one
/// complex τ per conjugate pair. All must be nonzero.
struct MetricParameters {
    std::vector<double> mu;
    std::vector<Complex> tau;

    MetricParameters operator-() const;
};

/// One point of the canonical solution space: signs of the μ's, one bit per pair
/// selecting ±σ_z, and the pair phases arg τ in [0, 2π).
struct CanonicalClass {
    std::vector<int> signs;
    std::vector<int> n;
    std::vector<double> theta;
};

struct MetricResult {
    ComplexMatrix m;  // the metric M, exactly hermitian
    Inertia inertia;
    double residual = 0.0;
};

using Matrix2c = Eigen::Matrix2cd;

/// The 2×2 block [[0, τ*], [τ, 0]] = Re τ σ_x + Im τ σ_y.
Matrix2c pair_block(Complex tau);

/// block-diag(μ_1, …, μ_r, τ_1·σ, …, τ_p·σ)
ComplexMatrix build_m(const MetricParameters& params, std::size_t r, std::size_t p);

/// M = S† m S for the ordered diagonalizer in `sd`.
MetricResult build_M(const SpectralData& sd, const MetricParameters& params);

/// H† M − M H
ComplexMatrix intertwining_residual_matrix(const ComplexMatrix& h, const ComplexMatrix& m);

/// ‖H†M − MH‖_F / (‖H‖_F ‖M‖_F). Requires M hermitian to `herm_tol` (relative).
double intertwining_residual(const ComplexMatrix& h, const ComplexMatrix& m,
                             double herm_tol = kDefaultHermitianTol);

/// ⟨a | M b⟩
Complex m_inner_product(const ComplexMatrix& m, const ComplexVector& a, const ComplexVector& b);

/// W = exp(iπ/4 σ_y) exp(i arg τ/2 σ_z) exp(i n π/2 σ_z); W (τ·σ) W† = (−1)^n |τ| σ_z.
Matrix2c block_rotation(Complex tau, int n_bit);

/// block-diag(s_1, …, s_r, (−1)^{n_1} σ_z, …, (−1)^{n_p} σ_z)
ComplexMatrix build_m0(const std::vector<int>& signs, const std::vector<int>& n_bits);

/// M = S† 𝒰† m₀ 𝒰 S with 𝒰 = block-diag(1, …, 1, U_1, …, U_p) built from the phases.
MetricResult canonical_metric(const SpectralData& sd, const CanonicalClass& cls);

struct GaugeAbsorption {
    SpectralData sd;  // S' = D₀ S, still diagonalizes H
    CanonicalClass cls;
};

/// Moves the moduli |μ_i|, |τ_s| into the diagonalizer, leaving signs and phases.
GaugeAbsorption gauge_absorb(const SpectralData& sd, const MetricParameters& params);

/// (p + #{μ > 0}, p + #{μ < 0}, 0)
Inertia inertia_of_params(const MetricParameters& params, std::size_t p);

/// Eigenvalue sign counts with threshold tol · max|eigenvalue|.
Inertia inertia_of_matrix(const ComplexMatrix& m, double tol = kDefaultInertiaTol);

struct ClassAssignment {
    std::vector<int> signs;  // ±1
    std::vector<int> n;      // 0/1

    friend bool operator==(const ClassAssignment&, const ClassAssignment&) = default;
};

inline constexpr std::size_t kMaxEnumerationBits = 62;

/// Number of classes enumerate_classes would return.
std::uint64_t class_count(std::size_t r, std::size_t p, bool mod_global);

/// Sign/bit assignments in lexicographic order (+ before −, 0 before 1). With
/// `mod_global`, only the representative whose first m₀ entry is +1 is kept.
std::vector<ClassAssignment> enumerate_classes(std::size_t r, std::size_t p, bool mod_global);

/// The positive-definite metric S†S; only exists for a purely real spectrum.
MetricResult sqh_factorization(const SpectralData& sd);

/// arg z mapped into [0, 2π).
double wrap_phase(double theta);

}  // namespace phm
