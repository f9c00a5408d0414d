#pragma once

#include <cstddef>
#include <cstdint>

#include "phm/metric_family.hpp"
#include "phm/random.hpp"
#include "phm/spectral.hpp"
#include "phm/types.hpp"

namespace phm {

struct GeneratorConfig {
    std::size_t n = 2;
    std::size_t r = 2;
    std::size_t p = 0;
    std::uint64_t seed = 0;
    double cond_max = 1e6;
    /// Real parts (and real eigenvalues) are drawn from [re_min, re_max].
    double re_min = -1.0;
    double re_max = 1.0;
    /// Imaginary parts of the Im > 0 pair members are drawn from (0, im_max].
    double im_max = 1.0;
    /// Minimum pairwise eigenvalue distance relative to max|λ|.
    double min_gap_target = 1e-2;
    std::size_t max_attempts = 1000;
};

/// Throws InvalidParameterError unless r + 2p = n, cond_max > 1, min_gap_target > 0.
void validate(const GeneratorConfig& cfg);

struct GeneratedInstance {
    ComplexMatrix h;
    SpectralData sd;  // exact data used to build h
    MetricParameters certificate;  // μ = 1, τ = 1
    MetricResult certificate_metric;
};

/// H = S⁻¹ Λ S with a random admissible spectrum and a Gaussian diagonalizer, both
/// rejection-sampled against the gap and condition constraints.
GeneratedInstance generate_via_spectrum(const GeneratorConfig& cfg);

struct ObservableInstance {
    ComplexMatrix phi;
    ComplexMatrix a;
    /// Φ M⁻¹, which must reproduce A.
    ComplexMatrix recovered_a;
    double recovered_hermiticity_defect = 0.0;
    double residual = 0.0;
};

/// Φ = A M for hermitian A and invertible hermitian M; Φ is pseudo-hermitian w.r.t. M.
ObservableInstance compose_observable(const ComplexMatrix& a, const ComplexMatrix& m);

/// compose_observable with A = random_hermitian(n, seed).
ObservableInstance generate_via_observable(const ComplexMatrix& m, std::uint64_t seed);

/// Diagonal N(0,1), off-diagonal (N(0,1) + i N(0,1))/√2.
ComplexMatrix random_hermitian(std::size_t n, std::uint64_t seed);
ComplexMatrix random_hermitian(std::size_t n, Rng& rng);

/// μ = ±U[0.5, 2), τ = U[0.5, 2) · e^{iU[0, 2π)}.
MetricParameters random_metric_parameters(std::size_t r, std::size_t p, Rng& rng);

}  // namespace phm
