#include "phm/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "phm/errors.hpp"

namespace phm {

namespace {

double min_pairwise_gap(const ComplexVector& v) {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        for (Eigen::Index l = k + 1; l < v.size(); ++l) gap = std::min(gap, std::abs(v(k) - v(l)));
    }
    return gap;
}

// Eigenvalues in canonical order: reals ascending, then (z, z*) sorted by (Re z, Im z).
ComplexVector draw_spectrum(const GeneratorConfig& cfg, Rng& rng) {
    std::vector<double> reals(cfg.r);
    for (auto& x : reals) x = rng.uniform(cfg.re_min, cfg.re_max);
    std::vector<Complex> pairs(cfg.p);
    for (auto& z : pairs) {
        const double re = rng.uniform(cfg.re_min, cfg.re_max);
        const double im = cfg.im_max * (1.0 - rng.uniform());
        z = Complex(re, im);
    }
    std::sort(reals.begin(), reals.end());
    std::sort(pairs.begin(), pairs.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    ComplexVector lam(static_cast<Eigen::Index>(cfg.n));
    Eigen::Index k = 0;
    for (double x : reals) lam(k++) = Complex(x, 0.0);
    for (Complex z : pairs) {
        lam(k++) = z;
        lam(k++) = std::conj(z);
    }
    return lam;
}

}  // namespace

void validate(const GeneratorConfig& cfg) {
    if (cfg.n == 0 || cfg.r + 2 * cfg.p != cfg.n) {
        std::ostringstream os;
        os << "generator: r + 2p must equal n (r = " << cfg.r << ", p = " << cfg.p
           << ", n = " << cfg.n << ")";
        throw InvalidParameterError(os.str());
    }
    if (!(cfg.cond_max > 1.0)) throw InvalidParameterError("generator: cond_max must exceed 1");
    if (!(cfg.min_gap_target > 0.0)) {
        throw InvalidParameterError("generator: min_gap_target must be positive");
    }
    if (!(cfg.re_max > cfg.re_min) || !(cfg.im_max > 0.0)) {
        throw InvalidParameterError("generator: empty eigenvalue box");
    }
}

GeneratedInstance generate_via_spectrum(const GeneratorConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.seed);
    const auto n = static_cast<Eigen::Index>(cfg.n);

    std::size_t gap_rejects = 0;
    std::size_t cond_rejects = 0;
    for (std::size_t attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        const ComplexVector lam = draw_spectrum(cfg, rng);
        const double gap = min_pairwise_gap(lam);
        if (cfg.n >= 2 && !(gap > cfg.min_gap_target * spectral_scale(lam))) {
            ++gap_rejects;
            continue;
        }

        ComplexMatrix s(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) s(i, j) = rng.complex_normal();
        }
        const double cond = condition_number(s);
        if (!(cond <= cfg.cond_max)) {
            ++cond_rejects;
            continue;
        }

        GeneratedInstance out;
        SpectralData& sd = out.sd;
        sd.lam = lam;
        sd.s = s;
        sd.s_inv = s.partialPivLu().inverse();
        sd.r = cfg.r;
        sd.p = cfg.p;
        sd.min_gap = gap;
        sd.cond_s = cond;
        sd.h = sd.s_inv * lam.asDiagonal() * s;
        const double rec = (sd.h - sd.s_inv * lam.asDiagonal() * sd.s).norm();
        sd.reconstruction_residual = rec / sd.h.norm();
        out.h = sd.h;

        out.certificate.mu.assign(cfg.r, 1.0);
        out.certificate.tau.assign(cfg.p, Complex(1.0, 0.0));
        out.certificate_metric = build_M(sd, out.certificate);
        return out;
    }

    std::ostringstream os;
    os << "generate_via_spectrum: no instance after " << cfg.max_attempts << " attempts ("
       << gap_rejects << " rejected by the eigenvalue gap " << cfg.min_gap_target << ", "
       << cond_rejects << " by the condition cap " << cfg.cond_max << "); binding constraint: "
       << (gap_rejects >= cond_rejects ? "min_gap_target" : "cond_max");
    throw GenerationError(os.str());
}

ObservableInstance compose_observable(const ComplexMatrix& a, const ComplexMatrix& m) {
    require_square_finite(a, "compose_observable(A)");
    require_square_finite(m, "compose_observable(M)");
    if (a.rows() != m.rows()) throw DimensionError("compose_observable: A and M differ in size");
    if (hermiticity_defect(a) > kDefaultHermitianTol) {
        throw ContractViolation("compose_observable: A is not hermitian");
    }
    if (hermiticity_defect(m) > kDefaultHermitianTol) {
        throw ContractViolation("compose_observable: M is not hermitian");
    }
    const Inertia in = inertia_of_matrix(m);
    if (in.zero != 0) {
        throw InvalidParameterError("compose_observable: M is singular (" +
                                    std::to_string(in.zero) + " null eigenvalue(s))");
    }

    ObservableInstance out;
    out.a = a;
    out.phi = a * m;
    out.recovered_a = m.transpose().partialPivLu().solve(out.phi.transpose()).transpose();
    out.recovered_hermiticity_defect = hermiticity_defect(out.recovered_a);
    if (out.recovered_hermiticity_defect > 1e-8) {
        std::ostringstream os;
        os << "compose_observable: Φ M⁻¹ is not hermitian (defect "
           << out.recovered_hermiticity_defect << "); M is too ill-conditioned";
        throw NumericError(os.str());
    }
    out.residual = intertwining_residual(out.phi, m);
    return out;
}

ObservableInstance generate_via_observable(const ComplexMatrix& m, std::uint64_t seed) {
    require_square_finite(m, "generate_via_observable");
    return compose_observable(random_hermitian(static_cast<std::size_t>(m.rows()), seed), m);
}

ComplexMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return random_hermitian(n, rng);
}

ComplexMatrix random_hermitian(std::size_t n, Rng& rng) {
    if (n == 0) throw DimensionError("random_hermitian: n must be positive");
    const auto dim = static_cast<Eigen::Index>(n);
    ComplexMatrix a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        a(i, i) = Complex(rng.normal(), 0.0);
        for (Eigen::Index j = i + 1; j < dim; ++j) {
            a(i, j) = rng.complex_normal();
            a(j, i) = std::conj(a(i, j));
        }
    }
    return a;
}

MetricParameters random_metric_parameters(std::size_t r, std::size_t p, Rng& rng) {
    MetricParameters params;
    params.mu.reserve(r);
    params.tau.reserve(p);
    for (std::size_t i = 0; i < r; ++i) {
        const double mag = rng.uniform(0.5, 2.0);
        params.mu.push_back(rng.uniform() < 0.5 ? mag : -mag);
    }
    for (std::size_t s = 0; s < p; ++s) {
        const double mag = rng.uniform(0.5, 2.0);
        params.tau.push_back(std::polar(mag, rng.uniform(0.0, 2.0 * std::numbers::pi)));
    }
    return params;
}

}  // namespace phm
