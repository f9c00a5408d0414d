#include "phm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "phm/errors.hpp"

namespace phm {

namespace {

// Components below this modulus (in a unit-norm column) do not fix the phase gauge.
constexpr double kPhaseAnchorFloor = 1e-10;

std::string format_value(Complex z) {
    std::ostringstream os;
    os.precision(17);
    os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << 'i';
    return os.str();
}

void normalize_column(Eigen::Ref<ComplexVector> v) {
    const double norm = v.norm();
    if (norm == 0.0) return;
    v /= norm;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mod = std::abs(v(i));
        if (mod > kPhaseAnchorFloor) {
            v *= std::conj(v(i)) / mod;
            v(i) = Complex(mod, 0.0);
            return;
        }
    }
}

}  // namespace

std::vector<Complex> characteristic_coefficients(const ComplexVector& values) {
    // coeffs[k] multiplies z^k; multiply in one linear factor at a time.
    std::vector<Complex> coeffs{Complex(1.0, 0.0)};
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        std::vector<Complex> next(coeffs.size() + 1, Complex(0.0, 0.0));
        for (std::size_t j = 0; j < coeffs.size(); ++j) {
            next[j + 1] += coeffs[j];
            next[j] -= values(k) * coeffs[j];
        }
        coeffs = std::move(next);
    }
    return coeffs;
}

AdmissibilityReport check_ph_admissible(const ComplexMatrix& h, double tol) {
    require_square_finite(h, "check_ph_admissible");
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(h, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericError("check_ph_admissible: eigenvalue iteration did not converge");
    }
    const ComplexVector values = solver.eigenvalues();
    const double scale = spectral_scale(values);
    const auto coeffs = characteristic_coefficients(values / scale);

    double max_mod = 0.0;
    double max_imag = 0.0;
    for (const auto& c : coeffs) {
        max_mod = std::max(max_mod, std::abs(c));
        max_imag = std::max(max_imag, std::abs(c.imag()));
    }
    AdmissibilityReport report;
    report.max_imag_coeff = max_imag / max_mod;
    report.is_ph = report.max_imag_coeff <= tol;
    return report;
}

Eigenpairs eigendecompose(const ComplexMatrix& h) {
    require_square_finite(h, "eigendecompose");
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(h, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        std::ostringstream os;
        os << "eigendecompose: complex Schur iteration did not converge (n = " << h.rows()
           << ", max iterations = "
           << Eigen::ComplexSchur<ComplexMatrix>::m_maxIterationsPerRow * h.rows() << ")";
        throw NumericError(os.str());
    }

    Eigenpairs out;
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
    if (!out.values.allFinite() || !out.vectors.allFinite()) {
        throw NumericError("eigendecompose: non-finite eigenpairs");
    }
    for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
        normalize_column(out.vectors.col(j));
    }

    Eigen::JacobiSVD<ComplexMatrix> svd(out.vectors);
    out.min_singular_value = svd.singularValues()(svd.singularValues().size() - 1);

    const double hnorm = h.norm();
    const double res = (h * out.vectors - out.vectors * out.values.asDiagonal()).norm();
    out.residual = hnorm > 0.0 ? res / hnorm : res;
    return out;
}

double spectral_scale(const ComplexVector& values) {
    double scale = 0.0;
    for (Eigen::Index k = 0; k < values.size(); ++k) scale = std::max(scale, std::abs(values(k)));
    return scale > 0.0 ? scale : 1.0;
}

SpectrumClassification classify_spectrum(const ComplexVector& values, double eps_real,
                                         double eps_pair) {
    if (!values.allFinite()) throw DimensionError("classify_spectrum: non-finite eigenvalue");
    const double scale = spectral_scale(values);

    SpectrumClassification cls;
    cls.eps_real = eps_real;
    cls.eps_pair = eps_pair;

    std::vector<std::size_t> upper;
    std::vector<std::size_t> lower;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        const double im = values(k).imag();
        const auto idx = static_cast<std::size_t>(k);
        if (std::abs(im) <= eps_real * scale) {
            cls.real_indices.push_back(idx);
        } else if (im > 0.0) {
            upper.push_back(idx);
        } else {
            lower.push_back(idx);
        }
    }
    if (upper.size() != lower.size()) {
        std::ostringstream os;
        os << "classify_spectrum: " << upper.size() << " eigenvalues with Im > 0 but "
           << lower.size() << " with Im < 0; no conjugate pairing exists";
        throw ClassificationError(os.str());
    }

    std::vector<bool> taken(lower.size(), false);
    for (std::size_t jp : upper) {
        const Complex target = std::conj(values(static_cast<Eigen::Index>(jp)));
        std::size_t best = lower.size();
        double best_dist = std::numeric_limits<double>::infinity();
        // `lower` is in index order, so strict < keeps the smaller index on ties.
        for (std::size_t c = 0; c < lower.size(); ++c) {
            if (taken[c]) continue;
            const double d = std::abs(values(static_cast<Eigen::Index>(lower[c])) - target);
            if (d < best_dist) {
                best_dist = d;
                best = c;
            }
        }
        if (best == lower.size() || best_dist > eps_pair * scale) {
            std::ostringstream os;
            os << "classify_spectrum: eigenvalue #" << jp << " = "
               << format_value(values(static_cast<Eigen::Index>(jp)))
               << " has no conjugate partner within " << eps_pair << " * " << scale;
            if (best != lower.size()) os << " (nearest distance " << best_dist << ")";
            throw ClassificationError(os.str());
        }
        taken[best] = true;
        cls.pair_indices.emplace_back(jp, lower[best]);
    }
    return cls;
}

double assert_nondegenerate(const ComplexVector& values, double gap_tol) {
    if (!values.allFinite()) throw DimensionError("assert_nondegenerate: non-finite eigenvalue");
    const double scale = spectral_scale(values);
    double min_gap = std::numeric_limits<double>::infinity();
    std::size_t worst_k = 0;
    std::size_t worst_l = 0;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        for (Eigen::Index l = k + 1; l < values.size(); ++l) {
            const double d = std::abs(values(k) - values(l));
            if (d < min_gap) {
                min_gap = d;
                worst_k = static_cast<std::size_t>(k);
                worst_l = static_cast<std::size_t>(l);
            }
        }
    }
    if (values.size() >= 2 && min_gap <= gap_tol * scale) {
        std::ostringstream os;
        os << "assert_nondegenerate: eigenvalues #" << worst_k << " = "
           << format_value(values(static_cast<Eigen::Index>(worst_k))) << " and #" << worst_l
           << " = " << format_value(values(static_cast<Eigen::Index>(worst_l)))
           << " are separated by " << min_gap << " <= " << gap_tol << " * " << scale;
        throw DegeneracyError(os.str(), worst_k, worst_l);
    }
    return min_gap;
}

SpectralData build_spectral_data(const ComplexMatrix& h, const SpectrumClassification& cls,
                                 const Eigenpairs& eig, double cond_cap) {
    require_square_finite(h, "build_spectral_data");
    const auto n = static_cast<std::size_t>(h.rows());
    if (static_cast<std::size_t>(eig.values.size()) != n || eig.vectors.rows() != h.rows() ||
        eig.vectors.cols() != h.cols()) {
        throw DimensionError("build_spectral_data: eigenpairs do not match H");
    }
    if (cls.r() + 2 * cls.p() != n) {
        throw DimensionError("build_spectral_data: classification does not cover every index");
    }
    std::vector<bool> seen(n, false);
    auto mark = [&](std::size_t i) {
        if (i >= n || seen[i]) {
            throw DimensionError("build_spectral_data: classification repeats or exceeds an index");
        }
        seen[i] = true;
    };
    for (auto i : cls.real_indices) mark(i);
    for (auto [a, b] : cls.pair_indices) {
        mark(a);
        mark(b);
    }

    const auto& raw = eig.values;
    auto at = [&](std::size_t i) { return raw(static_cast<Eigen::Index>(i)); };

    std::vector<std::size_t> reals = cls.real_indices;
    std::stable_sort(reals.begin(), reals.end(),
                     [&](std::size_t a, std::size_t b) { return at(a).real() < at(b).real(); });

    struct Pair {
        Complex z;
        std::size_t plus;
        std::size_t minus;
    };
    std::vector<Pair> pairs;
    pairs.reserve(cls.p());
    for (auto [jp, jm] : cls.pair_indices) {
        pairs.push_back({(at(jp) + std::conj(at(jm))) * 0.5, jp, jm});
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
        return a.z.imag() < b.z.imag();
    });

    SpectralData sd;
    sd.h = h;
    sd.r = cls.r();
    sd.p = cls.p();
    sd.lam.resize(static_cast<Eigen::Index>(n));
    sd.s_inv.resize(h.rows(), h.cols());

    double shift = 0.0;
    Eigen::Index col = 0;
    auto place = [&](std::size_t src, Complex value) {
        shift = std::max(shift, std::abs(value - at(src)));
        sd.lam(col) = value;
        sd.s_inv.col(col) = eig.vectors.col(static_cast<Eigen::Index>(src));
        ++col;
    };
    for (auto i : reals) place(i, Complex(at(i).real(), 0.0));
    for (const auto& pr : pairs) {
        place(pr.plus, pr.z);
        place(pr.minus, std::conj(pr.z));
    }
    sd.symmetrization_shift = shift;

    sd.cond_s = condition_number(sd.s_inv);
    if (!(sd.cond_s <= cond_cap)) {
        std::ostringstream os;
        os << "build_spectral_data: eigenvector matrix has condition number " << sd.cond_s
           << " above the cap " << cond_cap;
        throw IllConditionedError(os.str());
    }
    sd.s = sd.s_inv.partialPivLu().inverse();

    sd.min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < sd.lam.size(); ++k) {
        for (Eigen::Index l = k + 1; l < sd.lam.size(); ++l) {
            sd.min_gap = std::min(sd.min_gap, std::abs(sd.lam(k) - sd.lam(l)));
        }
    }
    if (!(sd.min_gap > 0.0)) {
        throw DegeneracyError("build_spectral_data: symmetrized spectrum is degenerate", 0, 0);
    }

    const double hnorm = h.norm();
    const double rec = (h - sd.s_inv * sd.lam.asDiagonal() * sd.s).norm();
    sd.reconstruction_residual = hnorm > 0.0 ? rec / hnorm : rec;
    return sd;
}

double biorthogonality_check(const SpectralData& sd) {
    const ComplexMatrix right = sd.s.partialPivLu().inverse();  // columns R_μ
    const ComplexMatrix left = sd.s.adjoint();                   // columns L_μ
    const ComplexMatrix gram = left.adjoint() * right;
    return (gram - ComplexMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

SpectralData analyze_spectrum(const ComplexMatrix& h, const SpectralOptions& opts) {
    require_square_finite(h, "analyze_spectrum");
    const auto admissible = check_ph_admissible(h, opts.ph_tol);
    if (!admissible.is_ph) {
        std::ostringstream os;
        os << "analyze_spectrum: characteristic polynomial has complex coefficients (relative "
              "imaginary part "
           << admissible.max_imag_coeff << " > " << opts.ph_tol << ")";
        throw ClassificationError(os.str());
    }
    const auto eig = eigendecompose(h);
    const auto cls = classify_spectrum(eig.values, opts.eps_real, opts.eps_pair);
    assert_nondegenerate(eig.values, opts.gap_tol);
    return build_spectral_data(h, cls, eig, opts.cond_cap);
}

}  // namespace phm
