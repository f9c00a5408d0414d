#include "phm/metric_family.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "phm/errors.hpp"

namespace phm {

namespace {

constexpr Complex kI(0.0, 1.0);

void require_params(const MetricParameters& params, std::size_t r, std::size_t p,
                    const char* where) {
    if (params.mu.size() != r || params.tau.size() != p) {
        std::ostringstream os;
        os << where << ": expected " << r << " real and " << p << " complex parameters, got "
           << params.mu.size() << " and " << params.tau.size();
        throw InvalidParameterError(os.str());
    }
    for (std::size_t i = 0; i < r; ++i) {
        if (!std::isfinite(params.mu[i]) || params.mu[i] == 0.0) {
            throw InvalidParameterError(std::string(where) + ": mu[" + std::to_string(i) +
                                        "] must be finite and nonzero");
        }
    }
    for (std::size_t s = 0; s < p; ++s) {
        const Complex t = params.tau[s];
        if (!std::isfinite(t.real()) || !std::isfinite(t.imag()) || t == Complex(0.0, 0.0)) {
            throw InvalidParameterError(std::string(where) + ": tau[" + std::to_string(s) +
                                        "] must be finite and nonzero");
        }
    }
}

void require_class(const SpectralData& sd, const CanonicalClass& cls) {
    if (cls.signs.size() != sd.r || cls.n.size() != sd.p || cls.theta.size() != sd.p) {
        std::ostringstream os;
        os << "canonical_metric: class has " << cls.signs.size() << " signs, " << cls.n.size()
           << " bits and " << cls.theta.size() << " phases; spectrum needs r = " << sd.r
           << ", p = " << sd.p;
        throw DimensionError(os.str());
    }
    for (double t : cls.theta) {
        if (!std::isfinite(t)) throw InvalidParameterError("canonical_metric: non-finite phase");
    }
}

// exp(iφσ_z)
Matrix2c exp_i_sigma_z(double phi) {
    Matrix2c out = Matrix2c::Zero();
    out(0, 0) = std::polar(1.0, phi);
    out(1, 1) = std::polar(1.0, -phi);
    return out;
}

// exp(iφσ_y) = cos φ + i sin φ σ_y
Matrix2c exp_i_sigma_y(double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    Matrix2c out;
    out << c, s, -s, c;
    return out;
}

MetricResult finish(const SpectralData& sd, ComplexMatrix m) {
    MetricResult out;
    out.m = hermitian_part(m);
    out.residual = intertwining_residual(sd.h, out.m);
    out.inertia = inertia_of_matrix(out.m);
    return out;
}

}  // namespace

MetricParameters MetricParameters::operator-() const {
    MetricParameters out = *this;
    for (auto& v : out.mu) v = -v;
    for (auto& t : out.tau) t = -t;
    return out;
}

double wrap_phase(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(theta, two_pi);
    if (w < 0.0) w += two_pi;
    if (w >= two_pi) w = 0.0;  // fmod rounding at −0 or tiny negatives
    return w;
}

Matrix2c pair_block(Complex tau) {
    Matrix2c b;
    b << Complex(0.0, 0.0), std::conj(tau), tau, Complex(0.0, 0.0);
    return b;
}

ComplexMatrix build_m(const MetricParameters& params, std::size_t r, std::size_t p) {
    require_params(params, r, p, "build_m");
    const auto n = static_cast<Eigen::Index>(r + 2 * p);
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < r; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        m(k, k) = params.mu[i];
    }
    for (std::size_t s = 0; s < p; ++s) {
        const auto k = static_cast<Eigen::Index>(r + 2 * s);
        m.block<2, 2>(k, k) = pair_block(params.tau[s]);
    }
    return m;
}

MetricResult build_M(const SpectralData& sd, const MetricParameters& params) {
    const ComplexMatrix m = build_m(params, sd.r, sd.p);
    if (m.rows() != sd.s.rows()) throw DimensionError("build_M: parameters do not match S");
    return finish(sd, sd.s.adjoint() * m * sd.s);
}

ComplexMatrix intertwining_residual_matrix(const ComplexMatrix& h, const ComplexMatrix& m) {
    if (h.rows() != h.cols() || m.rows() != m.cols() || h.rows() != m.rows()) {
        throw DimensionError("intertwining residual: H and M must be square of equal size");
    }
    return h.adjoint() * m - m * h;
}

double intertwining_residual(const ComplexMatrix& h, const ComplexMatrix& m, double herm_tol) {
    const ComplexMatrix res = intertwining_residual_matrix(h, m);
    const double mnorm = m.norm();
    const double herm = (m - m.adjoint()).norm();
    if (herm > herm_tol * mnorm) {
        std::ostringstream os;
        os << "intertwining_residual: M is not hermitian (‖M − M†‖ / ‖M‖ = " << herm / mnorm
           << ")";
        throw ContractViolation(os.str());
    }

    // R + R† = H†(M − M†) − (M − M†)H, so it is bounded by the hermiticity defect.
    const double hnorm = h.norm();
    const double anti = (res + res.adjoint()).norm();
    const double eps = std::numeric_limits<double>::epsilon();
    const double bound = 2.0 * hnorm * herm +
                         64.0 * static_cast<double>(h.rows()) * eps * hnorm * mnorm;
    if (anti > bound) {
        std::ostringstream os;
        os << "intertwining_residual: residual matrix is not anti-hermitian (" << anti << " > "
           << bound << ")";
        throw NumericError(os.str());
    }

    const double denom = hnorm * mnorm;
    return denom > 0.0 ? res.norm() / denom : res.norm();
}

Complex m_inner_product(const ComplexMatrix& m, const ComplexVector& a, const ComplexVector& b) {
    if (m.rows() != m.cols() || a.size() != m.rows() || b.size() != m.rows()) {
        throw DimensionError("m_inner_product: dimension mismatch");
    }
    return a.dot(m * b);
}

Matrix2c block_rotation(Complex tau, int n_bit) {
    if (tau == Complex(0.0, 0.0) || !std::isfinite(std::abs(tau))) {
        throw InvalidParameterError("block_rotation: tau must be finite and nonzero");
    }
    if (n_bit != 0 && n_bit != 1) throw InvalidParameterError("block_rotation: n must be 0 or 1");
    const Matrix2c u = exp_i_sigma_y(std::numbers::pi / 4.0) * exp_i_sigma_z(std::arg(tau) / 2.0);
    return u * exp_i_sigma_z(n_bit * std::numbers::pi / 2.0);
}

ComplexMatrix build_m0(const std::vector<int>& signs, const std::vector<int>& n_bits) {
    const auto r = signs.size();
    const auto n = static_cast<Eigen::Index>(r + 2 * n_bits.size());
    ComplexMatrix m0 = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < r; ++i) {
        if (signs[i] != 1 && signs[i] != -1) {
            throw InvalidParameterError("build_m0: signs must be +1 or -1");
        }
        const auto k = static_cast<Eigen::Index>(i);
        m0(k, k) = static_cast<double>(signs[i]);
    }
    for (std::size_t s = 0; s < n_bits.size(); ++s) {
        if (n_bits[s] != 0 && n_bits[s] != 1) {
            throw InvalidParameterError("build_m0: n bits must be 0 or 1");
        }
        const auto k = static_cast<Eigen::Index>(r + 2 * s);
        const double sign = n_bits[s] == 0 ? 1.0 : -1.0;
        m0(k, k) = sign;
        m0(k + 1, k + 1) = -sign;
    }
    return m0;
}

MetricResult canonical_metric(const SpectralData& sd, const CanonicalClass& cls) {
    require_class(sd, cls);
    const ComplexMatrix m0 = build_m0(cls.signs, cls.n);

    const auto n = static_cast<Eigen::Index>(sd.n());
    ComplexMatrix unitary = ComplexMatrix::Identity(n, n);
    for (std::size_t s = 0; s < sd.p; ++s) {
        const auto k = static_cast<Eigen::Index>(sd.r + 2 * s);
        // U_s depends on τ only through its phase.
        unitary.block<2, 2>(k, k) = block_rotation(std::polar(1.0, wrap_phase(cls.theta[s])), 0);
    }
    const ComplexMatrix us = unitary * sd.s;
    return finish(sd, us.adjoint() * m0 * us);
}

GaugeAbsorption gauge_absorb(const SpectralData& sd, const MetricParameters& params) {
    require_params(params, sd.r, sd.p, "gauge_absorb");
    const auto n = static_cast<Eigen::Index>(sd.n());
    Eigen::VectorXd d0(n);
    GaugeAbsorption out;
    out.cls.signs.reserve(sd.r);
    for (std::size_t i = 0; i < sd.r; ++i) {
        d0(static_cast<Eigen::Index>(i)) = std::sqrt(std::abs(params.mu[i]));
        out.cls.signs.push_back(params.mu[i] > 0.0 ? 1 : -1);
    }
    for (std::size_t s = 0; s < sd.p; ++s) {
        const auto k = static_cast<Eigen::Index>(sd.r + 2 * s);
        d0(k) = d0(k + 1) = std::sqrt(std::abs(params.tau[s]));
        out.cls.n.push_back(0);
        out.cls.theta.push_back(wrap_phase(std::arg(params.tau[s])));
    }

    out.sd = sd;
    out.sd.s = d0.cast<Complex>().asDiagonal() * sd.s;
    out.sd.s_inv = sd.s_inv * d0.cwiseInverse().cast<Complex>().asDiagonal();
    out.sd.cond_s = condition_number(out.sd.s);
    const double hnorm = sd.h.norm();
    const double rec = (sd.h - out.sd.s_inv * sd.lam.asDiagonal() * out.sd.s).norm();
    out.sd.reconstruction_residual = hnorm > 0.0 ? rec / hnorm : rec;
    return out;
}

Inertia inertia_of_params(const MetricParameters& params, std::size_t p) {
    Inertia out;
    out.positive = out.negative = static_cast<int>(p);
    for (double v : params.mu) {
        if (v > 0.0) ++out.positive;
        if (v < 0.0) ++out.negative;
    }
    return out;
}

Inertia inertia_of_matrix(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols()) throw DimensionError("inertia_of_matrix: matrix is not square");
    if (hermiticity_defect(m) > kDefaultHermitianTol) {
        throw ContractViolation("inertia_of_matrix: matrix is not hermitian");
    }
    Inertia out;
    if (m.rows() == 0) return out;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m),
                                                        Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError("inertia_of_matrix: hermitian eigensolver did not converge");
    }
    const auto& ev = solver.eigenvalues();
    const double threshold = tol * ev.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        if (ev(k) > threshold) {
            ++out.positive;
        } else if (ev(k) < -threshold) {
            ++out.negative;
        } else {
            ++out.zero;
        }
    }
    return out;
}

std::uint64_t class_count(std::size_t r, std::size_t p, bool mod_global) {
    const std::size_t bits = r + p;
    if (bits > kMaxEnumerationBits) {
        throw CountOverflowError("class_count: r + p = " + std::to_string(bits) +
                                 " exceeds the limit of " + std::to_string(kMaxEnumerationBits));
    }
    if (bits == 0) return 1;
    return std::uint64_t{1} << (mod_global ? bits - 1 : bits);
}

std::vector<ClassAssignment> enumerate_classes(std::size_t r, std::size_t p, bool mod_global) {
    const std::uint64_t count = class_count(r, p, mod_global);
    const std::size_t bits = r + p;
    std::vector<ClassAssignment> out;
    out.reserve(static_cast<std::size_t>(count));
    // Component j reads bit (bits − 1 − j), so counting up is lexicographic order. The
    // representatives with leading bit 0 are exactly the first half of that order.
    for (std::uint64_t code = 0; code < count; ++code) {
        ClassAssignment a;
        a.signs.reserve(r);
        a.n.reserve(p);
        for (std::size_t j = 0; j < bits; ++j) {
            const int bit = static_cast<int>((code >> (bits - 1 - j)) & 1u);
            if (j < r) {
                a.signs.push_back(bit == 0 ? 1 : -1);
            } else {
                a.n.push_back(bit);
            }
        }
        out.push_back(std::move(a));
    }
    return out;
}

MetricResult sqh_factorization(const SpectralData& sd) {
    if (sd.p != 0) {
        throw NotSqhError("sqh_factorization: spectrum has " + std::to_string(sd.p) +
                          " complex pair(s); every compatible metric has at least that many "
                          "negative eigenvalues");
    }
    return finish(sd, sd.s.adjoint() * sd.s);
}

}  // namespace phm
