#include "phm/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "phm/errors.hpp"
#include "phm/generators.hpp"

namespace phm {

namespace {

constexpr Complex kI(0.0, 1.0);

// Columns are vec(E_a) (column-major); unitary because the basis is trace-orthonormal.
ComplexMatrix stacked_basis(const HermitianBasis& basis) {
    const auto n2 = static_cast<Eigen::Index>(basis.n * basis.n);
    ComplexMatrix b(n2, static_cast<Eigen::Index>(basis.elements.size()));
    for (std::size_t a = 0; a < basis.elements.size(); ++a) {
        b.col(static_cast<Eigen::Index>(a)) = basis.elements[a].reshaped();
    }
    return b;
}

// Real-linear map (μ, Re τ, Im τ) ↦ coords(S† m S); columns follow r + 2p = n directions.
Eigen::MatrixXd family_generator(const SpectralData& sd, const HermitianBasis& basis) {
    const auto n = static_cast<Eigen::Index>(sd.n());
    Eigen::MatrixXd g(n * n, n);
    auto congruence = [&](const ComplexMatrix& m) -> ComplexMatrix {
        return hermitian_part(sd.s.adjoint() * m * sd.s);
    };
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < sd.r; ++i) {
        ComplexMatrix m = ComplexMatrix::Zero(n, n);
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
        g.col(col++) = hermitian_coordinates(basis, congruence(m));
    }
    for (std::size_t s = 0; s < sd.p; ++s) {
        const auto k = static_cast<Eigen::Index>(sd.r + 2 * s);
        for (Complex unit : {Complex(1.0, 0.0), kI}) {
            ComplexMatrix m = ComplexMatrix::Zero(n, n);
            m.block<2, 2>(k, k) = pair_block(unit);
            g.col(col++) = hermitian_coordinates(basis, congruence(m));
        }
    }
    return g;
}

}  // namespace

HermitianBasis hermitian_basis(std::size_t n) {
    if (n == 0) throw DimensionError("hermitian_basis: n must be positive");
    HermitianBasis basis;
    basis.n = n;
    basis.elements.reserve(n * n);
    const auto dim = static_cast<Eigen::Index>(n);
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    for (Eigen::Index k = 0; k < dim; ++k) {
        ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
        e(k, k) = 1.0;
        basis.elements.push_back(std::move(e));
    }
    for (Eigen::Index k = 0; k < dim; ++k) {
        for (Eigen::Index l = k + 1; l < dim; ++l) {
            ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
            e(k, l) = e(l, k) = inv_sqrt2;
            basis.elements.push_back(std::move(e));
        }
    }
    for (Eigen::Index k = 0; k < dim; ++k) {
        for (Eigen::Index l = k + 1; l < dim; ++l) {
            ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
            e(k, l) = kI * inv_sqrt2;
            e(l, k) = -kI * inv_sqrt2;
            basis.elements.push_back(std::move(e));
        }
    }
    return basis;
}

Eigen::VectorXd hermitian_coordinates(const HermitianBasis& basis, const ComplexMatrix& x) {
    if (x.rows() != static_cast<Eigen::Index>(basis.n) || x.cols() != x.rows()) {
        throw DimensionError("hermitian_coordinates: dimension mismatch");
    }
    Eigen::VectorXd c(static_cast<Eigen::Index>(basis.elements.size()));
    for (std::size_t a = 0; a < basis.elements.size(); ++a) {
        c(static_cast<Eigen::Index>(a)) = (basis.elements[a] * x).trace().real();
    }
    return c;
}

ComplexMatrix from_coordinates(const HermitianBasis& basis, const Eigen::VectorXd& coords) {
    if (static_cast<std::size_t>(coords.size()) != basis.elements.size()) {
        throw DimensionError("from_coordinates: dimension mismatch");
    }
    const auto dim = static_cast<Eigen::Index>(basis.n);
    ComplexMatrix x = ComplexMatrix::Zero(dim, dim);
    for (std::size_t a = 0; a < basis.elements.size(); ++a) {
        x += coords(static_cast<Eigen::Index>(a)) * basis.elements[a];
    }
    return x;
}

Eigen::MatrixXd intertwining_operator_matrix(const ComplexMatrix& h, const HermitianBasis& basis) {
    require_square_finite(h, "intertwining_operator_matrix");
    if (static_cast<std::size_t>(h.rows()) != basis.n) {
        throw DimensionError("intertwining_operator_matrix: basis dimension differs from H");
    }
    const auto n = h.rows();
    // vec(H†E − EH) = (I ⊗ H† − Hᵀ ⊗ I) vec(E) for column-major vec.
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix hadj = h.adjoint();
    ComplexMatrix op = ComplexMatrix::Zero(n * n, n * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index l = 0; l < n; ++l) {
            // block (j, l) of I⊗H† − Hᵀ⊗I is δ_jl H† − H_lj I
            auto blk = op.block(j * n, l * n, n, n);
            if (j == l) blk += hadj;
            blk -= h(l, j) * id;
        }
    }
    const ComplexMatrix b = stacked_basis(basis);
    // Coordinates of an anti-hermitian X in {iE_a} are Tr(E_a (−iX)) = ⟨vec E_a, vec(−iX)⟩.
    return (b.adjoint() * (-kI) * op * b).real();
}

Eigen::MatrixXd intertwining_operator_matrix(const ComplexMatrix& h) {
    require_square_finite(h, "intertwining_operator_matrix");
    return intertwining_operator_matrix(h, hermitian_basis(static_cast<std::size_t>(h.rows())));
}

KernelReport solution_space(const ComplexMatrix& h, double rank_tol) {
    require_square_finite(h, "solution_space");
    const auto n = static_cast<std::size_t>(h.rows());
    if (n > kOracleMaxDimension) {
        throw DimensionError("solution_space: n = " + std::to_string(n) +
                             " exceeds the oracle limit of " +
                             std::to_string(kOracleMaxDimension));
    }
    const HermitianBasis basis = hermitian_basis(n);
    const Eigen::MatrixXd l = intertwining_operator_matrix(h, basis);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(l, Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) throw NumericError("solution_space: SVD did not converge");
    const Eigen::VectorXd sv = svd.singularValues();  // descending
    const Eigen::MatrixXd& v = svd.matrixV();
    const auto total = sv.size();

    KernelReport report;
    report.rank_tol = rank_tol;
    report.singular_values.resize(static_cast<std::size_t>(total));
    for (Eigen::Index k = 0; k < total; ++k) {
        report.singular_values[static_cast<std::size_t>(k)] = sv(total - 1 - k);
    }

    const double sigma_max = sv(0);
    const double cutoff = rank_tol * sigma_max;
    std::size_t dim = 0;
    for (double s : report.singular_values) {
        if (s <= cutoff) ++dim;
    }
    report.dimension = dim;

    const double inf = std::numeric_limits<double>::infinity();
    if (dim == 0 || dim == report.singular_values.size()) {
        report.gap_ratio = inf;
    } else {
        const double below = report.singular_values[dim - 1];
        const double above = report.singular_values[dim];
        report.gap_ratio = below > 0.0 ? above / below : inf;
    }
    if (report.gap_ratio < kRankAmbiguityRatio) {
        std::ostringstream os;
        os << "numerical rank is ambiguous: gap ratio " << report.gap_ratio << " < "
           << kRankAmbiguityRatio;
        report.warning = os.str();
    }

    report.basis.reserve(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        const Eigen::VectorXd coords = v.col(total - 1 - static_cast<Eigen::Index>(k));
        report.basis.push_back(from_coordinates(basis, coords));
    }
    return report;
}

FamilyMatch family_vs_kernel(const SpectralData& sd, const KernelReport& report,
                             std::uint64_t seed, std::size_t samples) {
    const std::size_t n = sd.n();
    if (report.dimension != sd.r + 2 * sd.p) {
        std::ostringstream os;
        os << "family_vs_kernel: kernel dimension " << report.dimension
           << " differs from the family dimension r + 2p = " << sd.r + 2 * sd.p;
        throw FamilyIncompleteError(os.str());
    }
    if (!report.basis.empty() && static_cast<std::size_t>(report.basis.front().rows()) != n) {
        throw DimensionError("family_vs_kernel: kernel report belongs to a different H");
    }
    const HermitianBasis basis = hermitian_basis(n);

    Eigen::MatrixXd kernel(static_cast<Eigen::Index>(n * n),
                           static_cast<Eigen::Index>(report.dimension));
    for (std::size_t k = 0; k < report.dimension; ++k) {
        kernel.col(static_cast<Eigen::Index>(k)) = hermitian_coordinates(basis, report.basis[k]);
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> kernel_qr(kernel);
    const Eigen::MatrixXd kernel_q =
        kernel_qr.householderQ() *
        Eigen::MatrixXd::Identity(kernel.rows(), kernel.cols());

    FamilyMatch match;
    Rng rng(seed);
    for (std::size_t t = 0; t < samples; ++t) {
        const MetricParameters params = random_metric_parameters(sd.r, sd.p, rng);
        const Eigen::VectorXd c = hermitian_coordinates(basis, build_M(sd, params).m);
        const Eigen::VectorXd resid = c - kernel_q * (kernel_q.transpose() * c);
        match.max_projection_defect = std::max(match.max_projection_defect, resid.norm() / c.norm());
    }

    const Eigen::MatrixXd g = family_generator(sd, basis);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> g_qr(g);
    for (std::size_t k = 0; k < report.dimension; ++k) {
        const Eigen::VectorXd target = kernel.col(static_cast<Eigen::Index>(k));
        const Eigen::VectorXd x = g_qr.solve(target);
        match.max_recovery_defect =
            std::max(match.max_recovery_defect, (g * x - target).norm() / target.norm());

        MetricParameters params;
        Eigen::Index idx = 0;
        for (std::size_t i = 0; i < sd.r; ++i) params.mu.push_back(x(idx++));
        for (std::size_t s = 0; s < sd.p; ++s) {
            const double re = x(idx++);
            const double im = x(idx++);
            params.tau.emplace_back(re, im);
        }
        match.recovered.push_back(std::move(params));
    }
    match.params_recovered = match.max_recovery_defect <= kFamilyMatchTol;
    return match;
}

}  // namespace phm
