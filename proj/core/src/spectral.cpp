#include "gsimc/spectral.hpp"

#include "gsimc/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace gsimc {

namespace {

void require_square_symmetric(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("Laplacian must be square");
}

// Orthonormal basis of range(y) via Householder QR.
Matrix thin_q(const Matrix& y) {
    Eigen::HouseholderQR<Matrix> qr(y);
    return qr.householderQ() * Matrix::Identity(y.rows(), y.cols());
}

}  // namespace

void fix_signs(Matrix& eigenvectors) {
    for (Eigen::Index j = 0; j < eigenvectors.cols(); ++j) {
        Eigen::Index arg = 0;
        eigenvectors.col(j).cwiseAbs().maxCoeff(&arg);
        if (eigenvectors(arg, j) < 0.0) eigenvectors.col(j) *= -1.0;
    }
}

SpectralBasis exact_eigs(const Matrix& laplacian, std::size_t k) {
    require_square_symmetric(laplacian);
    const auto n = static_cast<lapack_int>(laplacian.rows());
    if (k < 1 || k > static_cast<std::size_t>(n)) {
        throw PreconditionError("exact_eigs needs 1 <= k <= n (k=" + std::to_string(k) +
                                ", n=" + std::to_string(n) + ")");
    }

    Matrix a = laplacian;  // dsyevr destroys its input
    Vector w(n);
    Matrix z(n, static_cast<Eigen::Index>(k));
    std::vector<lapack_int> support(2 * k);
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dsyevr(
        LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, 1,
        static_cast<lapack_int>(k), 0.0, &found, w.data(), z.data(), n, support.data());
    if (info != 0 || found != static_cast<lapack_int>(k)) {
        throw NumericError("dsyevr failed (info=" + std::to_string(info) + ", found " +
                           std::to_string(found) + " of " + std::to_string(k) + " eigenpairs)");
    }

    SpectralBasis basis;
    basis.eigenvalues = w.head(static_cast<Eigen::Index>(k));
    basis.eigenvectors = std::move(z);
    basis.method = ExactMethod{};
    fix_signs(basis.eigenvectors);
    return basis;
}

SpectralBasis exact_eigs(const Laplacian& laplacian, std::size_t k) {
    return exact_eigs(laplacian.matrix, k);
}

SpectralBasis nystrom_eigs(const Matrix& laplacian, const NystromParams& params) {
    require_square_symmetric(laplacian);
    const auto n = static_cast<std::size_t>(laplacian.rows());
    const std::size_t l = params.columns;
    const std::size_t k = params.rank;
    const std::size_t kp = k + params.oversampling;
    if (k < 1 || kp > l || l > n) {
        throw PreconditionError("nystrom_eigs needs k >= 1 and k + p <= l <= n (k=" + std::to_string(k) +
                                ", p=" + std::to_string(params.oversampling) + ", l=" + std::to_string(l) +
                                ", n=" + std::to_string(n) + ")");
    }
    const auto li = static_cast<Eigen::Index>(l);
    const auto ki = static_cast<Eigen::Index>(k);
    const auto kpi = static_cast<Eigen::Index>(kp);

    std::mt19937_64 rng(params.seed);

    // Uniform column sample without replacement (partial Fisher-Yates).
    std::vector<Eigen::Index> perm(n);
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    for (std::size_t i = 0; i < l; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(perm[i], perm[pick(rng)]);
    }
    std::vector<Eigen::Index> idx(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(l));
    std::sort(idx.begin(), idx.end());

    // C = S(:, idx) with S = I - L; A = C(idx, :).
    Matrix c(static_cast<Eigen::Index>(n), li);
    for (Eigen::Index j = 0; j < li; ++j) {
        c.col(j) = -laplacian.col(idx[static_cast<std::size_t>(j)]);
        c(idx[static_cast<std::size_t>(j)], j) += 1.0;
    }
    Matrix a(li, li);
    for (Eigen::Index i = 0; i < li; ++i) a.row(i) = c.row(idx[static_cast<std::size_t>(i)]);
    a = 0.5 * (a + a.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> eig_a(a);
    if (eig_a.info() != Eigen::Success) throw NumericError("eigendecomposition of A failed");
    const Vector& ea = eig_a.eigenvalues();
    const double floor = 1e-10 * std::max(ea.cwiseAbs().maxCoeff(), 1e-300);
    Vector inv_sqrt(li);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < li; ++i) {
        if (ea[i] > floor) {
            inv_sqrt[i] = 1.0 / std::sqrt(ea[i]);
            ++rank;
        } else {
            inv_sqrt[i] = 0.0;
        }
    }
    if (rank < k) {
        throw RankDeficiencyError("sampled block A has numerical rank " + std::to_string(rank) +
                                  " < k=" + std::to_string(k) + "; increase the number of sampled columns l");
    }
    const Matrix a_isqrt = eig_a.eigenvectors() * inv_sqrt.asDiagonal() * eig_a.eigenvectors().transpose();

    const Matrix g = c * a_isqrt;  // S ~ G G^T
    Matrix w = g.transpose() * g;
    w = 0.5 * (w + w.transpose()).eval();

    // Range finder on W^q Omega.
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix omega(li, kpi);
    for (Eigen::Index j = 0; j < kpi; ++j) {
        for (Eigen::Index i = 0; i < li; ++i) omega(i, j) = normal(rng);
    }
    Matrix y = omega;
    for (std::size_t it = 0; it < params.power_iterations; ++it) y = thin_q(w * y);
    const Matrix q = thin_q(y);

    // Z (Q^T Omega) = Q^T W Omega.
    const Matrix qt_omega = q.transpose() * omega;
    const Matrix qt_w_omega = q.transpose() * w * omega;
    Eigen::FullPivLU<Matrix> lu(qt_omega.transpose());
    if (!lu.isInvertible()) throw NumericError("Q^T Omega is singular; change the seed or oversampling");
    const Matrix z = lu.solve(qt_w_omega.transpose()).transpose();

    Eigen::EigenSolver<Matrix> eig_z(z);
    if (eig_z.info() != Eigen::Success) throw NumericError("eigendecomposition of Z failed");
    const Eigen::VectorXcd ez = eig_z.eigenvalues();
    const double scale = std::max(ez.cwiseAbs().maxCoeff(), 1e-300);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(kpi));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y2) { return ez[x].real() > ez[y2].real(); });
    for (std::size_t i = 0; i < k; ++i) {
        const auto& v = ez[order[i]];
        if (std::abs(v.imag()) > 1e-6 * scale) {
            throw NumericError("Z has a complex eigenvalue (" + std::to_string(v.real()) + " + " +
                               std::to_string(v.imag()) + "i) among the leading k");
        }
    }

    Matrix uz(kpi, ki);
    Vector sigma(ki);
    for (Eigen::Index j = 0; j < ki; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        sigma[j] = ez[src].real();
        uz.col(j) = eig_z.eigenvectors().col(src).real();
        const double nrm = uz.col(j).norm();
        if (nrm > 0.0) uz.col(j) /= nrm;
    }
    const Matrix uw = q * uz;

    const double sigma_floor = 1e-10 * std::max(std::abs(sigma[0]), 1e-300);
    Matrix u(static_cast<Eigen::Index>(n), ki);
    for (Eigen::Index j = 0; j < ki; ++j) {
        if (sigma[j] > sigma_floor) {
            u.col(j) = g * uw.col(j) / std::sqrt(sigma[j]);
            continue;
        }
        // No similarity mass: embed on the sampled coordinates and orthogonalize.
        Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < li; ++i) v[idx[static_cast<std::size_t>(i)]] = uw(i, j);
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index p = 0; p < j; ++p) v -= u.col(p).dot(v) * u.col(p);
        }
        for (Eigen::Index e = 0; v.norm() < 1e-8 && e < static_cast<Eigen::Index>(n); ++e) {
            v = Vector::Unit(static_cast<Eigen::Index>(n), e);
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index p = 0; p < j; ++p) v -= u.col(p).dot(v) * u.col(p);
            }
        }
        u.col(j) = v.normalized();
        sigma[j] = std::max(sigma[j], 0.0);
    }

    SpectralBasis basis;
    basis.eigenvalues = (Vector::Ones(ki) - sigma);
    basis.eigenvectors = std::move(u);
    basis.method = params;
    fix_signs(basis.eigenvectors);
    return basis;
}

SpectralBasis nystrom_eigs(const Laplacian& laplacian, const NystromParams& params) {
    return nystrom_eigs(laplacian.matrix, params);
}

Vector gft(const SpectralBasis& basis, const Vector& f) {
    if (static_cast<std::size_t>(f.size()) != basis.n()) {
        throw DimensionError("gft: signal length " + std::to_string(f.size()) + " != n=" +
                             std::to_string(basis.n()));
    }
    return basis.eigenvectors.transpose() * f;
}

Vector gft_indicator(const SpectralBasis& basis, std::span<const ItemRow> items) {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(basis.k()));
    for (const auto i : items) {
        if (i >= basis.n()) throw DimensionError("gft_indicator: item row out of range");
        out += basis.eigenvectors.row(static_cast<Eigen::Index>(i)).transpose();
    }
    return out;
}

Vector igft(const SpectralBasis& basis, const Vector& coeffs) {
    if (static_cast<std::size_t>(coeffs.size()) != basis.k()) {
        throw DimensionError("igft: coefficient length " + std::to_string(coeffs.size()) + " != k=" +
                             std::to_string(basis.k()));
    }
    return basis.eigenvectors * coeffs;
}

SpectralBasis truncate(const SpectralBasis& basis, std::size_t k) {
    if (k > basis.k()) throw PreconditionError("truncate: k exceeds basis size");
    SpectralBasis out;
    out.eigenvalues = basis.eigenvalues.head(static_cast<Eigen::Index>(k));
    out.eigenvectors = basis.eigenvectors.leftCols(static_cast<Eigen::Index>(k));
    out.method = basis.method;
    return out;
}

SpectralBasis band(const SpectralBasis& basis, double omega) {
    // Eigenvalues carry solver round-off; a bandlimit placed exactly on one keeps it.
    constexpr double kSlack = 1e-10;
    std::size_t count = 0;
    while (count < basis.k() && basis.eigenvalues[static_cast<Eigen::Index>(count)] <= omega + kSlack) ++count;
    return truncate(basis, count);
}

double bandlimit_residual(const SpectralBasis& basis, const Vector& f, double omega) {
    const auto sub = band(basis, omega);
    if (sub.k() == 0) return f.norm();
    return (f - sub.eigenvectors * (sub.eigenvectors.transpose() * f)).norm();
}

bool in_paley_wiener(const SpectralBasis& basis, const Vector& f, double omega, double tol) {
    return bandlimit_residual(basis, f, omega) <= tol;
}

double orthonormality_error(const SpectralBasis& basis) {
    const Matrix gram = basis.eigenvectors.transpose() * basis.eigenvectors;
    return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace gsimc
