#include "gsimc/graph.hpp"

#include "gsimc/errors.hpp"

#include <cmath>
#include <cstring>
#include <iomanip>
#include <ostream>
#include <string>

namespace gsimc {

std::string_view to_string(LaplacianKind kind) {
    return kind == LaplacianKind::Hypergraph ? "hypergraph" : "covariance";
}

LaplacianKind parse_laplacian_kind(std::string_view name) {
    if (name == "hypergraph") return LaplacianKind::Hypergraph;
    if (name == "covariance") return LaplacianKind::Covariance;
    throw PreconditionError("unknown graph kind '" + std::string(name) + "'");
}

Matrix Laplacian::similarity() const {
    return Matrix::Identity(matrix.rows(), matrix.cols()) - matrix;
}

Laplacian hypergraph_laplacian(const RatingMatrix& r) {
    const auto n = static_cast<Eigen::Index>(r.n_items);
    const auto m = static_cast<Eigen::Index>(r.n_users);

    Vector dv = r.entries * Vector::Ones(m);
    Vector de = r.entries.transpose() * Vector::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (dv[i] <= 0.0) throw DegenerateDegreeError("item row " + std::to_string(i) + " has zero degree");
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        if (de[j] <= 0.0) throw DegenerateDegreeError("user column " + std::to_string(j) + " has zero degree");
    }

    // S = B B^T with B = Dv^{-1/2} R De^{-1/2}, so S is PSD by construction.
    const Vector dv_isqrt = dv.cwiseSqrt().cwiseInverse();
    const Vector de_isqrt = de.cwiseSqrt().cwiseInverse();
    SparseMatrix b = dv_isqrt.asDiagonal() * r.entries * de_isqrt.asDiagonal();
    const SparseMatrix bt = b.transpose();
    Matrix s = Matrix(b * bt);

    Laplacian l;
    l.kind = LaplacianKind::Hypergraph;
    l.matrix = Matrix::Identity(n, n) - s;
    l.matrix = 0.5 * (l.matrix + l.matrix.transpose()).eval();
    return l;
}

Laplacian covariance_laplacian(const RatingMatrix& r) {
    const auto n = static_cast<Eigen::Index>(r.n_items);
    const auto m = static_cast<double>(r.n_users);
    if (n < 2) throw PreconditionError("covariance graph needs at least 2 items");

    const Vector mean = (r.entries * Vector::Ones(static_cast<Eigen::Index>(r.n_users))) / m;
    const SparseMatrix rt = r.entries.transpose();
    Matrix cov = Matrix(r.entries * rt) / m - mean * mean.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (cov(i, i) <= 1e-14) {
            throw DegenerateRowError("item row " + std::to_string(i) + " has zero variance");
        }
    }

    Matrix a = cov.cwiseMax(0.0);
    a.diagonal().setZero();
    const Vector deg = a.rowwise().sum();
    Vector isqrt(n);
    for (Eigen::Index i = 0; i < n; ++i) isqrt[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;

    Laplacian l;
    l.kind = LaplacianKind::Covariance;
    l.matrix = Matrix::Identity(n, n) - isqrt.asDiagonal() * a * isqrt.asDiagonal();
    l.matrix = 0.5 * (l.matrix + l.matrix.transpose()).eval();
    return l;
}

Laplacian build_laplacian(const RatingMatrix& r, LaplacianKind kind) {
    return kind == LaplacianKind::Hypergraph ? hypergraph_laplacian(r) : covariance_laplacian(r);
}

std::uint64_t content_hash(const Laplacian& l) {
    std::uint64_t h = 1469598103934665603ULL;
    const auto mix = [&h](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    const std::uint64_t rows = static_cast<std::uint64_t>(l.matrix.rows());
    const std::uint64_t kind = static_cast<std::uint64_t>(l.kind);
    mix(&rows, sizeof rows);
    mix(&kind, sizeof kind);
    mix(l.matrix.data(), static_cast<std::size_t>(l.matrix.size()) * sizeof(double));
    return h;
}

void write_matrix_market(std::ostream& out, const Laplacian& l, double drop_tol) {
    const auto n = l.matrix.rows();
    std::size_t nnz = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            if (std::abs(l.matrix(i, j)) > drop_tol) ++nnz;
        }
    }
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << "% " << to_string(l.kind) << " Laplacian\n";
    out << n << ' ' << n << ' ' << nnz << '\n';
    out << std::setprecision(17);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            const double v = l.matrix(i, j);
            if (std::abs(v) > drop_tol) out << (i + 1) << ' ' << (j + 1) << ' ' << v << '\n';
        }
    }
}

}  // namespace gsimc
