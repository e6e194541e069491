#pragma once

#include "gsimc/data.hpp"
#include "gsimc/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string_view>

namespace gsimc {

enum class LaplacianKind { Hypergraph, Covariance };

std::string_view to_string(LaplacianKind kind);
LaplacianKind parse_laplacian_kind(std::string_view name);

/// Symmetric PSD item-item Laplacian, stored dense.
struct Laplacian {
    LaplacianKind kind = LaplacianKind::Hypergraph;
    Matrix matrix;

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
    /// Similarity kernel I - L.
    [[nodiscard]] Matrix similarity() const;
};

/// L = I - Dv^{-1/2} R De^{-1} R^T Dv^{-1/2}, users acting as hyperedges over
/// items. Throws DegenerateDegreeError on an empty row or column.
Laplacian hypergraph_laplacian(const RatingMatrix& r);

/// L = I - Dv^{-1/2} A Dv^{-1/2} with A_ij = max(Cov(R_i, R_j), 0) for i != j
/// and A_ii = 0. Covariances are taken over the columns of R (train users).
/// Vertices whose weights are all clipped become isolated (identity rows).
/// Throws DegenerateRowError when a row has zero variance.
Laplacian covariance_laplacian(const RatingMatrix& r);

Laplacian build_laplacian(const RatingMatrix& r, LaplacianKind kind);

/// FNV-1a over the dimensions and raw matrix bytes; identifies a Laplacian in
/// basis cache files.
std::uint64_t content_hash(const Laplacian& l);

/// Matrix Market coordinate dump (symmetric, lower triangle). Entries with
/// magnitude <= drop_tol are omitted.
void write_matrix_market(std::ostream& out, const Laplacian& l, double drop_tol = 0.0);

}  // namespace gsimc
