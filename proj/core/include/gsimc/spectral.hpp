#pragma once

#include "gsimc/graph.hpp"
#include "gsimc/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <variant>

namespace gsimc {

struct ExactMethod {
    friend bool operator==(const ExactMethod&, const ExactMethod&) = default;
};

/// Parameters of the randomized Nystrom approximation: l sampled columns,
/// rank k, oversampling p and q power iterations.
struct NystromParams {
    std::size_t columns = 0;
    std::size_t rank = 0;
    std::size_t oversampling = 10;
    std::size_t power_iterations = 2;
    std::uint64_t seed = kDefaultSeed;

    friend bool operator==(const NystromParams&, const NystromParams&) = default;
};

using BasisMethod = std::variant<ExactMethod, NystromParams>;

/// The k leading (smallest-eigenvalue) Laplacian eigenpairs. Eigenvalues are
/// ascending; each eigenvector's largest-magnitude entry is positive.
struct SpectralBasis {
    Vector eigenvalues;   // length k
    Matrix eigenvectors;  // n x k, orthonormal columns
    BasisMethod method = ExactMethod{};

    [[nodiscard]] std::size_t n() const { return static_cast<std::size_t>(eigenvectors.rows()); }
    [[nodiscard]] std::size_t k() const { return static_cast<std::size_t>(eigenvectors.cols()); }
};

/// The k algebraically smallest eigenpairs of a symmetric matrix via LAPACK
/// dsyevr. Throws NumericError if the solver fails.
SpectralBasis exact_eigs(const Matrix& laplacian, std::size_t k);
SpectralBasis exact_eigs(const Laplacian& laplacian, std::size_t k);

/// Randomized Nystrom eigendecomposition of the similarity kernel S = I - L.
///
/// Samples l columns uniformly without replacement to form C (n x l) and the
/// intersection A (l x l), forms W = A^{-1/2} C^T C A^{-1/2}, finds its
/// dominant (k+p)-dimensional range from W^q Omega with Gaussian Omega, solves
/// Z Q^T Omega = Q^T W Omega, and lifts the top-k eigenpairs of Z back with
/// C A^{-1/2} U_W Sigma_W^{-1/2}. Laplacian eigenvalues are 1 - sigma.
SpectralBasis nystrom_eigs(const Laplacian& laplacian, const NystromParams& params);
SpectralBasis nystrom_eigs(const Matrix& laplacian, const NystromParams& params);

/// Flips eigenvector signs so each column's largest-magnitude entry is positive.
void fix_signs(Matrix& eigenvectors);

/// Forward transform U_k^T f.
Vector gft(const SpectralBasis& basis, const Vector& f);
/// U_k^T s for the binary indicator s of `items`, in O(|items| k).
Vector gft_indicator(const SpectralBasis& basis, std::span<const ItemRow> items);
/// Inverse transform U_k c.
Vector igft(const SpectralBasis& basis, const Vector& coeffs);

/// Keeps the first `k` columns.
SpectralBasis truncate(const SpectralBasis& basis, std::size_t k);
/// Keeps the columns with eigenvalue <= omega (the Paley-Wiener space PW_omega).
SpectralBasis band(const SpectralBasis& basis, double omega);

/// ||f - U_w U_w^T f|| for the band-limited sub-basis at omega.
double bandlimit_residual(const SpectralBasis& basis, const Vector& f, double omega);
bool in_paley_wiener(const SpectralBasis& basis, const Vector& f, double omega, double tol = 1e-8);

/// max |U^T U - I|.
double orthonormality_error(const SpectralBasis& basis);

// Basis cache file: little-endian binary with magic, version, method metadata
// and the content hash of the source Laplacian.
void save_basis(const std::filesystem::path& path, const SpectralBasis& basis,
                std::uint64_t laplacian_hash);

struct LoadedBasis {
    SpectralBasis basis;
    std::uint64_t laplacian_hash = 0;
};
LoadedBasis load_basis(const std::filesystem::path& path);

}  // namespace gsimc
