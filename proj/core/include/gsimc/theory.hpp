#pragma once

#include "gsimc/kernels.hpp"
#include "gsimc/spectral.hpp"
#include "gsimc/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gsimc {

/// A unit-norm signal in PW_omega built from seeded Gaussian coefficients.
struct SyntheticSignal {
    Vector y;
    double omega = 0.0;
    std::uint64_t seed = kDefaultSeed;
};

/// Throws BandlimitError when no basis eigenvalue is <= omega.
SyntheticSignal synth_bandlimited(const SpectralBasis& basis, double omega, std::uint64_t seed);

/// 1 where y exceeds its q-quantile, 0 elsewhere.
Vector binarize_at_quantile(const Vector& y, double q = 0.5);

/// Observed sample s = y + xi where each 1 of y is flipped to 0 with
/// probability rho.
struct NoisySample {
    Vector s;
    double flip_rate = 0.0;
    Vector xi;  // entries in {-1, 0}
};

NoisySample flip_noise(const Vector& y_binary, double rho, std::uint64_t seed);

/// Smallest eigenvalue with R(lambda) > 1e-10. Throws BoundUndefinedError if
/// the penalty vanishes on the whole spectrum.
double select_lambda1(const KernelFamily& family, const Vector& eigenvalues);

/// Smallest basis eigenvalue omega with ||y - U_omega U_omega^T y|| <=
/// rel_tol ||y||. Throws BandlimitError if y is not in the span of the basis.
double effective_bandlimit(const SpectralBasis& basis, const Vector& y, double rel_tol = 1e-10);

/// Expected-MSE bound (C^2/n)(rho / (R1 (1 + R1/phi)^2) + 1/(4 phi)) with
/// C^2 = R(omega) ||y||^2 and R1 = R(lambda1). phi may be +infinity.
/// Throws BoundUndefinedError if R(lambda1) = 0.
double theorem2_bound(const KernelFamily& family, double rho, double phi, double lambda1,
                      double omega, double y_norm, std::size_t n);

/// The phi balancing the two bound terms: +infinity for rho <= 1/8, otherwise
/// R1 / (2 rho^{1/3} - 1).
double optimal_phi(const KernelFamily& family, double rho, double lambda1);

/// Bound at optimal_phi: C^2 rho / (R1 n) below rho = 1/8 and
/// C^2 (3 rho^{1/3} - 1) / (4 R1 n) from there on.
double optimal_bound(const KernelFamily& family, double rho, double lambda1, double omega,
                     double y_norm, std::size_t n);

struct Theorem2Config {
    std::vector<double> rho_grid = {0.0, 0.05, 0.125, 0.3};
    std::vector<double> phi_grid = {1.0, 10.0, 100.0};
    std::size_t trials = 2000;
    std::uint64_t seed = kDefaultSeed;
    /// The synthetic y is drawn in the band spanned by this fraction of the
    /// basis, then binarized at the median.
    double band_fraction = 0.3;
    std::size_t threads = 1;
};

struct Theorem2Row {
    double rho = 0.0;
    double phi = 0.0;
    double empirical_mse = 0.0;
    double mse_stderr = 0.0;
    double bound = 0.0;
    bool pass = false;

    [[nodiscard]] double margin() const { return bound - empirical_mse; }
};

struct Theorem2Report {
    std::vector<Theorem2Row> rows;
    double lambda1 = 0.0;
    double omega = 0.0;          // effective bandlimit of the binary signal
    double nominal_omega = 0.0;  // bandlimit of the real-valued draw
    double nominal_residual = 0.0;  // ||y - P_nominal y|| / ||y||
    double y_norm = 0.0;

    [[nodiscard]] bool all_pass() const;
};

/// Monte-Carlo check of the flip-noise bound for a given binary signal.
Theorem2Report verify_theorem2(const SpectralBasis& basis, const KernelFamily& family,
                               const Vector& y_binary, const Theorem2Config& config);
/// Draws the binary signal from `config` first.
Theorem2Report verify_theorem2(const SpectralBasis& basis, const KernelFamily& family,
                               const Theorem2Config& config);

/// 1 / sigma_min(L[:, omega_complement]); +infinity when the columns are
/// rank deficient. Throws PreconditionError unless the set is a nonempty
/// proper subset.
double poincare_constant(const Matrix& laplacian, std::span<const ItemRow> omega_complement);

/// Minimizes f^T R(L)^{2k} f subject to f = y on `omega` with the eigenvalue
/// floor 1e-10. `y_obs` is aligned with `omega`. Throws InterpolationError if
/// the reduced system is singular.
Vector variational_interpolate(const SpectralBasis& full_basis, const KernelFamily& family,
                               unsigned k_power, const Vector& y_obs,
                               std::span<const ItemRow> omega);
Vector variational_interpolate(const Matrix& laplacian, const KernelFamily& family,
                               unsigned k_power, const Vector& y_obs,
                               std::span<const ItemRow> omega);

struct Theorem1Row {
    unsigned k = 0;
    double error = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct Theorem1Report {
    bool applicable = false;  // Lambda R(omega) < 1
    double poincare = 0.0;
    double r_omega = 0.0;
    std::vector<Theorem1Row> rows;
    bool nonincreasing = false;

    [[nodiscard]] double contraction() const { return poincare * r_omega; }
    [[nodiscard]] bool all_pass() const;
};

/// Interpolates y from its values off `omega_complement` for each k and
/// compares against 2 (Lambda R(omega))^k ||y||. Rows are empty when the
/// hypothesis Lambda R(omega) < 1 fails.
Theorem1Report verify_theorem1(const Matrix& laplacian, const KernelFamily& family, double omega,
                               std::span<const ItemRow> omega_complement, const Vector& y,
                               std::span<const unsigned> k_powers);
/// Draws a unit-norm y in PW_omega with `seed` first.
Theorem1Report verify_theorem1(const Matrix& laplacian, const KernelFamily& family, double omega,
                               std::span<const ItemRow> omega_complement,
                               std::span<const unsigned> k_powers, std::uint64_t seed);

}  // namespace gsimc
