#include "gsimc/theory.hpp"

#include "gsimc/errors.hpp"
#include "gsimc/parallel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace gsimc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPenaltyFloor = 1e-10;

double finite_penalty(const KernelFamily& family, double lambda, const char* where) {
    const auto r = r_value(family, lambda);
    if (r.infinite) {
        throw PreconditionError(std::string(where) + ": penalty is infinite at lambda=" +
                                std::to_string(lambda));
    }
    return r.value;
}

/// Independent stream per (seed, a, b) so Monte-Carlo trials do not depend on
/// scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::vector<ItemRow> complement_of(std::span<const ItemRow> set, std::size_t n) {
    std::vector<char> in(n, 0);
    for (const auto v : set) {
        if (v >= n) throw DimensionError("vertex " + std::to_string(v) + " out of range");
        if (in[v]) throw PreconditionError("vertex " + std::to_string(v) + " listed twice");
        in[v] = 1;
    }
    std::vector<ItemRow> out;
    for (std::size_t v = 0; v < n; ++v) {
        if (!in[v]) out.push_back(v);
    }
    return out;
}

}  // namespace

SyntheticSignal synth_bandlimited(const SpectralBasis& basis, double omega, std::uint64_t seed) {
    const auto sub = band(basis, omega);
    if (sub.k() == 0) {
        throw BandlimitError("no eigenvalue <= omega=" + std::to_string(omega));
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Vector c(static_cast<Eigen::Index>(sub.k()));
    for (auto& x : c) x = normal(rng);
    SyntheticSignal sig;
    sig.y = igft(sub, c);
    const double norm = sig.y.norm();
    if (norm == 0.0) throw BandlimitError("bandlimited draw is zero");
    sig.y /= norm;
    sig.omega = omega;
    sig.seed = seed;
    return sig;
}

Vector binarize_at_quantile(const Vector& y, double q) {
    if (y.size() == 0) return y;
    if (q < 0.0 || q > 1.0) throw PreconditionError("quantile must lie in [0, 1]");
    std::vector<double> sorted(y.begin(), y.end());
    std::sort(sorted.begin(), sorted.end());
    // Linear interpolation between order statistics, as numpy's default.
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double threshold = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    return (y.array() > threshold).cast<double>().matrix();
}

NoisySample flip_noise(const Vector& y_binary, double rho, std::uint64_t seed) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw PreconditionError("flip rate must lie in [0, 1]");
    NoisySample out;
    out.flip_rate = rho;
    out.s = y_binary;
    out.xi = Vector::Zero(y_binary.size());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index i = 0; i < y_binary.size(); ++i) {
        const double v = y_binary[i];
        if (v != 0.0 && v != 1.0) throw PreconditionError("flip_noise: signal must be binary");
        if (v == 1.0 && unif(rng) < rho) {
            out.s[i] = 0.0;
            out.xi[i] = -1.0;
        }
    }
    return out;
}

double select_lambda1(const KernelFamily& family, const Vector& eigenvalues) {
    for (const double lambda : eigenvalues) {
        const auto r = r_value(family, lambda);
        if (r.infinite || r.value > 1e-10) return lambda;
    }
    throw BoundUndefinedError("R(lambda) vanishes on every eigenvalue; no valid lambda1");
}

double effective_bandlimit(const SpectralBasis& basis, const Vector& y, double rel_tol) {
    const Vector c = gft(basis, y);
    // ||y - U_j U_j^T y||^2 = ||y||^2 - sum_{l<j} c_l^2 (orthonormal U); recompute
    // directly at the candidate to avoid cancellation in the running tail.
    const double target = rel_tol * y.norm();
    double captured = 0.0;
    const double total = y.squaredNorm();
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        captured += c[j] * c[j];
        if (total - captured <= 4.0 * target * target + 1e-12 * total) {
            const Vector resid = y - basis.eigenvectors.leftCols(j + 1) * c.head(j + 1);
            if (resid.norm() <= target) return basis.eigenvalues[j];
        }
    }
    throw BandlimitError("signal is not representable in the basis to relative tolerance " +
                         std::to_string(rel_tol));
}

double theorem2_bound(const KernelFamily& family, double rho, double phi, double lambda1,
                      double omega, double y_norm, std::size_t n) {
    if (n == 0) throw PreconditionError("theorem2_bound: n must be positive");
    if (!(phi > 0.0)) throw PreconditionError("theorem2_bound: phi must be positive");
    const double r1 = finite_penalty(family, lambda1, "theorem2_bound");
    if (!(r1 > 0.0)) {
        throw BoundUndefinedError("R(lambda1) = 0; use the smallest eigenvalue with positive penalty");
    }
    const double c2 = finite_penalty(family, omega, "theorem2_bound") * y_norm * y_norm;
    const double shrink = std::isinf(phi) ? 1.0 : 1.0 + r1 / phi;
    const double variance = rho / (r1 * shrink * shrink);
    const double bias = std::isinf(phi) ? 0.0 : 1.0 / (4.0 * phi);
    return c2 / static_cast<double>(n) * (variance + bias);
}

double optimal_phi(const KernelFamily& family, double rho, double lambda1) {
    if (rho <= 0.125) return kInf;
    const double r1 = finite_penalty(family, lambda1, "optimal_phi");
    return r1 / (2.0 * std::cbrt(rho) - 1.0);
}

double optimal_bound(const KernelFamily& family, double rho, double lambda1, double omega,
                     double y_norm, std::size_t n) {
    const double r1 = finite_penalty(family, lambda1, "optimal_bound");
    if (!(r1 > 0.0)) throw BoundUndefinedError("R(lambda1) = 0");
    const double c2 = finite_penalty(family, omega, "optimal_bound") * y_norm * y_norm;
    const double scale = c2 / (r1 * static_cast<double>(n));
    if (rho < 0.125) return scale * rho;
    return scale * (3.0 * std::cbrt(rho) - 1.0) / 4.0;
}

bool Theorem2Report::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const Theorem2Row& r) { return r.pass; });
}

Theorem2Report verify_theorem2(const SpectralBasis& basis, const KernelFamily& family,
                               const Vector& y_binary, const Theorem2Config& config) {
    if (config.trials == 0) throw PreconditionError("verify_theorem2: trials must be positive");
    const std::size_t n = basis.n();
    if (static_cast<std::size_t>(y_binary.size()) != n) throw DimensionError("verify_theorem2: signal length");

    Theorem2Report report;
    report.y_norm = y_binary.norm();
    report.omega = effective_bandlimit(basis, y_binary);
    report.lambda1 = select_lambda1(family, basis.eigenvalues);

    const Vector cy = gft(basis, y_binary);
    const double out_of_span = (y_binary - igft(basis, cy)).squaredNorm();
    const auto T = static_cast<Eigen::Index>(config.trials);

    for (std::size_t ri = 0; ri < config.rho_grid.size(); ++ri) {
        const double rho = config.rho_grid[ri];
        // Common random numbers across the phi grid.
        Matrix coeffs(static_cast<Eigen::Index>(basis.k()), T);
        parallel_for(config.trials, config.threads, [&](std::size_t t) {
            const auto sample = flip_noise(y_binary, rho, derive_seed(config.seed, t, ri));
            coeffs.col(static_cast<Eigen::Index>(t)) = gft(basis, sample.s);
        });
        for (const double phi : config.phi_grid) {
            const KernelSpec spec{family, phi};
            validate(spec);
            const Vector h = h_diagonal(spec, basis.eigenvalues);
            const Matrix err = (-(h.asDiagonal() * coeffs)).colwise() + cy;
            const Eigen::ArrayXd mse =
                (err.colwise().squaredNorm().array() + out_of_span) / static_cast<double>(n);

            Theorem2Row row;
            row.rho = rho;
            row.phi = phi;
            row.empirical_mse = mse.mean();
            if (T > 1) {
                const double var = (mse - row.empirical_mse).square().sum() / static_cast<double>(T - 1);
                row.mse_stderr = std::sqrt(var / static_cast<double>(T));
            }
            row.bound = theorem2_bound(family, rho, phi, report.lambda1, report.omega, report.y_norm, n);
            row.pass = row.empirical_mse <= row.bound;
            report.rows.push_back(row);
        }
    }
    return report;
}

Theorem2Report verify_theorem2(const SpectralBasis& basis, const KernelFamily& family,
                               const Theorem2Config& config) {
    if (!(config.band_fraction > 0.0 && config.band_fraction <= 1.0)) {
        throw PreconditionError("band_fraction must lie in (0, 1]");
    }
    const auto k = basis.k();
    const auto idx = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(config.band_fraction * static_cast<double>(k))));
    const double nominal = basis.eigenvalues[static_cast<Eigen::Index>(idx - 1)];
    const auto draw = synth_bandlimited(basis, nominal, config.seed);
    const Vector y = binarize_at_quantile(draw.y, 0.5);

    auto report = verify_theorem2(basis, family, y, config);
    report.nominal_omega = nominal;
    report.nominal_residual = bandlimit_residual(basis, y, nominal) / y.norm();
    return report;
}

double poincare_constant(const Matrix& laplacian, std::span<const ItemRow> omega_complement) {
    const auto n = static_cast<std::size_t>(laplacian.rows());
    if (omega_complement.empty() || omega_complement.size() >= n) {
        throw PreconditionError("poincare_constant: the unobserved set must be a nonempty proper subset");
    }
    (void)complement_of(omega_complement, n);  // range and uniqueness checks
    Matrix cols(laplacian.rows(), static_cast<Eigen::Index>(omega_complement.size()));
    for (std::size_t j = 0; j < omega_complement.size(); ++j) {
        cols.col(static_cast<Eigen::Index>(j)) = laplacian.col(static_cast<Eigen::Index>(omega_complement[j]));
    }
    const Eigen::BDCSVD<Matrix> svd(cols);
    const auto& sv = svd.singularValues();
    const double smin = sv.minCoeff();
    if (smin <= 1e-12 * std::max(1.0, sv.maxCoeff())) return kInf;
    return 1.0 / smin;
}

Vector variational_interpolate(const SpectralBasis& full_basis, const KernelFamily& family,
                               unsigned k_power, const Vector& y_obs,
                               std::span<const ItemRow> omega) {
    const std::size_t n = full_basis.n();
    if (full_basis.k() != n) throw PreconditionError("variational_interpolate needs the full eigenbasis");
    if (omega.empty()) throw PreconditionError("variational_interpolate: no observed vertices");
    if (k_power == 0) throw PreconditionError("variational_interpolate: k must be positive");
    if (static_cast<std::size_t>(y_obs.size()) != omega.size()) {
        throw DimensionError("variational_interpolate: y_obs must align with omega");
    }
    const auto unobserved = complement_of(omega, n);

    Vector f = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < omega.size(); ++i) f[static_cast<Eigen::Index>(omega[i])] = y_obs[static_cast<Eigen::Index>(i)];
    if (unobserved.empty()) return f;

    Vector weight(static_cast<Eigen::Index>(n));
    for (Eigen::Index l = 0; l < weight.size(); ++l) {
        const double r = finite_penalty(family, full_basis.eigenvalues[l], "variational_interpolate");
        weight[l] = std::max(std::pow(r, 2.0 * k_power), kPenaltyFloor);
    }
    const auto& u = full_basis.eigenvectors;
    Matrix u_c(static_cast<Eigen::Index>(unobserved.size()), u.cols());
    for (std::size_t i = 0; i < unobserved.size(); ++i) u_c.row(static_cast<Eigen::Index>(i)) = u.row(static_cast<Eigen::Index>(unobserved[i]));
    Matrix u_o(static_cast<Eigen::Index>(omega.size()), u.cols());
    for (std::size_t i = 0; i < omega.size(); ++i) u_o.row(static_cast<Eigen::Index>(i)) = u.row(static_cast<Eigen::Index>(omega[i]));

    const Matrix m_cc = u_c * weight.asDiagonal() * u_c.transpose();
    const Vector rhs = -(u_c * (weight.asDiagonal() * (u_o.transpose() * y_obs)));

    Vector g;
    const Eigen::LLT<Matrix> llt(m_cc);
    if (llt.info() == Eigen::Success) {
        g = llt.solve(rhs);
    } else {
        const Eigen::FullPivLU<Matrix> lu(m_cc);
        if (!lu.isInvertible()) throw InterpolationError("constraint system is singular");
        g = lu.solve(rhs);
    }
    if (!g.allFinite()) throw InterpolationError("interpolation produced non-finite values");
    for (std::size_t i = 0; i < unobserved.size(); ++i) f[static_cast<Eigen::Index>(unobserved[i])] = g[static_cast<Eigen::Index>(i)];
    return f;
}

Vector variational_interpolate(const Matrix& laplacian, const KernelFamily& family,
                               unsigned k_power, const Vector& y_obs,
                               std::span<const ItemRow> omega) {
    const auto basis = exact_eigs(laplacian, static_cast<std::size_t>(laplacian.rows()));
    return variational_interpolate(basis, family, k_power, y_obs, omega);
}

bool Theorem1Report::all_pass() const {
    return applicable && nonincreasing &&
           std::all_of(rows.begin(), rows.end(), [](const Theorem1Row& r) { return r.pass; });
}

namespace {

Theorem1Report verify_theorem1_impl(const SpectralBasis& basis, const Matrix& laplacian,
                                    const KernelFamily& family, double omega,
                                    std::span<const ItemRow> omega_complement, const Vector& y,
                                    std::span<const unsigned> k_powers) {
    const auto n = basis.n();
    if (static_cast<std::size_t>(y.size()) != n) throw DimensionError("verify_theorem1: signal length");

    Theorem1Report report;
    report.poincare = poincare_constant(laplacian, omega_complement);
    report.r_omega = finite_penalty(family, omega, "verify_theorem1");
    report.applicable = std::isfinite(report.poincare) && report.contraction() < 1.0;
    if (!report.applicable) return report;

    const auto observed = complement_of(omega_complement, n);
    Vector y_obs(static_cast<Eigen::Index>(observed.size()));
    for (std::size_t i = 0; i < observed.size(); ++i) y_obs[static_cast<Eigen::Index>(i)] = y[static_cast<Eigen::Index>(observed[i])];

    std::vector<unsigned> ks(k_powers.begin(), k_powers.end());
    std::sort(ks.begin(), ks.end());
    const double y_norm = y.norm();
    for (const unsigned k : ks) {
        const Vector f = variational_interpolate(basis, family, k, y_obs, observed);
        Theorem1Row row;
        row.k = k;
        row.error = (y - f).norm();
        row.bound = 2.0 * std::pow(report.contraction(), static_cast<double>(k)) * y_norm;
        row.pass = row.error <= row.bound;
        report.rows.push_back(row);
    }
    report.nonincreasing = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        if (report.rows[i].error > report.rows[i - 1].error + 1e-12 * std::max(1.0, y_norm)) {
            report.nonincreasing = false;
        }
    }
    return report;
}

}  // namespace

Theorem1Report verify_theorem1(const Matrix& laplacian, const KernelFamily& family, double omega,
                               std::span<const ItemRow> omega_complement, const Vector& y,
                               std::span<const unsigned> k_powers) {
    const auto basis = exact_eigs(laplacian, static_cast<std::size_t>(laplacian.rows()));
    return verify_theorem1_impl(basis, laplacian, family, omega, omega_complement, y, k_powers);
}

Theorem1Report verify_theorem1(const Matrix& laplacian, const KernelFamily& family, double omega,
                               std::span<const ItemRow> omega_complement,
                               std::span<const unsigned> k_powers, std::uint64_t seed) {
    const auto basis = exact_eigs(laplacian, static_cast<std::size_t>(laplacian.rows()));
    const auto sig = synth_bandlimited(basis, omega, seed);
    return verify_theorem1_impl(basis, laplacian, family, omega, omega_complement, sig.y, k_powers);
}

}  // namespace gsimc
