#pragma once

#include "gsimc/data.hpp"
#include "gsimc/model.hpp"
#include "gsimc/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gsimc {

/// Diagonal process (eta) and measurement (nu) noise covariances in the
/// Fourier domain.
struct NoiseConfig {
    Vector sigma_eta;
    Vector sigma_nu;

    static NoiseConfig isotropic(std::size_t k, double eta = 1e-4, double nu = 1e-4);
    /// Throws PreconditionError on a non-positive entry or a length other than k.
    void validate(std::size_t k) const;
};

/// Per-user Kalman state: Fourier-domain estimate, its covariance diagonal and
/// every item already folded into the measurement.
struct BgsUserState {
    Vector x_hat;
    Vector p_diag;
    std::vector<ItemRow> observed;  // sorted, unique
};

/// Optional instrumentation: scalar multiply-adds performed by update().
struct OpCounter {
    std::uint64_t ops = 0;
};

inline constexpr double kCovarianceFloor = 1e-8;

/// x_hat = gains .* (U^T s_prefix), P = p0. Throws PreconditionError if any p0
/// entry is not positive.
BgsUserState init_state(const GsImcModel& model, std::span<const ItemRow> prefix, const Vector& p0);

struct Extrapolation {
    Vector x_bar;
    Vector p_bar;
};

/// x_bar = x_hat + gains .* (U^T delta), p_bar = P + sigma_eta.
Extrapolation predict_step(const GsImcModel& model, const BgsUserState& state,
                           std::span<const ItemRow> delta, const NoiseConfig& noise);

struct Correction {
    Vector x_hat;
    Vector p_diag;
    Vector gain;
};

/// K = p_bar / (p_bar + sigma_nu), x_hat = x_bar + K (z - x_bar) and the
/// Joseph-form covariance (1-K)^2 p_bar + K^2 sigma_nu. Throws NumericError
/// on a non-positive innovation variance.
Correction correct_step(const Vector& x_bar, const Vector& p_bar, const Vector& z,
                        const NoiseConfig& noise);

/// Joseph-form posterior variance for an arbitrary gain.
Vector joseph_covariance(const Vector& gain, const Vector& p_bar, const Vector& sigma_nu);

struct UpdateResult {
    BgsUserState state;
    Prediction prediction;
};

/// One prediction-correction cycle with measurement z = U^T (s + delta).
/// `delta` must be disjoint from the items already in the state.
UpdateResult update(const GsImcModel& model, const BgsUserState& state,
                    std::span<const ItemRow> delta, const NoiseConfig& noise,
                    OpCounter* counter = nullptr);

/// Per-frequency second moment of z_full - gains .* z_prefix over validation
/// users (prefix = context, full = context + target), floored at 1e-8.
/// Throws EstimationError when no case has a context and a known target.
Vector estimate_p0(const GsImcModel& model, std::span<const EvalCase> validation);

/// Monte-Carlo check of the correction step in a simulated linear-Gaussian
/// model: the previous estimate is unbiased with variance p_prev, the state
/// moves by a known input plus N(0, sigma_eta) and is measured with
/// N(0, sigma_nu) noise.
struct KalmanSimulation {
    double p_prev = 0.04;
    double sigma_eta = 0.01;
    double sigma_nu = 0.02;
    double input = 0.3;
    std::size_t trials = 10000;
    std::uint64_t seed = kDefaultSeed;
};

struct KalmanSimulationReport {
    double mean_error = 0.0;      // E[x_hat_new - x_true]
    double error_stderr = 0.0;
    double empirical_variance = 0.0;
    double gain = 0.0;            // K*
    double posterior = 0.0;       // Joseph variance at K*
    std::vector<std::pair<double, double>> perturbed;  // (delta, Joseph variance at K* + delta)

    [[nodiscard]] bool unbiased(double sigmas = 3.0) const;
    [[nodiscard]] bool minimal() const;
};

KalmanSimulationReport simulate_scalar_kalman(const KalmanSimulation& sim);

}  // namespace gsimc
