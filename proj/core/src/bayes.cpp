#include "gsimc/bayes.hpp"

#include "gsimc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gsimc {

namespace {

std::vector<ItemRow> sorted_unique(std::span<const ItemRow> items) {
    std::vector<ItemRow> out(items.begin(), items.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void check_length(const Vector& v, std::size_t k, const char* what) {
    if (static_cast<std::size_t>(v.size()) != k) {
        throw DimensionError(std::string(what) + " has length " + std::to_string(v.size()) +
                             ", expected " + std::to_string(k));
    }
}

}  // namespace

NoiseConfig NoiseConfig::isotropic(std::size_t k, double eta, double nu) {
    const auto n = static_cast<Eigen::Index>(k);
    return {Vector::Constant(n, eta), Vector::Constant(n, nu)};
}

void NoiseConfig::validate(std::size_t k) const {
    check_length(sigma_eta, k, "sigma_eta");
    check_length(sigma_nu, k, "sigma_nu");
    if ((sigma_eta.array() <= 0.0).any() || (sigma_nu.array() <= 0.0).any()) {
        throw PreconditionError("noise covariances must be positive");
    }
}

BgsUserState init_state(const GsImcModel& model, std::span<const ItemRow> prefix, const Vector& p0) {
    check_length(p0, model.rank(), "p0");
    if (!(p0.array() > 0.0).all()) throw PreconditionError("p0 must be positive");
    BgsUserState s;
    s.observed = sorted_unique(prefix);
    s.x_hat = model.fourier_prediction(s.observed);
    s.p_diag = p0;
    return s;
}

Extrapolation predict_step(const GsImcModel& model, const BgsUserState& state,
                           std::span<const ItemRow> delta, const NoiseConfig& noise) {
    check_length(state.x_hat, model.rank(), "x_hat");
    check_length(noise.sigma_eta, model.rank(), "sigma_eta");
    Extrapolation e;
    e.x_bar = state.x_hat;
    if (!delta.empty()) e.x_bar += model.fourier_prediction(delta);
    e.p_bar = state.p_diag + noise.sigma_eta;
    return e;
}

Vector joseph_covariance(const Vector& gain, const Vector& p_bar, const Vector& sigma_nu) {
    const auto one_minus = (1.0 - gain.array());
    return (one_minus.square() * p_bar.array() + gain.array().square() * sigma_nu.array()).matrix();
}

Correction correct_step(const Vector& x_bar, const Vector& p_bar, const Vector& z,
                        const NoiseConfig& noise) {
    const auto k = static_cast<std::size_t>(x_bar.size());
    check_length(p_bar, k, "p_bar");
    check_length(z, k, "measurement");
    check_length(noise.sigma_nu, k, "sigma_nu");
    const Vector innovation = p_bar + noise.sigma_nu;
    if (!(innovation.array() > 0.0).all()) {
        throw NumericError("innovation covariance is not positive");
    }
    Correction c;
    c.gain = p_bar.cwiseQuotient(innovation);
    c.x_hat = x_bar + c.gain.cwiseProduct(z - x_bar);
    c.p_diag = joseph_covariance(c.gain, p_bar, noise.sigma_nu);
    return c;
}

UpdateResult update(const GsImcModel& model, const BgsUserState& state,
                    std::span<const ItemRow> delta, const NoiseConfig& noise, OpCounter* counter) {
    const auto d = sorted_unique(delta);
    for (const auto item : d) {
        if (std::binary_search(state.observed.begin(), state.observed.end(), item)) {
            throw PreconditionError("update: item " + std::to_string(item) + " is already observed");
        }
    }

    const auto ext = predict_step(model, state, d, noise);

    UpdateResult out;
    std::merge(state.observed.begin(), state.observed.end(), d.begin(), d.end(),
               std::back_inserter(out.state.observed));
    const Vector z = gft_indicator(model.basis(), out.state.observed);
    auto corr = correct_step(ext.x_bar, ext.p_bar, z, noise);

    out.prediction.scores = igft(model.basis(), corr.x_hat);
    out.prediction.observed = out.state.observed;
    out.state.x_hat = std::move(corr.x_hat);
    out.state.p_diag = std::move(corr.p_diag);

    if (counter) {
        // gft of the delta and of the measurement (|items| k each), the
        // elementwise Kalman algebra (a few k) and the n x k inverse transform.
        const std::uint64_t n = model.n_items();
        const std::uint64_t k = model.rank();
        counter->ops += (d.size() + out.state.observed.size()) * k + 8 * k + n * k;
    }
    return out;
}

Vector estimate_p0(const GsImcModel& model, std::span<const EvalCase> validation) {
    const auto k = static_cast<Eigen::Index>(model.rank());
    Vector acc = Vector::Zero(k);
    std::size_t used = 0;
    for (const auto& c : validation) {
        if (c.context.empty() || !c.target) continue;
        auto full = c.context;
        full.push_back(*c.target);
        const auto full_items = sorted_unique(full);
        const Vector residual =
            gft_indicator(model.basis(), full_items) - model.fourier_prediction(sorted_unique(c.context));
        acc += residual.cwiseAbs2();
        ++used;
    }
    if (used == 0) throw EstimationError("no validation user with a context and a known target");
    acc /= static_cast<double>(used);
    return acc.cwiseMax(kCovarianceFloor);
}

bool KalmanSimulationReport::unbiased(double sigmas) const {
    return std::abs(mean_error) <= sigmas * error_stderr;
}

bool KalmanSimulationReport::minimal() const {
    return std::all_of(perturbed.begin(), perturbed.end(),
                       [this](const auto& d) { return posterior <= d.second; });
}

KalmanSimulationReport simulate_scalar_kalman(const KalmanSimulation& sim) {
    if (sim.trials < 2) throw PreconditionError("simulate_scalar_kalman needs at least two trials");
    if (!(sim.p_prev > 0.0 && sim.sigma_eta > 0.0 && sim.sigma_nu > 0.0)) {
        throw PreconditionError("simulate_scalar_kalman: variances must be positive");
    }
    const NoiseConfig noise{Vector::Constant(1, sim.sigma_eta), Vector::Constant(1, sim.sigma_nu)};
    std::mt19937_64 rng(sim.seed);
    std::normal_distribution<double> normal;

    const double x_hat_prev = 0.0;
    double sum = 0.0, sum_sq = 0.0;
    Correction c;
    for (std::size_t t = 0; t < sim.trials; ++t) {
        const double x_prev = x_hat_prev + std::sqrt(sim.p_prev) * normal(rng);
        const double x_true = x_prev + sim.input + std::sqrt(sim.sigma_eta) * normal(rng);
        const double z = x_true + std::sqrt(sim.sigma_nu) * normal(rng);

        const Vector x_bar = Vector::Constant(1, x_hat_prev + sim.input);
        const Vector p_bar = Vector::Constant(1, sim.p_prev + sim.sigma_eta);
        c = correct_step(x_bar, p_bar, Vector::Constant(1, z), noise);
        const double e = c.x_hat[0] - x_true;
        sum += e;
        sum_sq += e * e;
    }
    const auto n = static_cast<double>(sim.trials);
    KalmanSimulationReport r;
    r.mean_error = sum / n;
    r.empirical_variance = (sum_sq - n * r.mean_error * r.mean_error) / (n - 1.0);
    r.error_stderr = std::sqrt(r.empirical_variance / n);
    r.gain = c.gain[0];
    r.posterior = c.p_diag[0];

    const Vector p_bar = Vector::Constant(1, sim.p_prev + sim.sigma_eta);
    for (const double d : {-0.1, -0.01, 0.01, 0.1}) {
        const Vector k = Vector::Constant(1, r.gain + d);
        r.perturbed.emplace_back(d, joseph_covariance(k, p_bar, noise.sigma_nu)[0]);
    }
    return r;
}

}  // namespace gsimc
