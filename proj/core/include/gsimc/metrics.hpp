#pragma once

#include "gsimc/bayes.hpp"
#include "gsimc/data.hpp"
#include "gsimc/model.hpp"
#include "gsimc/spectral.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gsimc {

inline const std::vector<std::size_t> kDefaultCutoffs = {10, 50, 100};

/// 1 if any of the first n recommendations is in truth.
double hit_rate(std::span<const ItemRow> recs, std::span<const ItemRow> truth, std::size_t n);

/// DCG@n / ideal DCG@n with binary gains; the ideal places min(|truth|, n)
/// hits at the top.
double ndcg(std::span<const ItemRow> recs, std::span<const ItemRow> truth, std::size_t n);

struct CutoffMetrics {
    std::size_t cutoff = 0;
    double hr_mean = 0.0;
    double hr_stderr = 0.0;
    double ndcg_mean = 0.0;
    double ndcg_stderr = 0.0;
};

/// Metrics restricted to users whose target falls in an item-degree range.
struct DegreeBucket {
    std::size_t min_degree = 0;
    std::optional<std::size_t> max_degree;  // exclusive; empty = unbounded
    std::size_t user_count = 0;
    std::vector<CutoffMetrics> metrics;
};

struct MetricsReport {
    std::vector<CutoffMetrics> metrics;  // one per cutoff, ascending
    std::size_t user_count = 0;          // users scored (unseen targets included as misses)
    std::size_t skipped_count = 0;       // too few events for the protocol
    std::size_t unseen_targets = 0;
    std::vector<DegreeBucket> degree_buckets;

    [[nodiscard]] const CutoffMetrics& at(std::size_t cutoff) const;
};

struct EvalOptions {
    std::vector<std::size_t> cutoffs = kDefaultCutoffs;
    std::size_t threads = 1;
    /// Training degree of each item row; enables the degree breakdown.
    std::optional<std::vector<std::size_t>> item_degrees;
    std::vector<std::size_t> degree_thresholds = {100, 2000, 5000};
};

/// Reconstructs each user from the full known prefix, ranks unobserved items
/// and scores the held-out target. Throws ProtocolError with no users.
MetricsReport evaluate_gsimc(const GsImcModel& model, const EvalCohort& cohort,
                             const EvalOptions& options = {});

/// Initializes the Kalman state on all but the last context item, feeds that
/// item as one online update and scores the held-out target. Users with fewer
/// than two context items are skipped.
MetricsReport evaluate_bgsimc(const GsImcModel& model, const NoiseConfig& noise, const Vector& p0,
                              const EvalCohort& cohort, const EvalOptions& options = {});

/// Averaged squared graph Fourier coefficients after scaling each user's
/// coefficient vector to unit norm.
struct SpectrumProfile {
    Vector mean_energy;
    std::size_t user_count = 0;
    std::size_t skipped_zero = 0;
};

SpectrumProfile spectrum_profile(const SpectralBasis& basis, std::span<const Vector> signals);
/// Same, from Fourier coefficients already in hand.
SpectrumProfile spectrum_profile_from_coefficients(std::span<const Vector> coefficients);

/// Sum of the first `count` profile entries.
double cumulative_energy(const SpectrumProfile& profile, std::size_t count);

/// `frequency_index,eigenvalue,mean_energy` rows.
void write_spectrum_csv(std::ostream& out, const Vector& eigenvalues, const SpectrumProfile& profile);

}  // namespace gsimc
