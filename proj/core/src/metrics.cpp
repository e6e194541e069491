#include "gsimc/metrics.hpp"

#include "gsimc/errors.hpp"
#include "gsimc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace gsimc {

namespace {

bool contains(std::span<const ItemRow> xs, ItemRow x) {
    return std::find(xs.begin(), xs.end(), x) != xs.end();
}

struct UserScore {
    bool scored = false;
    std::optional<ItemRow> target;
    std::vector<double> hr;    // per cutoff
    std::vector<double> ndcg;  // per cutoff
};

UserScore score_ranking(const Vector& scores, std::span<const ItemRow> excluded,
                        std::optional<ItemRow> target, std::span<const std::size_t> cutoffs) {
    UserScore s;
    s.scored = true;
    s.target = target;
    s.hr.assign(cutoffs.size(), 0.0);
    s.ndcg.assign(cutoffs.size(), 0.0);
    if (!target) return s;
    const auto recs = recommend_topn(scores, excluded, cutoffs.back());
    const ItemRow truth[] = {*target};
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
        s.hr[c] = hit_rate(recs, truth, cutoffs[c]);
        s.ndcg[c] = ndcg(recs, truth, cutoffs[c]);
    }
    return s;
}

std::pair<double, double> mean_stderr(const std::vector<double>& xs) {
    const auto n = static_cast<double>(xs.size());
    if (xs.empty()) return {0.0, 0.0};
    double sum = 0.0;
    for (const double x : xs) sum += x;
    const double mean = sum / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

std::vector<CutoffMetrics> aggregate(const std::vector<const UserScore*>& users,
                                     std::span<const std::size_t> cutoffs) {
    std::vector<CutoffMetrics> out;
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
        std::vector<double> hr, nd;
        hr.reserve(users.size());
        nd.reserve(users.size());
        for (const auto* u : users) {
            hr.push_back(u->hr[c]);
            nd.push_back(u->ndcg[c]);
        }
        CutoffMetrics m;
        m.cutoff = cutoffs[c];
        std::tie(m.hr_mean, m.hr_stderr) = mean_stderr(hr);
        std::tie(m.ndcg_mean, m.ndcg_stderr) = mean_stderr(nd);
        out.push_back(m);
    }
    return out;
}

std::vector<std::size_t> normalized_cutoffs(std::vector<std::size_t> cutoffs) {
    std::sort(cutoffs.begin(), cutoffs.end());
    cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());
    if (cutoffs.empty() || cutoffs.front() == 0) throw PreconditionError("cutoffs must be positive");
    return cutoffs;
}

MetricsReport build_report(const std::vector<UserScore>& per_user, const EvalCohort& cohort,
                           std::span<const std::size_t> cutoffs, const EvalOptions& options) {
    MetricsReport report;
    report.skipped_count = cohort.skipped_users;
    std::vector<const UserScore*> scored;
    for (const auto& u : per_user) {
        if (!u.scored) {
            ++report.skipped_count;
            continue;
        }
        scored.push_back(&u);
        if (!u.target) ++report.unseen_targets;
    }
    if (scored.empty()) throw ProtocolError("no eligible users to evaluate");
    report.user_count = scored.size();
    report.metrics = aggregate(scored, cutoffs);

    if (options.item_degrees) {
        const auto& deg = *options.item_degrees;
        auto thresholds = options.degree_thresholds;
        std::sort(thresholds.begin(), thresholds.end());
        std::vector<std::size_t> edges = {0};
        edges.insert(edges.end(), thresholds.begin(), thresholds.end());
        for (std::size_t b = 0; b < edges.size(); ++b) {
            DegreeBucket bucket;
            bucket.min_degree = edges[b];
            if (b + 1 < edges.size()) bucket.max_degree = edges[b + 1];
            std::vector<const UserScore*> members;
            for (const auto* u : scored) {
                if (!u->target || *u->target >= deg.size()) continue;
                const auto d = deg[*u->target];
                if (d >= bucket.min_degree && (!bucket.max_degree || d < *bucket.max_degree)) {
                    members.push_back(u);
                }
            }
            bucket.user_count = members.size();
            bucket.metrics = aggregate(members, cutoffs);
            report.degree_buckets.push_back(std::move(bucket));
        }
    }
    return report;
}

}  // namespace

double hit_rate(std::span<const ItemRow> recs, std::span<const ItemRow> truth, std::size_t n) {
    const std::size_t m = std::min(n, recs.size());
    for (std::size_t j = 0; j < m; ++j) {
        if (contains(truth, recs[j])) return 1.0;
    }
    return 0.0;
}

double ndcg(std::span<const ItemRow> recs, std::span<const ItemRow> truth, std::size_t n) {
    if (truth.empty() || n == 0) return 0.0;
    const std::size_t m = std::min(n, recs.size());
    double dcg = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        if (contains(truth, recs[j])) dcg += 1.0 / std::log2(static_cast<double>(j) + 2.0);
    }
    double ideal = 0.0;
    const std::size_t hits = std::min(n, truth.size());
    for (std::size_t j = 0; j < hits; ++j) ideal += 1.0 / std::log2(static_cast<double>(j) + 2.0);
    return dcg / ideal;
}

const CutoffMetrics& MetricsReport::at(std::size_t cutoff) const {
    for (const auto& m : metrics) {
        if (m.cutoff == cutoff) return m;
    }
    throw PreconditionError("no metrics for cutoff " + std::to_string(cutoff));
}

MetricsReport evaluate_gsimc(const GsImcModel& model, const EvalCohort& cohort,
                             const EvalOptions& options) {
    const auto cutoffs = normalized_cutoffs(options.cutoffs);
    std::vector<UserScore> per_user(cohort.cases.size());
    parallel_for(cohort.cases.size(), options.threads, [&](std::size_t u) {
        const auto& c = cohort.cases[u];
        const auto pred = reconstruct(model, c.context);
        per_user[u] = score_ranking(pred.scores, pred.observed, c.target, cutoffs);
    });
    return build_report(per_user, cohort, cutoffs, options);
}

MetricsReport evaluate_bgsimc(const GsImcModel& model, const NoiseConfig& noise, const Vector& p0,
                              const EvalCohort& cohort, const EvalOptions& options) {
    const auto cutoffs = normalized_cutoffs(options.cutoffs);
    noise.validate(model.rank());
    std::vector<UserScore> per_user(cohort.cases.size());
    parallel_for(cohort.cases.size(), options.threads, [&](std::size_t u) {
        const auto& c = cohort.cases[u];
        if (c.context.size() < 2) return;  // left unscored -> skipped
        const std::span<const ItemRow> ctx(c.context);
        const auto state = init_state(model, ctx.first(ctx.size() - 1), p0);
        const auto result = update(model, state, ctx.last(1), noise);
        per_user[u] = score_ranking(result.prediction.scores, result.prediction.observed, c.target, cutoffs);
    });
    return build_report(per_user, cohort, cutoffs, options);
}

SpectrumProfile spectrum_profile_from_coefficients(std::span<const Vector> coefficients) {
    SpectrumProfile p;
    for (const auto& c : coefficients) {
        const double norm = c.norm();
        if (norm == 0.0) {
            ++p.skipped_zero;
            continue;
        }
        if (p.mean_energy.size() == 0) p.mean_energy = Vector::Zero(c.size());
        if (c.size() != p.mean_energy.size()) throw DimensionError("spectrum_profile: length mismatch");
        p.mean_energy += (c / norm).cwiseAbs2();
        ++p.user_count;
    }
    if (p.user_count == 0) throw PreconditionError("spectrum_profile: every signal is zero");
    p.mean_energy /= static_cast<double>(p.user_count);
    return p;
}

SpectrumProfile spectrum_profile(const SpectralBasis& basis, std::span<const Vector> signals) {
    std::vector<Vector> coeffs;
    coeffs.reserve(signals.size());
    for (const auto& s : signals) coeffs.push_back(gft(basis, s));
    return spectrum_profile_from_coefficients(coeffs);
}

double cumulative_energy(const SpectrumProfile& profile, std::size_t count) {
    const auto m = std::min<Eigen::Index>(static_cast<Eigen::Index>(count), profile.mean_energy.size());
    return profile.mean_energy.head(m).sum();
}

void write_spectrum_csv(std::ostream& out, const Vector& eigenvalues, const SpectrumProfile& profile) {
    if (eigenvalues.size() != profile.mean_energy.size()) {
        throw DimensionError("write_spectrum_csv: eigenvalue/profile length mismatch");
    }
    out << "frequency_index,eigenvalue,mean_energy\n";
    out << std::setprecision(17);
    for (Eigen::Index l = 0; l < eigenvalues.size(); ++l) {
        out << l << ',' << eigenvalues[l] << ',' << profile.mean_energy[l] << '\n';
    }
}

}  // namespace gsimc
