#include "gsimc/errors.hpp"
#include "gsimc/metrics.hpp"
#include "gsimc/synthetic.hpp"
#include "gsimc/graph.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace gsimc;
using testing_support::full_basis;

TEST(HitRate, Examples) {
    const std::vector<ItemRow> truth = {5};
    EXPECT_EQ(hit_rate(std::vector<ItemRow>{2, 5, 9}, truth, 3), 1.0);
    EXPECT_EQ(hit_rate(std::vector<ItemRow>{2, 9, 7}, truth, 3), 0.0);
    EXPECT_EQ(hit_rate(std::vector<ItemRow>{5}, truth, 1), 1.0);
    EXPECT_EQ(hit_rate(std::vector<ItemRow>{2, 5}, truth, 1), 0.0);
}

TEST(Ndcg, Examples) {
    const std::vector<ItemRow> truth = {5};
    EXPECT_EQ(ndcg(std::vector<ItemRow>{5, 1}, truth, 10), 1.0);
    EXPECT_NEAR(ndcg(std::vector<ItemRow>{1, 5}, truth, 10), 1.0 / std::log2(3.0), 1e-12);
    EXPECT_EQ(ndcg(std::vector<ItemRow>{1, 2, 5}, truth, 2), 0.0);
    EXPECT_EQ(ndcg(std::vector<ItemRow>{1, 2}, std::vector<ItemRow>{}, 2), 0.0);
}

TEST(Metrics, MatchBruteForceOnRandomCases) {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 1000; ++t) {
        std::vector<ItemRow> universe(30);
        std::iota(universe.begin(), universe.end(), ItemRow{0});
        std::shuffle(universe.begin(), universe.end(), rng);
        const std::size_t len = rng() % 15;
        const std::vector<ItemRow> recs(universe.begin(), universe.begin() + static_cast<std::ptrdiff_t>(len));
        std::shuffle(universe.begin(), universe.end(), rng);
        const std::size_t tl = 1 + rng() % 4;
        const std::vector<ItemRow> truth(universe.begin(), universe.begin() + static_cast<std::ptrdiff_t>(tl));
        const std::size_t n = 1 + rng() % 12;
        const std::set<std::size_t> tset(truth.begin(), truth.end());
        const std::vector<std::size_t> r(recs.begin(), recs.end());
        EXPECT_EQ(hit_rate(recs, truth, n), oracle::hit_rate(r, tset, n));
        EXPECT_EQ(ndcg(recs, truth, n), oracle::ndcg(r, tset, n));
    }
}

TEST(Metrics, MonotoneInCutoffAndNdcgBelowHr) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 200; ++t) {
        std::vector<ItemRow> recs(20);
        std::iota(recs.begin(), recs.end(), ItemRow{0});
        std::shuffle(recs.begin(), recs.end(), rng);
        const std::vector<ItemRow> truth = {static_cast<ItemRow>(rng() % 25)};
        for (std::size_t n = 1; n < 20; ++n) {
            EXPECT_LE(hit_rate(recs, truth, n), hit_rate(recs, truth, n + 1));
            EXPECT_LE(ndcg(recs, truth, n), ndcg(recs, truth, n + 1));
            EXPECT_LE(ndcg(recs, truth, n), hit_rate(recs, truth, n));
        }
    }
}

namespace {

struct Fixture {
    PlantedData data;
    GsImcModel model;
    EvalCohort cohort;
};

Fixture planted(std::size_t users = 50) {
    PlantedConfig cfg;
    cfg.n_items = 80;
    cfg.n_users = 300;
    cfg.communities = 8;
    cfg.community_size = 12;
    cfg.dropout = 0.2;
    cfg.seed = 3;
    auto data = planted_communities(cfg);
    const auto l = hypergraph_laplacian(data.train);
    auto model = GsImcModel::fit(exact_eigs(l, l.size()), KernelSpec{});
    auto cohort = planted_cohort(data, users, 0.2, 17);
    return {std::move(data), std::move(model), std::move(cohort)};
}

}  // namespace

TEST(EvaluateGsImc, MatchesStraightLineReference) {
    const auto f = planted();
    EvalOptions opts;
    opts.cutoffs = {10, 5, 20};
    const auto report = evaluate_gsimc(f.model, f.cohort, opts);
    ASSERT_EQ(report.metrics.size(), 3u);
    EXPECT_EQ(report.metrics[0].cutoff, 5u);  // sorted
    EXPECT_EQ(report.user_count, 50u);

    std::vector<oracle::Case> cases;
    for (const auto& c : f.cohort.cases) cases.push_back({{c.context.begin(), c.context.end()}, c.target});
    const Matrix h = f.model.filter_matrix();
    for (const auto& m : report.metrics) {
        const auto ref = oracle::protocol(h, cases, m.cutoff);
        EXPECT_NEAR(m.hr_mean, ref.hr, 1e-12);
        EXPECT_NEAR(m.hr_stderr, ref.hr_se, 1e-12);
        EXPECT_NEAR(m.ndcg_mean, ref.ndcg, 1e-12);
        EXPECT_NEAR(m.ndcg_stderr, ref.ndcg_se, 1e-12);
        EXPECT_GE(m.hr_mean, m.ndcg_mean);
    }
}

TEST(EvaluateGsImc, ThreadCountDoesNotChangeResults) {
    const auto f = planted(60);
    EvalOptions one, many;
    many.threads = 7;
    const auto a = evaluate_gsimc(f.model, f.cohort, one);
    const auto b = evaluate_gsimc(f.model, f.cohort, many);
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
        EXPECT_EQ(a.metrics[i].hr_mean, b.metrics[i].hr_mean);
        EXPECT_EQ(a.metrics[i].ndcg_mean, b.metrics[i].ndcg_mean);
        EXPECT_EQ(a.metrics[i].ndcg_stderr, b.metrics[i].ndcg_stderr);
    }
}

TEST(EvaluateGsImc, TopTargetAndUnseenTargets) {
    const auto m = GsImcModel::fit(full_basis(oracle::hypergraph_laplacian(oracle::fixture_ratings())),
                                   KernelSpec{Tikhonov{1.0}, 1.0});
    EvalCohort c;
    c.cases.push_back({"u", {0}, ItemRow{1}, 0});  // item 1 outranks item 2
    auto r = evaluate_gsimc(m, c, {{10}});
    EXPECT_EQ(r.at(10).hr_mean, 1.0);
    EXPECT_EQ(r.at(10).ndcg_mean, 1.0);

    c.cases.push_back({"v", {0}, std::nullopt, 0});
    r = evaluate_gsimc(m, c, {{10}});
    EXPECT_EQ(r.unseen_targets, 1u);
    EXPECT_EQ(r.at(10).hr_mean, 0.5);
    EXPECT_THROW((void)r.at(50), PreconditionError);

    EXPECT_THROW(evaluate_gsimc(m, EvalCohort{}, {}), ProtocolError);
}

TEST(EvaluateBgsImc, ReducesToGsImcAndSkipsShortUsers) {
    const auto f = planted();
    const auto k = f.model.rank();
    const auto gs = evaluate_gsimc(f.model, f.cohort);
    const auto bgs = evaluate_bgsimc(f.model, NoiseConfig::isotropic(k, 1e-4, 1e6), Vector::Constant(k, 1e-4), f.cohort);
    for (std::size_t i = 0; i < gs.metrics.size(); ++i) {
        EXPECT_NEAR(gs.metrics[i].hr_mean, bgs.metrics[i].hr_mean, 1e-9);
        EXPECT_NEAR(gs.metrics[i].ndcg_mean, bgs.metrics[i].ndcg_mean, 1e-9);
    }

    EvalCohort short_users;
    short_users.cases.push_back({"s", {1}, ItemRow{2}, 0});
    EXPECT_THROW(evaluate_bgsimc(f.model, NoiseConfig::isotropic(k), Vector::Ones(k), short_users), ProtocolError);
    short_users.cases.push_back(f.cohort.cases[0]);
    const auto r = evaluate_bgsimc(f.model, NoiseConfig::isotropic(k), Vector::Ones(k), short_users);
    EXPECT_EQ(r.user_count, 1u);
    EXPECT_EQ(r.skipped_count, 1u);
}

TEST(EvaluateGsImc, DegreeBuckets) {
    const auto f = planted();
    EvalOptions opts;
    opts.cutoffs = {10};
    std::vector<std::size_t> deg(f.model.n_items());
    for (std::size_t i = 0; i < deg.size(); ++i) deg[i] = i * 100;  // spread across buckets
    opts.item_degrees = deg;
    const auto r = evaluate_gsimc(f.model, f.cohort, opts);
    ASSERT_EQ(r.degree_buckets.size(), 4u);
    std::size_t total = 0;
    for (const auto& b : r.degree_buckets) total += b.user_count;
    EXPECT_EQ(total, r.user_count - r.unseen_targets);
    EXPECT_FALSE(r.degree_buckets.back().max_degree.has_value());
}

TEST(Spectrum, ProfileExamplesAndNormalization) {
    const auto b = full_basis(oracle::hypergraph_laplacian(oracle::random_ratings(12, 20, 0.3, 2)));
    const std::vector<Vector> one = {b.eigenvectors.col(0)};
    const auto p1 = spectrum_profile(b, one);
    EXPECT_NEAR(p1.mean_energy[0], 1.0, 1e-12);
    EXPECT_NEAR(p1.mean_energy.tail(11).sum(), 0.0, 1e-12);

    const std::vector<Vector> two = {b.eigenvectors.col(0), 3.0 * b.eigenvectors.col(1), Vector::Zero(12)};
    const auto p2 = spectrum_profile(b, two);
    EXPECT_NEAR(p2.mean_energy[0], 0.5, 1e-12);
    EXPECT_NEAR(p2.mean_energy[1], 0.5, 1e-12);
    EXPECT_EQ(p2.skipped_zero, 1u);
    EXPECT_EQ(p2.user_count, 2u);

    std::vector<Vector> random;
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 10; ++i) {
        Vector v(12);
        for (auto& x : v) x = nd(rng);
        random.push_back(v);
    }
    EXPECT_NEAR(spectrum_profile(b, random).mean_energy.sum(), 1.0, 1e-8);
    EXPECT_THROW(spectrum_profile(b, std::vector<Vector>{Vector::Zero(12)}), PreconditionError);

    std::ostringstream csv;
    write_spectrum_csv(csv, b.eigenvalues, p2);
    EXPECT_EQ(csv.str().rfind("frequency_index,eigenvalue,mean_energy\n0,", 0), 0u);
}
