// Randomized invariants over many small graphs.
#include "gsimc/bayes.hpp"
#include "gsimc/graph.hpp"
#include "gsimc/metrics.hpp"
#include "gsimc/model.hpp"
#include "gsimc/synthetic.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace gsimc;
using testing_support::full_basis;
using testing_support::to_rating;

namespace {

std::vector<KernelSpec> all_kernels() {
    return {{Tikhonov{1.0}, 2.0}, {Diffusion{1.0}, 1.0}, {RandomWalk{4.0}, 1.0},
            {InverseCosine{}, 3.0}, {BandlimitedCutoff{0.6}, 1.0}};
}

Vector random_binary(Eigen::Index n, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(0.3);
    Vector s(n);
    for (Eigen::Index i = 0; i < n; ++i) s[i] = coin(rng) ? 1.0 : 0.0;
    return s;
}

}  // namespace

TEST(Property, LibraryLaplacianMatchesDenseFormula) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix r = oracle::random_ratings(15 + static_cast<int>(seed), 30, 0.15, seed);
        const auto rm = to_rating(r);
        EXPECT_LE((hypergraph_laplacian(rm).matrix - oracle::hypergraph_laplacian(r)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((covariance_laplacian(rm).matrix - oracle::covariance_laplacian(r)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Property, ReconstructionMatchesDenseFilter) {
    std::mt19937_64 rng(7);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix l = oracle::hypergraph_laplacian(oracle::random_ratings(20, 40, 0.12, seed));
        const auto b = full_basis(l);
        for (const auto& spec : all_kernels()) {
            const auto m = GsImcModel::fit(b, spec);
            const Matrix h = oracle::filter(l, spec);
            const Vector s = random_binary(20, rng);
            EXPECT_LE((reconstruct(m, s).scores - h * s).cwiseAbs().maxCoeff(), 1e-8) << describe(spec);
        }
    }
}

TEST(Property, FilterIsLinearAndSymmetric) {
    const auto b = full_basis(oracle::hypergraph_laplacian(oracle::random_ratings(25, 50, 0.1, 3)));
    std::mt19937_64 rng(1);
    for (const auto& spec : all_kernels()) {
        const auto m = GsImcModel::fit(b, spec);
        const Vector x = Vector::NullaryExpr(25, [&] { return std::normal_distribution<>()(rng); });
        const Vector y = Vector::NullaryExpr(25, [&] { return std::normal_distribution<>()(rng); });
        EXPECT_LE((m.filter(2.0 * x - y) - (2.0 * m.filter(x) - m.filter(y))).norm(), 1e-10);
        EXPECT_NEAR(y.dot(m.filter(x)), x.dot(m.filter(y)), 1e-10);
        // Gains stay in [0, 1]: the filter never amplifies.
        EXPECT_LE(m.filter(x).norm(), x.norm() + 1e-10);
    }
}

TEST(Property, IncrementalEqualsBatch) {
    const auto b = full_basis(oracle::hypergraph_laplacian(oracle::random_ratings(30, 60, 0.1, 5)));
    const auto m = GsImcModel::fit(b, {RandomWalk{}, 1.0});
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
        std::vector<ItemRow> items(30);
        std::iota(items.begin(), items.end(), ItemRow{0});
        std::shuffle(items.begin(), items.end(), rng);
        const std::size_t a = 1 + rng() % 10, d = 1 + rng() % 10;
        const std::vector<ItemRow> first(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(a));
        const std::vector<ItemRow> delta(items.begin() + static_cast<std::ptrdiff_t>(a),
                                         items.begin() + static_cast<std::ptrdiff_t>(a + d));
        std::vector<ItemRow> all(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(a + d));
        const auto inc = incremental_update(m, reconstruct(m, first), delta);
        EXPECT_LE((inc.scores - reconstruct(m, all).scores).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Property, KalmanCovarianceStaysPositiveAndShrinks) {
    const auto b = full_basis(oracle::hypergraph_laplacian(oracle::random_ratings(30, 60, 0.1, 8)));
    const auto m = GsImcModel::fit(b, {Tikhonov{}, 1.0});
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<> u(1e-6, 1.0);
    for (int t = 0; t < 50; ++t) {
        NoiseConfig noise{Vector::NullaryExpr(30, [&] { return u(rng); }), Vector::NullaryExpr(30, [&] { return u(rng); })};
        const Vector p0 = Vector::NullaryExpr(30, [&] { return u(rng); });
        const auto s = init_state(m, std::vector<ItemRow>{static_cast<ItemRow>(t % 30)}, p0);
        const auto r = update(m, s, std::vector<ItemRow>{static_cast<ItemRow>((t + 1) % 30)}, noise);
        EXPECT_TRUE((r.state.p_diag.array() > 0.0).all());
        // Posterior variance never exceeds either the predicted or measurement variance.
        EXPECT_TRUE((r.state.p_diag.array() <= (p0 + noise.sigma_eta).array() + 1e-15).all());
        EXPECT_TRUE((r.state.p_diag.array() <= noise.sigma_nu.array() + 1e-15).all());
    }
}

TEST(Property, EvaluationIndependentOfThreads) {
    PlantedConfig cfg;
    cfg.n_items = 60;
    cfg.n_users = 150;
    cfg.communities = 6;
    cfg.community_size = 10;
    const auto d = planted_communities(cfg);
    const auto cohort = planted_cohort(d, 60, 0.2, 9);
    const auto m = GsImcModel::fit(full_basis(hypergraph_laplacian(d.train).matrix), {RandomWalk{}, 1.0});
    EvalOptions one, many;
    many.threads = 5;
    const auto a = evaluate_gsimc(m, cohort, one);
    const auto c = evaluate_gsimc(m, cohort, many);
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
        EXPECT_EQ(a.metrics[i].hr_mean, c.metrics[i].hr_mean);
        EXPECT_EQ(a.metrics[i].ndcg_mean, c.metrics[i].ndcg_mean);
    }
}
