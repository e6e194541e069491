#include "gsimc/bayes.hpp"
#include "gsimc/graph.hpp"
#include "gsimc/metrics.hpp"
#include "gsimc/model.hpp"
#include "gsimc/spectral.hpp"
#include "gsimc/synthetic.hpp"

#include <benchmark/benchmark.h>

using namespace gsimc;

namespace {

PlantedData planted(std::size_t items) {
    PlantedConfig cfg;
    cfg.n_items = items;
    cfg.n_users = 4 * items;
    cfg.communities = items / 10;
    cfg.community_size = 30;
    return planted_communities(cfg);
}

void BM_ExactEigs(benchmark::State& state) {
    const auto l = hypergraph_laplacian(planted(static_cast<std::size_t>(state.range(0))).train);
    for (auto _ : state) benchmark::DoNotOptimize(exact_eigs(l, 100));
}
BENCHMARK(BM_ExactEigs)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Nystrom(benchmark::State& state) {
    const auto l = hypergraph_laplacian(planted(static_cast<std::size_t>(state.range(0))).train);
    NystromParams p;
    p.columns = 200;
    p.rank = 100;
    for (auto _ : state) benchmark::DoNotOptimize(nystrom_eigs(l, p));
}
BENCHMARK(BM_Nystrom)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
    const auto data = planted(1000);
    const auto model = GsImcModel::fit(exact_eigs(hypergraph_laplacian(data.train), static_cast<std::size_t>(state.range(0))), {});
    const std::vector<ItemRow> items = data.communities.front();
    for (auto _ : state) benchmark::DoNotOptimize(reconstruct(model, items));
}
BENCHMARK(BM_Reconstruct)->Arg(50)->Arg(200);

void BM_BayesUpdate(benchmark::State& state) {
    const auto data = planted(1000);
    const auto model = GsImcModel::fit(exact_eigs(hypergraph_laplacian(data.train), static_cast<std::size_t>(state.range(0))), {});
    const auto& c = data.communities.front();
    const std::vector<ItemRow> prefix(c.begin(), c.end() - 1);
    const auto s = init_state(model, prefix, Vector::Constant(static_cast<Eigen::Index>(model.rank()), 1e-2));
    const auto noise = NoiseConfig::isotropic(model.rank());
    const ItemRow delta[] = {c.back()};
    for (auto _ : state) benchmark::DoNotOptimize(update(model, s, delta, noise));
}
BENCHMARK(BM_BayesUpdate)->Arg(50)->Arg(200);

void BM_Evaluate(benchmark::State& state) {
    const auto data = planted(1000);
    const auto model = GsImcModel::fit(exact_eigs(hypergraph_laplacian(data.train), 200), {});
    const auto cohort = planted_cohort(data, 500, 0.1, 3);
    EvalOptions opts;
    opts.threads = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_gsimc(model, cohort, opts));
}
BENCHMARK(BM_Evaluate)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
