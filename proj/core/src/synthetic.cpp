#include "gsimc/synthetic.hpp"

#include "gsimc/errors.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace gsimc {

namespace {

std::vector<std::vector<ItemRow>> draw_communities(const PlantedConfig& c, std::mt19937_64& rng) {
    if (c.community_size == 0 || c.community_size > c.n_items || c.communities == 0) {
        throw PreconditionError("planted config: bad community sizes");
    }
    std::vector<ItemRow> all(c.n_items);
    std::iota(all.begin(), all.end(), ItemRow{0});
    std::vector<std::vector<ItemRow>> out;
    for (std::size_t t = 0; t < c.communities; ++t) {
        std::vector<ItemRow> members;
        std::sample(all.begin(), all.end(), std::back_inserter(members), c.community_size, rng);
        out.push_back(std::move(members));
    }
    return out;
}

std::vector<ItemRow> draw_member(const std::vector<ItemRow>& community, double dropout,
                                 std::mt19937_64& rng) {
    std::bernoulli_distribution drop(dropout);
    std::vector<ItemRow> kept;
    for (const auto i : community) {
        if (!drop(rng)) kept.push_back(i);
    }
    return kept;
}

}  // namespace

RatingMatrix random_rating_matrix(std::size_t n_items, std::size_t n_users, double density,
                                  std::uint64_t seed) {
    if (!(density > 0.0 && density <= 1.0)) throw PreconditionError("density must lie in (0, 1]");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution on(density);
    std::vector<std::pair<ItemRow, std::size_t>> pairs;
    for (std::size_t j = 0; j < n_users; ++j) {
        for (std::size_t i = 0; i < n_items; ++i) {
            if (on(rng)) pairs.emplace_back(i, j);
        }
    }
    return prune_empty(rating_matrix_from_pairs(n_items, n_users, pairs));
}

PlantedData planted_communities(const PlantedConfig& config) {
    std::mt19937_64 rng(config.seed);
    const auto communities = draw_communities(config, rng);
    std::uniform_int_distribution<std::size_t> pick(0, communities.size() - 1);

    std::vector<std::pair<ItemRow, std::size_t>> pairs;
    for (std::size_t u = 0; u < config.n_users; ++u) {
        const auto& t = u < communities.size() ? communities[u] : communities[pick(rng)];
        for (const auto i : draw_member(t, config.dropout, rng)) pairs.emplace_back(i, u);
    }
    std::vector<std::size_t> kept_rows;
    PlantedData data;
    data.train = prune_empty(rating_matrix_from_pairs(config.n_items, config.n_users, pairs), &kept_rows);

    std::vector<std::size_t> remap(config.n_items, SIZE_MAX);
    for (std::size_t r = 0; r < kept_rows.size(); ++r) remap[kept_rows[r]] = r;
    for (const auto& t : communities) {
        std::vector<ItemRow> mapped;
        for (const auto i : t) {
            if (remap[i] != SIZE_MAX) mapped.push_back(remap[i]);
        }
        data.communities.push_back(std::move(mapped));
    }
    return data;
}

EvalCohort planted_cohort(const PlantedData& data, std::size_t users, double dropout,
                          std::uint64_t seed, std::size_t min_events) {
    std::vector<std::size_t> usable;
    for (std::size_t t = 0; t < data.communities.size(); ++t) {
        if (data.communities[t].size() >= min_events) usable.push_back(t);
    }
    if (usable.empty()) throw PreconditionError("planted_cohort: communities too small");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, usable.size() - 1);
    EvalCohort cohort;
    while (cohort.cases.size() < users) {
        auto items = draw_member(data.communities[usable[pick(rng)]], dropout, rng);
        if (items.size() < min_events) continue;
        std::shuffle(items.begin(), items.end(), rng);
        EvalCase c;
        c.user = "eval" + std::to_string(cohort.cases.size());
        c.target = items.back();
        items.pop_back();
        c.context = std::move(items);
        cohort.cases.push_back(std::move(c));
    }
    return cohort;
}

std::vector<Interaction> planted_interaction_log(const PlantedConfig& config) {
    std::mt19937_64 rng(config.seed);
    const auto communities = draw_communities(config, rng);
    std::uniform_int_distribution<std::size_t> pick(0, communities.size() - 1);

    std::vector<Interaction> log;
    std::int64_t clock = 0;
    for (std::size_t u = 0; u < config.n_users; ++u) {
        const auto& t = u < communities.size() ? communities[u] : communities[pick(rng)];
        auto items = draw_member(t, config.dropout, rng);
        std::shuffle(items.begin(), items.end(), rng);
        for (const auto i : items) {
            log.push_back({"u" + std::to_string(u), "i" + std::to_string(i), clock++});
        }
    }
    return log;
}

}  // namespace gsimc
