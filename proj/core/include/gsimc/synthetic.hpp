#pragma once

#include "gsimc/data.hpp"
#include "gsimc/types.hpp"

#include <cstdint>
#include <vector>

namespace gsimc {

/// Bernoulli(density) incidence with all-zero rows and columns removed.
RatingMatrix random_rating_matrix(std::size_t n_items, std::size_t n_users, double density,
                                  std::uint64_t seed);

/// Users drawn from overlapping item communities: each community is a random
/// item subset, the first `communities` users copy one community each so every
/// community is represented, and each member item is independently dropped
/// with probability `dropout`.
struct PlantedConfig {
    std::size_t n_items = 500;
    std::size_t n_users = 2000;
    std::size_t communities = 50;
    std::size_t community_size = 60;
    double dropout = 0.01;
    std::uint64_t seed = kDefaultSeed;
};

struct PlantedData {
    RatingMatrix train;                         // empty rows/columns removed
    std::vector<std::vector<ItemRow>> communities;  // in train row numbering
};

PlantedData planted_communities(const PlantedConfig& config);

/// Held-out users drawn from the same communities. Each user's kept items are
/// shuffled into a chronology; the last one is the target and the rest form
/// the context. Users with fewer than `min_events` kept items are redrawn.
EvalCohort planted_cohort(const PlantedData& data, std::size_t users, double dropout,
                          std::uint64_t seed, std::size_t min_events = 3);

/// A timestamped interaction log with the same planted structure, for
/// end-to-end runs. User ids are "u<j>", item ids "i<j>".
std::vector<Interaction> planted_interaction_log(const PlantedConfig& config);

}  // namespace gsimc
