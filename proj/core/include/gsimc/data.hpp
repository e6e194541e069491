#pragma once

#include "gsimc/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace gsimc {

/// One logged user-item event.
struct Interaction {
    std::string user;
    std::string item;
    std::int64_t timestamp = 0;

    friend bool operator==(const Interaction&, const Interaction&) = default;
};

struct InteractionLog {
    std::vector<Interaction> events;
    std::size_t malformed_lines = 0;
    /// 1-based line number of the first malformed line, 0 when none.
    std::size_t first_malformed_line = 0;
};

/// Parses `user<TAB>item<TAB>timestamp` lines (comma also accepted). Blank
/// lines are ignored. With `strict`, any malformed line raises ParseError.
InteractionLog parse_interactions(std::istream& in, bool strict = false);

/// Reads an interaction log from disk. Throws IoError if unreadable.
InteractionLog load_interactions(const std::filesystem::path& path, bool strict = false);

/// Dataset-specific preprocessing. Zero disables a filter.
struct PruneOptions {
    std::size_t min_user_events = 0;
    std::size_t min_item_users = 0;
};

/// Applies the item filter, then the user filter, in a single pass each.
std::vector<Interaction> prune_interactions(std::span<const Interaction> log,
                                            const PruneOptions& options);

struct SplitRatios {
    unsigned train = 8;
    unsigned validation = 1;
    unsigned test = 1;

    friend bool operator==(const SplitRatios&, const SplitRatios&) = default;
};

/// User-level train/validation/test partition plus the dense index maps used
/// to build the rating matrix. Items and train users are kept in ascending
/// id order so that row/column numbering is independent of file order.
struct DatasetSplit {
    std::vector<std::string> train_users;
    std::vector<std::string> val_users;
    std::vector<std::string> test_users;

    std::vector<std::string> items;  // row -> item id
    std::unordered_map<std::string, ItemRow> item_index;
    std::unordered_map<std::string, std::size_t> user_index;  // train user -> column

    SplitRatios ratios;
    std::uint64_t seed = kDefaultSeed;

    [[nodiscard]] std::optional<ItemRow> row_of(const std::string& item) const;
};

/// Shuffles the distinct users with a seeded generator and partitions them by
/// `ratios`. Throws SplitError with fewer than three users.
DatasetSplit split_users(std::span<const Interaction> log,
                         SplitRatios ratios = {},
                         std::uint64_t seed = kDefaultSeed);

/// Rebuilds a split from explicit user lists (e.g. a stored manifest).
DatasetSplit make_split(std::span<const Interaction> log,
                        std::vector<std::string> train_users,
                        std::vector<std::string> val_users,
                        std::vector<std::string> test_users,
                        SplitRatios ratios, std::uint64_t seed);

/// Binary item-by-user incidence matrix. Every stored entry equals one.
struct RatingMatrix {
    std::size_t n_items = 0;
    std::size_t n_users = 0;
    SparseMatrix entries;  // n_items x n_users
    std::size_t duplicates_collapsed = 0;

    [[nodiscard]] Matrix dense() const { return Matrix(entries); }
    [[nodiscard]] std::size_t nnz() const { return static_cast<std::size_t>(entries.nonZeros()); }
};

/// One entry per distinct (item, train user) pair.
RatingMatrix build_matrix(std::span<const Interaction> log, const DatasetSplit& split);

/// Builds a rating matrix from explicit (row, column) pairs; duplicates collapse.
RatingMatrix rating_matrix_from_pairs(std::size_t n_items, std::size_t n_users,
                                      std::span<const std::pair<ItemRow, std::size_t>> pairs);

/// Drops all-zero rows and columns. `kept_rows`/`kept_cols` receive the
/// surviving original indices when non-null.
RatingMatrix prune_empty(const RatingMatrix& r,
                         std::vector<std::size_t>* kept_rows = nullptr,
                         std::vector<std::size_t>* kept_cols = nullptr);

struct Holdout {
    std::vector<std::string> prefix;  // distinct items, chronological by first occurrence
    std::string last;
};

/// Sorts one user's events by timestamp (stable, so ties keep file order) and
/// holds out the final event. Earlier events on the target item are removed
/// from the prefix. Throws HoldoutError with fewer than two events.
Holdout holdout_last(std::span<const Interaction> events);

/// Groups events by user, preserving file order within each user.
std::unordered_map<std::string, std::vector<Interaction>>
group_by_user(std::span<const Interaction> log);

/// A held-out user mapped onto the item rows of the training matrix.
struct EvalCase {
    std::string user;
    std::vector<ItemRow> context;   // known prefix items, chronological
    std::optional<ItemRow> target;  // empty when the target item has no row
    std::size_t dropped_context = 0;
};

struct EvalCohort {
    std::vector<EvalCase> cases;
    std::size_t skipped_users = 0;          // fewer than two events
    std::size_t unseen_targets = 0;         // target item absent from training
    std::size_t dropped_context_items = 0;  // prefix items absent from training
};

/// Applies holdout_last to each listed user and maps items onto rows.
EvalCohort make_eval_cohort(std::span<const Interaction> log,
                            std::span<const std::string> users,
                            const DatasetSplit& split);

}  // namespace gsimc
