#include "gsimc/data.hpp"

#include "gsimc/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

namespace gsimc {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\r' || c == '\n' || c == '\t'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::optional<Interaction> parse_line(std::string_view line) {
    const char delim = line.find('\t') != std::string_view::npos ? '\t' : ',';
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        fields.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) return std::nullopt;

    std::int64_t ts = 0;
    const auto ts_field = fields[2];
    const auto [ptr, ec] = std::from_chars(ts_field.data(), ts_field.data() + ts_field.size(), ts);
    if (ec != std::errc{} || ptr != ts_field.data() + ts_field.size() || ts < 0) return std::nullopt;
    return Interaction{std::string(fields[0]), std::string(fields[1]), ts};
}

}  // namespace

InteractionLog parse_interactions(std::istream& in, bool strict) {
    InteractionLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto parsed = parse_line(line);
        if (!parsed) {
            if (log.malformed_lines++ == 0) log.first_malformed_line = line_no;
            if (strict) {
                throw ParseError("malformed interaction at line " + std::to_string(line_no) + ": '" +
                                 line + "'");
            }
            continue;
        }
        log.events.push_back(std::move(*parsed));
    }
    return log;
}

InteractionLog load_interactions(const std::filesystem::path& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open interaction file: " + path.string());
    return parse_interactions(in, strict);
}

std::vector<Interaction> prune_interactions(std::span<const Interaction> log,
                                            const PruneOptions& options) {
    std::vector<Interaction> out(log.begin(), log.end());
    if (options.min_item_users > 0) {
        std::unordered_map<std::string, std::unordered_set<std::string>> raters;
        for (const auto& e : out) raters[e.item].insert(e.user);
        std::erase_if(out, [&](const Interaction& e) {
            return raters[e.item].size() < options.min_item_users;
        });
    }
    if (options.min_user_events > 0) {
        std::unordered_map<std::string, std::size_t> counts;
        for (const auto& e : out) ++counts[e.user];
        std::erase_if(out, [&](const Interaction& e) {
            return counts[e.user] < options.min_user_events;
        });
    }
    return out;
}

std::optional<ItemRow> DatasetSplit::row_of(const std::string& item) const {
    const auto it = item_index.find(item);
    if (it == item_index.end()) return std::nullopt;
    return it->second;
}

DatasetSplit make_split(std::span<const Interaction> log,
                        std::vector<std::string> train_users,
                        std::vector<std::string> val_users,
                        std::vector<std::string> test_users,
                        SplitRatios ratios, std::uint64_t seed) {
    DatasetSplit split;
    split.ratios = ratios;
    split.seed = seed;

    std::sort(train_users.begin(), train_users.end());
    for (std::size_t j = 0; j < train_users.size(); ++j) split.user_index.emplace(train_users[j], j);

    std::set<std::string> items;
    for (const auto& e : log) {
        if (split.user_index.contains(e.user)) items.insert(e.item);
    }
    split.items.assign(items.begin(), items.end());
    for (std::size_t i = 0; i < split.items.size(); ++i) split.item_index.emplace(split.items[i], i);

    split.train_users = std::move(train_users);
    split.val_users = std::move(val_users);
    split.test_users = std::move(test_users);
    return split;
}

DatasetSplit split_users(std::span<const Interaction> log, SplitRatios ratios, std::uint64_t seed) {
    if (ratios.train == 0 || ratios.validation == 0 || ratios.test == 0) {
        throw SplitError("split ratios must be positive");
    }
    std::set<std::string> distinct;
    for (const auto& e : log) distinct.insert(e.user);
    if (distinct.size() < 3) {
        throw SplitError("need at least 3 users to split, got " + std::to_string(distinct.size()));
    }

    std::vector<std::string> users(distinct.begin(), distinct.end());
    std::mt19937_64 rng(seed);
    std::shuffle(users.begin(), users.end(), rng);

    const std::size_t n = users.size();
    const std::size_t total = ratios.train + ratios.validation + ratios.test;
    const std::size_t n_val = std::max<std::size_t>(1, n * ratios.validation / total);
    const std::size_t n_test = std::max<std::size_t>(1, n * ratios.test / total);
    const std::size_t n_train = n - n_val - n_test;
    if (n_train == 0) throw SplitError("split leaves no training users");

    const auto b = users.begin();
    std::vector<std::string> train(b, b + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::string> val(b + static_cast<std::ptrdiff_t>(n_train),
                                 b + static_cast<std::ptrdiff_t>(n_train + n_val));
    std::vector<std::string> test(b + static_cast<std::ptrdiff_t>(n_train + n_val), users.end());
    std::sort(val.begin(), val.end());
    std::sort(test.begin(), test.end());
    return make_split(log, std::move(train), std::move(val), std::move(test), ratios, seed);
}

RatingMatrix rating_matrix_from_pairs(std::size_t n_items, std::size_t n_users,
                                      std::span<const std::pair<ItemRow, std::size_t>> pairs) {
    std::vector<std::pair<ItemRow, std::size_t>> sorted(pairs.begin(), pairs.end());
    std::sort(sorted.begin(), sorted.end());
    const auto last = std::unique(sorted.begin(), sorted.end());

    RatingMatrix r;
    r.n_items = n_items;
    r.n_users = n_users;
    r.duplicates_collapsed = static_cast<std::size_t>(sorted.end() - last);
    sorted.erase(last, sorted.end());

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(sorted.size());
    for (const auto& [i, j] : sorted) {
        if (i >= n_items || j >= n_users) throw DimensionError("rating entry out of range");
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), 1.0);
    }
    r.entries.resize(static_cast<Eigen::Index>(n_items), static_cast<Eigen::Index>(n_users));
    r.entries.setFromTriplets(triplets.begin(), triplets.end());
    return r;
}

RatingMatrix build_matrix(std::span<const Interaction> log, const DatasetSplit& split) {
    std::vector<std::pair<ItemRow, std::size_t>> pairs;
    for (const auto& e : log) {
        const auto u = split.user_index.find(e.user);
        if (u == split.user_index.end()) continue;
        pairs.emplace_back(split.item_index.at(e.item), u->second);
    }
    return rating_matrix_from_pairs(split.items.size(), split.train_users.size(), pairs);
}

RatingMatrix prune_empty(const RatingMatrix& r, std::vector<std::size_t>* kept_rows,
                         std::vector<std::size_t>* kept_cols) {
    std::vector<std::size_t> row_deg(r.n_items, 0), col_deg(r.n_users, 0);
    for (int k = 0; k < r.entries.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(r.entries, k); it; ++it) {
            ++row_deg[static_cast<std::size_t>(it.row())];
            ++col_deg[static_cast<std::size_t>(it.col())];
        }
    }
    std::vector<std::size_t> row_map(r.n_items, SIZE_MAX), col_map(r.n_users, SIZE_MAX);
    std::vector<std::size_t> rows, cols;
    for (std::size_t i = 0; i < r.n_items; ++i) {
        if (row_deg[i] > 0) { row_map[i] = rows.size(); rows.push_back(i); }
    }
    for (std::size_t j = 0; j < r.n_users; ++j) {
        if (col_deg[j] > 0) { col_map[j] = cols.size(); cols.push_back(j); }
    }
    std::vector<std::pair<ItemRow, std::size_t>> pairs;
    for (int k = 0; k < r.entries.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(r.entries, k); it; ++it) {
            pairs.emplace_back(row_map[static_cast<std::size_t>(it.row())],
                               col_map[static_cast<std::size_t>(it.col())]);
        }
    }
    auto out = rating_matrix_from_pairs(rows.size(), cols.size(), pairs);
    if (kept_rows) *kept_rows = std::move(rows);
    if (kept_cols) *kept_cols = std::move(cols);
    return out;
}

Holdout holdout_last(std::span<const Interaction> events) {
    if (events.size() < 2) {
        throw HoldoutError("holdout needs at least 2 interactions, got " +
                           std::to_string(events.size()));
    }
    std::vector<Interaction> sorted(events.begin(), events.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Interaction& a, const Interaction& b) { return a.timestamp < b.timestamp; });

    Holdout h;
    h.last = sorted.back().item;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const auto& item = sorted[i].item;
        if (item == h.last || !seen.insert(item).second) continue;
        h.prefix.push_back(item);
    }
    return h;
}

std::unordered_map<std::string, std::vector<Interaction>>
group_by_user(std::span<const Interaction> log) {
    std::unordered_map<std::string, std::vector<Interaction>> by_user;
    for (const auto& e : log) by_user[e.user].push_back(e);
    return by_user;
}

EvalCohort make_eval_cohort(std::span<const Interaction> log,
                            std::span<const std::string> users,
                            const DatasetSplit& split) {
    const auto by_user = group_by_user(log);
    EvalCohort cohort;
    for (const auto& user : users) {
        const auto it = by_user.find(user);
        if (it == by_user.end() || it->second.size() < 2) {
            ++cohort.skipped_users;
            continue;
        }
        const auto h = holdout_last(it->second);
        EvalCase c;
        c.user = user;
        for (const auto& item : h.prefix) {
            if (const auto row = split.row_of(item)) {
                c.context.push_back(*row);
            } else {
                ++c.dropped_context;
            }
        }
        c.target = split.row_of(h.last);
        if (!c.target) ++cohort.unseen_targets;
        cohort.dropped_context_items += c.dropped_context;
        cohort.cases.push_back(std::move(c));
    }
    return cohort;
}

}  // namespace gsimc
