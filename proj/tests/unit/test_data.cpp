#include "gsimc/data.hpp"
#include "gsimc/errors.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace gsimc;

namespace {

std::vector<Interaction> events(std::initializer_list<Interaction> xs) { return xs; }

}  // namespace

TEST(Parse, TabAndCommaAndBlankLines) {
    std::istringstream in("u1\ti1\t5\n\nu2,i2,7\r\n  \nu3\ti3\t0\n");
    const auto log = parse_interactions(in);
    ASSERT_EQ(log.events.size(), 3u);
    EXPECT_EQ(log.events[0], (Interaction{"u1", "i1", 5}));
    EXPECT_EQ(log.events[1], (Interaction{"u2", "i2", 7}));
    EXPECT_EQ(log.malformed_lines, 0u);
}

TEST(Parse, MalformedLinesCountedOrRejected) {
    const std::string text = "u1\ti1\t5\nu2\ti2\nu3\ti3\t-4\nu4\ti4\tabc\nu5\ti5\t1\n";
    std::istringstream lenient(text);
    const auto log = parse_interactions(lenient);
    EXPECT_EQ(log.events.size(), 2u);
    EXPECT_EQ(log.malformed_lines, 3u);
    EXPECT_EQ(log.first_malformed_line, 2u);

    std::istringstream strict(text);
    try {
        parse_interactions(strict, true);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(Parse, MissingFileIsIoError) {
    EXPECT_THROW(load_interactions("/nonexistent/interactions.tsv"), IoError);
}

TEST(Prune, ItemFilterRunsBeforeUserFilter) {
    const auto log = events({{"a", "x", 1}, {"a", "y", 2}, {"b", "x", 3}, {"c", "z", 4}, {"c", "x", 5}});
    // x has 3 users, y and z have 1. Dropping y/z leaves a with 1 event.
    const auto out = prune_interactions(log, {2, 2});
    ASSERT_EQ(out.size(), 0u);
    const auto items_only = prune_interactions(log, {0, 2});
    EXPECT_EQ(items_only.size(), 3u);
    EXPECT_TRUE(std::all_of(items_only.begin(), items_only.end(), [](const auto& e) { return e.item == "x"; }));
}

TEST(Split, SizesDeterminismAndPartition) {
    std::vector<Interaction> log;
    for (int u = 0; u < 20; ++u) log.push_back({"u" + std::to_string(u), "i" + std::to_string(u % 4), u});
    const auto a = split_users(log, {8, 1, 1}, 9876);
    const auto b = split_users(log, {8, 1, 1}, 9876);
    EXPECT_EQ(a.train_users, b.train_users);
    EXPECT_EQ(a.test_users, b.test_users);
    EXPECT_EQ(a.val_users.size(), 2u);
    EXPECT_EQ(a.test_users.size(), 2u);
    EXPECT_EQ(a.train_users.size(), 16u);

    std::set<std::string> all(a.train_users.begin(), a.train_users.end());
    all.insert(a.val_users.begin(), a.val_users.end());
    all.insert(a.test_users.begin(), a.test_users.end());
    EXPECT_EQ(all.size(), 20u);
    EXPECT_TRUE(std::is_sorted(a.items.begin(), a.items.end()));

    const auto c = split_users(log, {8, 1, 1}, 1);
    EXPECT_NE(a.train_users, c.train_users);
}

TEST(Split, TooFewUsers) {
    const auto log = events({{"a", "x", 1}, {"b", "x", 2}});
    EXPECT_THROW(split_users(log), SplitError);
    const auto ok = events({{"a", "x", 1}, {"b", "x", 2}, {"c", "x", 3}});
    EXPECT_THROW(split_users(ok, {1, 0, 1}), SplitError);
}

TEST(Matrix, DuplicatesCollapseAndOnlyTrainUsersCount) {
    const auto log = events({{"a", "x", 1}, {"a", "x", 2}, {"a", "y", 3}, {"b", "y", 4}, {"t", "z", 5}});
    const auto split = make_split(log, {"b", "a"}, {}, {"t"}, {}, 1);
    EXPECT_EQ(split.items, (std::vector<std::string>{"x", "y"}));  // z only seen by a test user
    EXPECT_EQ(split.train_users, (std::vector<std::string>{"a", "b"}));
    const auto r = build_matrix(log, split);
    EXPECT_EQ(r.n_items, 2u);
    EXPECT_EQ(r.n_users, 2u);
    EXPECT_EQ(r.nnz(), 3u);
    EXPECT_EQ(r.duplicates_collapsed, 1u);
    const auto d = r.dense();
    EXPECT_EQ(d(0, 0), 1.0);
    EXPECT_EQ(d(0, 1), 0.0);
    EXPECT_EQ(d(1, 1), 1.0);
}

TEST(Matrix, PruneEmptyRowsAndColumns) {
    std::vector<std::pair<ItemRow, std::size_t>> pairs = {{0, 0}, {2, 2}};
    const auto r = rating_matrix_from_pairs(3, 3, pairs);
    std::vector<std::size_t> rows, cols;
    const auto p = prune_empty(r, &rows, &cols);
    EXPECT_EQ(p.n_items, 2u);
    EXPECT_EQ(p.n_users, 2u);
    EXPECT_EQ(rows, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(cols, (std::vector<std::size_t>{0, 2}));
    EXPECT_THROW(rating_matrix_from_pairs(1, 1, std::vector<std::pair<ItemRow, std::size_t>>{{1, 0}}), DimensionError);
}

TEST(Holdout, LastEventHeldOutWithStableTies) {
    const auto h = holdout_last(events({{"u", "b", 2}, {"u", "a", 1}, {"u", "c", 2}}));
    EXPECT_EQ(h.last, "c");  // tie on t=2 keeps file order
    EXPECT_EQ(h.prefix, (std::vector<std::string>{"a", "b"}));
}

TEST(Holdout, TargetRemovedFromPrefixAndPrefixDistinct) {
    const auto h = holdout_last(events({{"u", "a", 1}, {"u", "b", 2}, {"u", "a", 3}, {"u", "c", 4}, {"u", "b", 5}}));
    EXPECT_EQ(h.last, "b");
    EXPECT_EQ(h.prefix, (std::vector<std::string>{"a", "c"}));
}

TEST(Holdout, NeedsTwoEvents) {
    EXPECT_THROW(holdout_last(events({{"u", "a", 1}})), HoldoutError);
}

TEST(Cohort, UnseenItemsAreCounted) {
    const auto log = events({{"a", "x", 1}, {"a", "y", 2}, {"t", "x", 1}, {"t", "new", 2}, {"t", "y", 3},
                             {"v", "x", 1}, {"v", "w", 2}, {"s", "x", 1}});
    const auto split = make_split(log, {"a"}, {}, {"t", "v", "s"}, {}, 1);
    const std::vector<std::string> users = {"t", "v", "s"};
    const auto cohort = make_eval_cohort(log, users, split);
    ASSERT_EQ(cohort.cases.size(), 2u);
    EXPECT_EQ(cohort.skipped_users, 1u);  // s has one event
    EXPECT_EQ(cohort.unseen_targets, 1u);  // v's target w is unknown
    EXPECT_EQ(cohort.dropped_context_items, 1u);  // t's "new"
    EXPECT_EQ(cohort.cases[0].context, (std::vector<ItemRow>{0}));
    EXPECT_EQ(cohort.cases[0].target, std::optional<ItemRow>(1));
    EXPECT_FALSE(cohort.cases[1].target.has_value());
}

TEST(Cohort, HeldOutTargetNeverInContext) {
    std::vector<Interaction> log;
    for (int u = 0; u < 30; ++u)
        for (int t = 0; t < 6; ++t) log.push_back({"u" + std::to_string(u), "i" + std::to_string((u + t * 7) % 11), t});
    const auto split = split_users(log, {8, 1, 1}, 3);
    const auto cohort = make_eval_cohort(log, split.test_users, split);
    for (const auto& c : cohort.cases) {
        if (c.target) EXPECT_EQ(std::count(c.context.begin(), c.context.end(), *c.target), 0);
    }
}
