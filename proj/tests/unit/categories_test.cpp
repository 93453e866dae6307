#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lurkrank/categories.hpp"
#include "lurkrank/error.hpp"
#include "lurkrank/synthetic.hpp"
#include "oracles.hpp"

using namespace lurk;
using lurk::testing::make_log;
using lurk::testing::row;

namespace {

bool has(const std::vector<NodeId> &set, NodeId v) { return std::binary_search(set.begin(), set.end(), v); }

} // namespace

TEST(Categories, PotentialLurkersNewcomersZeroContributors) {
    const auto log = make_log({
        row("hub", ActionKind::post, "", "p", 0),
        row("pal", ActionKind::post, "", "q", 0),
        row("pal", ActionKind::like, "hub", "p", 1),
        row("hub", ActionKind::like, "pal", "q", 1),
        row("sink", ActionKind::like, "hub", "p", 30),
        row("sink", ActionKind::like, "pal", "q", 30),
        row("sink", ActionKind::follow, "x", "", 31),
        row("hub", ActionKind::post, "", "p2", 32),
        row("pal", ActionKind::like, "hub", "p2", 33),
        row("quiet", ActionKind::follow, "hub", "", 40),
    });
    const auto g = build_snapshot(log, {SnapshotMode::transient, 28, 0, 1});
    const auto c = classify_users(g, lurker_rank(g), 0.25);
    const auto sink = log->node_id("sink");
    const auto pal = log->node_id("pal");
    const auto hub = log->node_id("hub");
    const auto quiet = log->node_id("quiet");

    EXPECT_EQ(c.interval_index, 1u);
    EXPECT_TRUE(has(c.potential_lurkers, sink));
    EXPECT_TRUE(has(c.potential_lurkers, quiet));
    EXPECT_FALSE(has(c.potential_lurkers, hub));
    // pal: in 1 (from hub), out 1 (to sink): ratio exactly one.
    EXPECT_FALSE(has(c.potential_lurkers, pal));

    EXPECT_TRUE(has(c.newcomers, sink));
    EXPECT_TRUE(has(c.newcomers, quiet));
    EXPECT_FALSE(has(c.newcomers, hub));

    EXPECT_TRUE(has(c.zero_contributors, quiet));
    EXPECT_FALSE(has(c.zero_contributors, sink));
    EXPECT_FALSE(has(c.zero_contributors, hub));

    const auto k = static_cast<std::size_t>(std::ceil(0.25 * static_cast<double>(g.num_nodes())));
    EXPECT_EQ(c.top_lurkers.size(), k);
    EXPECT_EQ(c.bottom_active.size(), k);
}

TEST(Categories, ZeroContributorScope) {
    const auto log = make_log({
        row("a", ActionKind::post, "", "p", 0),
        row("b", ActionKind::like, "a", "p", 1),
        row("b", ActionKind::follow, "a", "", 40),
        row("a", ActionKind::follow, "b", "", 41),
    });
    const auto g = build_snapshot(log, {SnapshotMode::transient, 28, 0, 1});
    const auto rank = lurker_rank(g);
    const auto hist = classify_users(g, rank, 0.5, ZeroContributorScope::history);
    const auto win = classify_users(g, rank, 0.5, ZeroContributorScope::window);
    EXPECT_TRUE(hist.zero_contributors.empty());
    EXPECT_EQ(win.zero_contributors.size(), 2u);
}

TEST(Categories, RejectsBadFraction) {
    const auto log = make_log({row("a", ActionKind::post, "", "p", 0)});
    const auto g = build_snapshot(log, {SnapshotMode::transient, 28, 0, 0});
    RankVector r;
    r.nodes = {0};
    r.scores = {1.0};
    EXPECT_THROW(classify_users(g, r, 0.0, {}), InvalidArgument);
    EXPECT_THROW(classify_users(g, r, 1.5, {}), InvalidArgument);
    EXPECT_NO_THROW(classify_users(g, r, 1.0, {}));
}

TEST(Categories, UnchangedByLaterEvents) {
    const auto rows = generate_social_rows({.users = 100, .events = 3000, .days = 120}, 13);
    std::vector<EventLog::Row> early;
    for (const auto &r : rows) {
        if (r.timestamp <= 56) {
            early.push_back(r);
        }
    }
    const auto full = make_log(rows);
    const auto cut = make_log(early);
    const SnapshotSpec spec{SnapshotMode::transient, 28, 0, 1};
    const auto gf = build_snapshot(full, spec);
    const auto gc = build_snapshot(cut, spec);
    const auto cf = classify_users(gf, lurker_rank(gf), 0.25);
    const auto cc = classify_users(gc, lurker_rank(gc), 0.25);
    auto names = [](const EventLog &log, const std::vector<NodeId> &ids) {
        std::vector<std::string> out;
        for (const auto id : ids) {
            out.push_back(log.nodes().name(id));
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    EXPECT_EQ(names(*full, cf.potential_lurkers), names(*cut, cc.potential_lurkers));
    EXPECT_EQ(names(*full, cf.zero_contributors), names(*cut, cc.zero_contributors));
    EXPECT_EQ(names(*full, cf.newcomers), names(*cut, cc.newcomers));
    EXPECT_EQ(names(*full, cf.top_lurkers), names(*cut, cc.top_lurkers));
    EXPECT_EQ(names(*full, cf.bottom_active), names(*cut, cc.bottom_active));
}

TEST(Overlap, Examples) {
    const std::vector<NodeId> a{1, 2, 3, 4};
    const std::vector<NodeId> b{2, 3, 4, 8, 9};
    EXPECT_EQ(overlap_ratio(a, a, OverlapDenominator::first), 1.0);
    EXPECT_EQ(overlap_ratio(a, std::vector<NodeId>{7}, OverlapDenominator::second), 0.0);
    EXPECT_EQ(overlap_ratio(a, b, OverlapDenominator::second), 0.6);
    EXPECT_THROW(overlap_ratio(a, std::vector<NodeId>{}, OverlapDenominator::second), InvalidArgument);
}

TEST(Overlap, BoundedAndSwapSymmetric) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<NodeId> a;
        std::vector<NodeId> b;
        for (NodeId v = 0; v < 30; ++v) {
            if (rng() % 3 == 0) a.push_back(v);
            if (rng() % 3 == 0) b.push_back(v);
        }
        if (a.empty() || b.empty()) continue;
        const double ab = overlap_ratio(a, b, OverlapDenominator::first);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 1.0);
        EXPECT_EQ(ab, overlap_ratio(b, a, OverlapDenominator::second));
    }
}
