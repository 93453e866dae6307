#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "lurkrank/error.hpp"
#include "lurkrank/snapshot.hpp"
#include "lurkrank/synthetic.hpp"
#include "oracles.hpp"

using namespace lurk;
using lurk::testing::make_log;
using lurk::testing::row;

namespace {

std::shared_ptr<const EventLog> two_month_log() {
    return make_log({
        row("a", ActionKind::post, "", "p1", 0),
        row("b", ActionKind::like, "a", "p1", 10),
        row("c", ActionKind::follow, "a", "", 28),
        row("d", ActionKind::favorite, "b", "", 29),
        row("a", ActionKind::comment, "d", "", 55),
    });
}

std::set<std::uint32_t> refilter(const EventLog &log, TemporalInterval w) {
    std::set<std::uint32_t> out;
    for (std::uint32_t i = 0; i < log.size(); ++i) {
        if (w.contains(log.event(i).timestamp)) {
            out.insert(i);
        }
    }
    return out;
}

} // namespace

TEST(Snapshot, Windows) {
    EXPECT_EQ((SnapshotSpec{SnapshotMode::transient, 28, 0, 0}.window()), (TemporalInterval{0, 28}));
    EXPECT_EQ((SnapshotSpec{SnapshotMode::transient, 28, 0, 1}.window()), (TemporalInterval{29, 56}));
    EXPECT_EQ((SnapshotSpec{SnapshotMode::cumulative, 28, 0, 1}.window()), (TemporalInterval{0, 56}));
    EXPECT_EQ(interval_count(0, 28, 55), 2u);
    EXPECT_EQ(interval_count(0, 28, 56), 2u);
    EXPECT_EQ(interval_count(0, 28, 57), 3u);
    EXPECT_EQ(interval_count(5, 28, 5), 1u);
    EXPECT_THROW((SnapshotSpec{SnapshotMode::transient, 0, 0, 0}.validate()), InvalidArgument);
}

TEST(Snapshot, TransientIndexZeroKeepsDaysZeroThrough28) {
    const auto log = two_month_log();
    const auto g = build_snapshot(log, {SnapshotMode::transient, 28, 0, 0});
    const std::set<std::uint32_t> got(g.events().begin(), g.events().end());
    EXPECT_EQ(got, (std::set<std::uint32_t>{0, 1, 2}));
    EXPECT_EQ(g.num_nodes(), 3u);
    EXPECT_EQ(g.num_edges(), 2u);
}

TEST(Snapshot, CumulativeIndexOneKeepsEverything) {
    const auto log = two_month_log();
    const auto g = build_snapshot(log, {SnapshotMode::cumulative, 28, 0, 1});
    EXPECT_EQ(g.events().size(), 5u);
    EXPECT_EQ(g.num_nodes(), 4u);
    EXPECT_EQ(g.num_edges(), 4u);
}

TEST(Snapshot, EdgeDirectionIsProducerToConsumer) {
    const auto log = two_month_log();
    const auto g = build_snapshot(log, {SnapshotMode::transient, 28, 0, 0});
    const auto a = *g.local_index(log->node_id("a"));
    const auto b = *g.local_index(log->node_id("b"));
    const auto c = *g.local_index(log->node_id("c"));
    EXPECT_TRUE(g.find_edge(a, b));
    EXPECT_TRUE(g.find_edge(a, c));
    EXPECT_FALSE(g.find_edge(b, a));
}

TEST(Snapshot, DisjointWindowIsEmptyNotAnError) {
    const auto log = two_month_log();
    const auto g = build_snapshot(log, {SnapshotMode::transient, 28, 0, 5});
    EXPECT_TRUE(g.empty());
    EXPECT_EQ(g.num_edges(), 0u);
}

TEST(Snapshot, MultiEventsCollapseAndSelfLoopsDrop) {
    const auto log = make_log({
        row("a", ActionKind::post, "", "p", 0),
        row("b", ActionKind::like, "a", "p", 1),
        row("b", ActionKind::like, "a", "p", 3),
        row("b", ActionKind::comment, "a", "p", 2),
        row("a", ActionKind::like, "a", "p", 2),
    });
    const auto g = build_snapshot(log, {SnapshotMode::transient, 28, 0, 0});
    ASSERT_EQ(g.num_edges(), 1u);
    const auto &e = g.edge(0);
    EXPECT_EQ(e.events.size(), 3u);
    EXPECT_EQ(e.first_ts, 1);
    EXPECT_EQ(e.last_ts, 3);
    std::ostringstream out;
    write_edge_list(out, g);
    EXPECT_EQ(out.str(), "src,dst,event_count,first_ts,last_ts\na,b,3,1,3\n");
}

TEST(Snapshot, EdgePolicies) {
    const auto log = two_month_log();
    const SnapshotSpec all{SnapshotMode::cumulative, 28, 0, 1};
    const auto interactions = build_snapshot(log, all, {.edge_policy = EdgePolicy::interaction_only});
    const auto follows = build_snapshot(log, all, {.edge_policy = EdgePolicy::followship_only});
    EXPECT_EQ(interactions.num_edges(), 3u);
    EXPECT_EQ(follows.num_edges(), 1u);
    const auto no_comments = build_snapshot(
        log, all, {.consumption_kinds = KindSet::consumption().without(ActionKind::comment)});
    EXPECT_EQ(no_comments.num_edges(), 3u);
}

TEST(Snapshot, CarryPriorFollows) {
    const auto log = two_month_log();
    const SnapshotSpec second{SnapshotMode::transient, 28, 0, 1};
    const auto plain = build_snapshot(log, second);
    const auto carried = build_snapshot(log, second, {.carry_prior_follows = true});
    EXPECT_FALSE(plain.contains(log->node_id("c")));
    EXPECT_TRUE(carried.contains(log->node_id("c")));
    EXPECT_EQ(carried.num_edges(), plain.num_edges() + 1);
}

TEST(Snapshot, SmoothedDegrees) {
    const auto log = make_log({
        row("a", ActionKind::post, "", "p", 0),
        row("s", ActionKind::like, "a", "", 1),
        row("s", ActionKind::like, "b", "", 1),
        row("s", ActionKind::like, "c", "", 1),
        row("z", ActionKind::post, "", "q", 2),
    });
    const auto g = build_snapshot(log, {SnapshotMode::transient, 28, 0, 0});
    EXPECT_EQ(smoothed_degrees(g, log->node_id("s")), std::make_pair(4u, 1u));
    EXPECT_EQ(smoothed_degrees(g, log->node_id("z")), std::make_pair(1u, 1u));
    EXPECT_EQ(smoothed_degrees(g, log->node_id("a")), std::make_pair(1u, 2u));
    const auto other = make_log({row("q", ActionKind::post, "", "", 0), row("a", ActionKind::post, "", "", 40)});
    const auto early = build_snapshot(other, {SnapshotMode::transient, 28, 0, 0});
    EXPECT_THROW(smoothed_degrees(early, other->node_id("a")), UnknownNodeError);
}

TEST(Snapshot, RandomGraphDegreesMatchAdjacencyRecount) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto dense = lurk::testing::random_dense_graph(12, 0.3, rng);
        const auto log = lurk::testing::log_from_graph(dense);
        const auto g = build_snapshot(log, {SnapshotMode::transient, 28, 0, 0});
        for (std::size_t k = 0; k < dense.n; ++k) {
            std::uint32_t in = 1;
            std::uint32_t out = 1;
            for (std::size_t j = 0; j < dense.n; ++j) {
                in += dense.adj[j][k] ? 1 : 0;
                out += dense.adj[k][j] ? 1 : 0;
            }
            EXPECT_EQ(smoothed_degrees(g, log->node_id("n" + std::to_string(k))), std::make_pair(in, out));
        }
    }
}

TEST(Snapshot, EventSetsAreWindowFiltersAndCumulativeGrows) {
    const auto log = std::make_shared<const EventLog>(generate_social_log({.users = 80, .events = 2000, .days = 150}, 5));
    const auto count = interval_count(0, 28, log->t_max());
    std::set<NodeId> prev_nodes;
    std::set<std::uint32_t> prev_events;
    std::size_t prev_edges = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto t = build_snapshot(log, {SnapshotMode::transient, 28, 0, i});
        EXPECT_EQ(std::set<std::uint32_t>(t.events().begin(), t.events().end()), refilter(*log, t.window()));

        const auto c = build_snapshot(log, {SnapshotMode::cumulative, 28, 0, i});
        const std::set<NodeId> nodes(c.nodes().begin(), c.nodes().end());
        const std::set<std::uint32_t> events(c.events().begin(), c.events().end());
        EXPECT_TRUE(std::includes(nodes.begin(), nodes.end(), prev_nodes.begin(), prev_nodes.end()));
        EXPECT_TRUE(std::includes(events.begin(), events.end(), prev_events.begin(), prev_events.end()));
        EXPECT_GE(c.num_edges(), prev_edges);
        for (const auto &e : c.edges()) {
            for (const auto ev : e.events) {
                EXPECT_TRUE(c.window().contains(log->event(ev).timestamp));
            }
        }
        prev_nodes = nodes;
        prev_events = events;
        prev_edges = c.num_edges();
    }
}

TEST(Snapshot, ModeAndPolicyNames) {
    EXPECT_EQ(parse_snapshot_mode("cumulative"), SnapshotMode::cumulative);
    EXPECT_FALSE(parse_snapshot_mode("monthly"));
    EXPECT_EQ(parse_edge_policy("followship"), EdgePolicy::followship_only);
    EXPECT_EQ(to_string(EdgePolicy::interaction_only), "interaction");
}
