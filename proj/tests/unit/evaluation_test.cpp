#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "lurkrank/error.hpp"
#include "lurkrank/evaluation.hpp"
#include "oracles.hpp"

using namespace lurk;
using lurk::testing::make_log;
using lurk::testing::row;

namespace {

RankingList list(std::initializer_list<NodeId> ids) { return RankingList(std::vector<NodeId>(ids)); }

std::vector<NodeId> random_perm(std::size_t n, std::mt19937_64 &rng) {
    std::vector<NodeId> v(n);
    std::iota(v.begin(), v.end(), 0);
    std::shuffle(v.begin(), v.end(), rng);
    return v;
}

} // namespace

TEST(Kendall, Anchors) {
    EXPECT_EQ(kendall_tau(list({0, 1, 2}), list({0, 1, 2})), 1.0);
    EXPECT_EQ(kendall_tau(list({0, 1, 2, 3}), list({3, 2, 1, 0})), -1.0);
    EXPECT_DOUBLE_EQ(kendall_tau(list({0, 1, 2}), list({0, 2, 1})), 1.0 / 3.0);
}

TEST(Kendall, Errors) {
    EXPECT_THROW(kendall_tau(list({0, 1}), list({0, 1, 2})), InvalidArgument);
    EXPECT_THROW(kendall_tau(list({0, 1}), list({0, 2})), InvalidArgument);
    EXPECT_THROW(kendall_tau(list({0}), list({0})), InvalidArgument);
    EXPECT_THROW(list({1, 1}), InvalidArgument);
}

TEST(Kendall, MatchesBruteForceAndIsSymmetric) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = 2 + static_cast<std::size_t>(trial % 19);
        const auto a = random_perm(n, rng);
        const auto b = random_perm(n, rng);
        const double tau = kendall_tau(RankingList(a), RankingList(b));
        EXPECT_EQ(tau, lurk::testing::brute_kendall(a, b));
        EXPECT_EQ(tau, kendall_tau(RankingList(b), RankingList(a)));
    }
}

TEST(Fagin, Anchors) {
    EXPECT_EQ(fagin_intersection(list({0, 1}), list({1, 0}), 2), 0.5);
    EXPECT_EQ(fagin_intersection(list({0, 1, 2, 3}), list({2, 3, 0, 1}), 2), 0.0);
    for (std::size_t k = 1; k <= 4; ++k) {
        EXPECT_EQ(fagin_intersection(list({3, 1, 0, 2}), list({3, 1, 0, 2}), k), 1.0);
    }
    EXPECT_EQ(fagin_intersection(list({0, 1, 7}), list({0, 1, 9, 8}), 2), 1.0);
    EXPECT_THROW(fagin_intersection(list({0, 1}), list({0, 1}), 0), InvalidArgument);
    EXPECT_THROW(fagin_intersection(list({0, 1}), list({0, 1}), 3), InvalidArgument);
}

TEST(Fagin, MatchesBruteForce) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = 1 + static_cast<std::size_t>(trial % 20);
        const auto a = random_perm(n, rng);
        const auto b = random_perm(n, rng);
        const auto k = 1 + rng() % n;
        EXPECT_EQ(fagin_intersection(RankingList(a), RankingList(b), k), lurk::testing::brute_fagin(a, b, k));
    }
}

TEST(TopK, Ceiling) {
    EXPECT_EQ(top_k(8, 0.25), 2u);
    EXPECT_EQ(top_k(9, 0.25), 3u);
    EXPECT_EQ(top_k(1, 0.25), 1u);
}

TEST(Normalize, Examples) {
    RankVector r;
    r.nodes = {0, 1};
    r.scores = {1.0, 3.0};
    EXPECT_EQ(normalize_scores(r, ScoreNormalization::minmax).scores, (std::vector<double>{0.0, 1.0}));
    EXPECT_EQ(normalize_scores(r, ScoreNormalization::sum1).scores, (std::vector<double>{0.25, 0.75}));
    r.scores = {2.0, 2.0};
    EXPECT_EQ(normalize_scores(r, ScoreNormalization::minmax).scores, (std::vector<double>{0.5, 0.5}));
    r.scores = {0.0, 0.0};
    EXPECT_EQ(normalize_scores(r, ScoreNormalization::sum1).scores, (std::vector<double>{0.0, 0.0}));
    EXPECT_THROW(normalize_scores(RankVector{}, ScoreNormalization::minmax), InvalidArgument);
}

TEST(DataDriven, Examples) {
    std::vector<EventLog::Row> rows{
        row("u", ActionKind::post, "", "p1", 0),
        row("u", ActionKind::post, "", "p2", 1),
        row("v", ActionKind::post, "", "q1", 2),
        row("v", ActionKind::post, "", "q2", 3),
        row("w", ActionKind::post, "", "r1", 4),
        row("w", ActionKind::follow, "u", "", 5),
    };
    for (int i = 0; i < 6; ++i) {
        rows.push_back(row("v", ActionKind::favorite, "u", i % 2 ? "p1" : "p2", 5 + i));
    }
    for (int i = 0; i < 3; ++i) {
        rows.push_back(row("z", ActionKind::favorite, "u", "p1", 12 + i));
    }
    rows.push_back(row("z", ActionKind::comment, "v", "q1", 20));
    const auto log = make_log(rows);
    const auto g = build_snapshot(log, {SnapshotMode::transient, 28, 0, 0});
    const auto dd = data_driven_rank(g);
    EXPECT_EQ(dd.algorithm, Algorithm::dd);
    EXPECT_EQ(dd.score_of(log->node_id("v")), 2.0);
    EXPECT_EQ(dd.score_of(log->node_id("z")), 3.0);
    EXPECT_EQ(dd.score_of(log->node_id("w")), 0.0);
    EXPECT_EQ(dd.score_of(log->node_id("u")), 0.0);

    const auto with_comments =
        data_driven_rank(g, {.counted_kinds = KindSet::consumption()});
    EXPECT_EQ(with_comments.score_of(log->node_id("z")), 4.0);
}

TEST(DataDriven, IgnoresEventsOutsideTheWindow) {
    const std::vector<EventLog::Row> base{
        row("u", ActionKind::post, "", "p", 30),
        row("v", ActionKind::like, "u", "p", 31),
        row("v", ActionKind::post, "", "q", 40),
    };
    auto extended = base;
    extended.push_back(row("v", ActionKind::like, "u", "p", 2));
    extended.push_back(row("v", ActionKind::post, "", "x", 70));
    extended.push_back(row("v", ActionKind::like, "u", "p", 80));
    const auto a = make_log(base);
    const auto b = make_log(extended);
    const auto ga = build_snapshot(a, {SnapshotMode::transient, 28, 0, 1});
    const auto gb = build_snapshot(b, {SnapshotMode::transient, 28, 0, 1});
    EXPECT_EQ(data_driven_rank(ga).score_of(a->node_id("v")), 0.5);
    EXPECT_EQ(data_driven_rank(gb).score_of(b->node_id("v")), 0.5);
}

TEST(EvaluateAgainst, RestrictsToSharedNodesAndWritesCsv) {
    RankVector a;
    a.spec = {SnapshotMode::transient, 28, 0, 1};
    a.algorithm = Algorithm::lr;
    a.nodes = {0, 1, 2, 3};
    a.scores = {4.0, 3.0, 2.0, 1.0};
    RankVector ref = a;
    ref.algorithm = Algorithm::dd;
    ref.nodes = {0, 1, 2, 5};
    ref.scores = {1.0, 2.0, 3.0, 9.0};
    const auto r = evaluate_against(a, ref);
    EXPECT_EQ(r.snapshot_end, 56);
    EXPECT_EQ(r.algorithm, "LR");
    EXPECT_EQ(r.kendall_tau, -1.0);
    EXPECT_EQ(r.fagin_at_25, 0.0);

    RankVector lonely = a;
    lonely.nodes = {0};
    lonely.scores = {1.0};
    const auto nan_row = evaluate_against(lonely, ref);
    EXPECT_TRUE(std::isnan(nan_row.kendall_tau));
    EXPECT_EQ(nan_row.fagin_at_25, 1.0);

    std::ostringstream out;
    const std::vector<EvaluationRow> rows{r};
    write_evaluation_csv(out, rows);
    EXPECT_EQ(out.str(), "snapshot_end,algorithm,kendall_tau,fagin_at_25\n56,LR,-1,0\n");
}
