#include <set>

#include <gtest/gtest.h>

#include "lurkrank/error.hpp"
#include "lurkrank/synthetic.hpp"

using namespace lurk;

TEST(Synthetic, ExactEventCountAndDeterminism) {
    const SyntheticParams params{.users = 300, .events = 10000};
    const auto a = generate_social_rows(params, 42);
    const auto b = generate_social_rows(params, 42);
    const auto c = generate_social_rows(params, 43);
    EXPECT_EQ(a.size(), 10000u);
    ASSERT_EQ(a.size(), b.size());
    bool same = true;
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        same = same && a[i].actor == b[i].actor && a[i].timestamp == b[i].timestamp && a[i].kind == b[i].kind;
        differs = differs || a[i].actor != c[i].actor || a[i].timestamp != c[i].timestamp;
    }
    EXPECT_TRUE(same);
    EXPECT_TRUE(differs);
}

TEST(Synthetic, RowsAreWellFormed) {
    const SyntheticParams params{.users = 100, .events = 4000, .days = 84};
    std::set<std::pair<std::string, std::string>> follows;
    for (const auto &r : generate_social_rows(params, 7)) {
        EXPECT_GE(r.timestamp, 0);
        EXPECT_LT(r.timestamp, params.days);
        EXPECT_EQ(r.actor[0], 'u');
        if (r.kind == ActionKind::post) {
            EXPECT_TRUE(r.target_node.empty());
            EXPECT_EQ(r.target_post[0], 'p');
        } else {
            EXPECT_FALSE(r.target_node.empty());
            EXPECT_NE(r.target_node, r.actor);
        }
        if (r.kind == ActionKind::follow) {
            EXPECT_TRUE(follows.emplace(r.actor, r.target_node).second);
        }
    }
    const auto log = generate_social_log(params, 7);
    EXPECT_EQ(log.size(), 4000u);
    EXPECT_GT(log.count(ActionKind::like), 0u);
    EXPECT_GT(log.count(ActionKind::follow), 0u);
}
