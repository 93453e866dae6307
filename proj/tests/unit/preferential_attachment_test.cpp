#include <string>

#include <gtest/gtest.h>

#include "lurkrank/error.hpp"
#include "lurkrank/preferential_attachment.hpp"
#include "oracles.hpp"
#include "planted.hpp"

using namespace lurk;
using lurk::testing::make_log;
using lurk::testing::row;

namespace {

struct Fixture {
    std::shared_ptr<const EventLog> log;
    std::vector<WeeklyCategories> weeks;
};

// Active user a<i> starts with 10 i lurker followers and gains gain(i) more in week 1.
template <typename Gain>
Fixture two_weeks(Gain gain) {
    std::vector<EventLog::Row> rows;
    int next = 0;
    for (int i = 1; i <= 4; ++i) {
        rows.push_back(row("a" + std::to_string(i), ActionKind::post, "", "", 0));
    }
    for (int i = 1; i <= 4; ++i) {
        for (int j = 0; j < 10 * i; ++j) {
            rows.push_back(row("l" + std::to_string(next++), ActionKind::follow, "a" + std::to_string(i), "", 1));
        }
    }
    for (int i = 1; i <= 4; ++i) {
        for (int j = 0; j < gain(i); ++j) {
            rows.push_back(row("l" + std::to_string(next++), ActionKind::follow, "a" + std::to_string(i), "", 9));
        }
    }
    for (; next < 200; ++next) {
        rows.push_back(row("l" + std::to_string(next), ActionKind::post, "", "", 2));
    }
    Fixture f{make_log(rows), {}};
    WeeklyCategories cats;
    for (int i = 1; i <= 4; ++i) {
        cats.active.push_back(f.log->node_id("a" + std::to_string(i)));
    }
    for (int j = 0; j < 200; ++j) {
        cats.lurkers.push_back(f.log->node_id("l" + std::to_string(j)));
    }
    f.weeks = {cats, cats};
    return f;
}

} // namespace

TEST(LeastSquares, ExactLine) {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{3, 5, 7, 9};
    const auto fit = least_squares(x, y);
    EXPECT_DOUBLE_EQ(fit.slope, 2.0);
    EXPECT_DOUBLE_EQ(fit.intercept, 1.0);
    EXPECT_DOUBLE_EQ(fit.correlation, 1.0);
    const std::vector<double> same{2, 2};
    EXPECT_THROW(least_squares(same, same), InvalidArgument);
}

TEST(LeastSquares, IntegerWeightsMatchDuplicatedPoints) {
    const std::vector<double> x{1, 2, 5, 7};
    const std::vector<double> y{0.5, 3, 2, 9};
    const std::vector<double> w{3, 1, 2, 1};
    const std::vector<double> xd{1, 1, 1, 2, 5, 5, 7};
    const std::vector<double> yd{0.5, 0.5, 0.5, 3, 2, 2, 9};
    const auto weighted = least_squares(x, y, w);
    const auto expanded = least_squares(xd, yd);
    EXPECT_NEAR(weighted.slope, expanded.slope, 1e-12);
    EXPECT_NEAR(weighted.intercept, expanded.intercept, 1e-12);
    EXPECT_NEAR(weighted.correlation, expanded.correlation, 1e-12);
}

TEST(LeastSquares, WeightErrors) {
    const std::vector<double> x{1, 2};
    EXPECT_THROW(least_squares(x, x, std::vector<double>{1, -1}), InvalidArgument);
    EXPECT_THROW(least_squares(x, x, std::vector<double>{0, 0}), InvalidArgument);
    EXPECT_THROW(least_squares(x, x, std::vector<double>{1}), InvalidArgument);
    // A zero weight drops the point, leaving one distinct x.
    EXPECT_THROW(least_squares(x, x, std::vector<double>{1, 0}), InvalidArgument);
}

TEST(PreferentialAttachment, ProportionalGain) {
    const auto f = two_weeks([](int i) { return i; });
    const auto s = preferential_attachment_series(*f.log, f.weeks, AttachmentMode::received_by_active);
    ASSERT_EQ(s.points.size(), 4u);
    EXPECT_EQ(s.points[0].k, 10u);
    EXPECT_EQ(s.points[0].avg_new_links, 1.0);
    EXPECT_NEAR(s.fit.slope, 0.1, 1e-12);
    EXPECT_NEAR(s.fit.correlation, 1.0, 1e-12);
}

TEST(PreferentialAttachment, ConstantGain) {
    const auto f = two_weeks([](int) { return 2; });
    const auto s = preferential_attachment_series(*f.log, f.weeks, AttachmentMode::received_by_active);
    EXPECT_NEAR(s.fit.slope, 0.0, 1e-12);
}

TEST(PreferentialAttachment, ProducedByLurkers) {
    const auto f = two_weeks([](int i) { return i; });
    const auto s = preferential_attachment_series(*f.log, f.weeks, AttachmentMode::produced_by_lurkers);
    ASSERT_EQ(s.points.size(), 2u);
    EXPECT_EQ(s.points[0].k, 0u);
    EXPECT_EQ(s.points[0].observations, 100u);
    EXPECT_DOUBLE_EQ(s.points[0].avg_new_links, 0.1);
    EXPECT_EQ(s.points[1].avg_new_links, 0.0);
}

TEST(PreferentialAttachment, Errors) {
    const auto f = two_weeks([](int i) { return i; });
    EXPECT_THROW(preferential_attachment_series(*f.log, std::span(f.weeks).first(1), AttachmentMode::received_by_active),
                 InvalidArgument);
    auto one_k = f.weeks;
    one_k[0].active = {f.log->node_id("a1")};
    EXPECT_THROW(preferential_attachment_series(*f.log, one_k, AttachmentMode::received_by_active), InvalidArgument);
}

TEST(PreferentialAttachment, RecoversPlantedSlope) {
    const auto planted = lurk::testing::planted_attachment(0.05, 300, 20000, 40, 6, 8);
    const auto s = preferential_attachment_series(*planted.log, planted.weeks, AttachmentMode::received_by_active,
                                                  planted.options);
    EXPECT_NEAR(s.fit.slope, 0.05, 0.005);
    EXPECT_NEAR(s.observation_fit.slope, 0.05, 0.005);
}

TEST(PreferentialAttachment, ObservationFitMatchesRawObservations) {
    const auto planted = lurk::testing::planted_attachment(0.1, 60, 3000, 15, 4, 3);
    const auto s = preferential_attachment_series(*planted.log, planted.weeks, AttachmentMode::received_by_active,
                                                  planted.options);
    // Sums of new links are integers, so re-expanding each point into its
    // observations reproduces the per-k mean exactly.
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto &pt : s.points) {
        for (std::size_t i = 0; i < pt.observations; ++i) {
            xs.push_back(pt.k);
            ys.push_back(pt.avg_new_links);
        }
    }
    const auto raw = least_squares(xs, ys);
    EXPECT_NEAR(s.observation_fit.slope, raw.slope, 1e-10);
    EXPECT_NEAR(s.observation_fit.intercept, raw.intercept, 1e-10);
}
