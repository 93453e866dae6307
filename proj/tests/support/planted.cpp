#include "planted.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <unordered_set>

#include "oracles.hpp"

namespace lurk::testing {

PlantedAttachment planted_attachment(double slope, std::size_t active, std::size_t lurkers, std::uint32_t max_initial,
                                     std::size_t weeks, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<EventLog::Row> rows;
    std::vector<std::unordered_set<std::size_t>> followers(active);
    std::uniform_int_distribution<std::size_t> pick_lurker(0, lurkers - 1);

    auto follow = [&](std::size_t a, Day day) {
        for (;;) {
            const auto l = pick_lurker(rng);
            if (followers[a].insert(l).second) {
                rows.push_back(row("l" + std::to_string(l), ActionKind::follow, "a" + std::to_string(a), "", day));
                return;
            }
        }
    };

    std::uniform_int_distribution<std::uint32_t> initial(1, max_initial);
    for (std::size_t a = 0; a < active; ++a) {
        const auto k = initial(rng);
        for (std::uint32_t i = 0; i < k; ++i) {
            follow(a, 0);
        }
    }
    for (std::size_t w = 1; w < weeks; ++w) {
        // Gains are drawn from the counts at the start of the week.
        std::vector<std::size_t> gains(active);
        for (std::size_t a = 0; a < active; ++a) {
            std::poisson_distribution<std::size_t> draw(slope * static_cast<double>(followers[a].size()));
            gains[a] = draw(rng);
        }
        for (std::size_t a = 0; a < active; ++a) {
            for (std::size_t i = 0; i < gains[a]; ++i) {
                follow(a, static_cast<Day>(7 * w + 3));
            }
        }
    }

    PlantedAttachment out;
    out.log = make_log(std::move(rows));
    WeeklyCategories cats;
    for (std::size_t a = 0; a < active; ++a) {
        cats.active.push_back(out.log->node_id("a" + std::to_string(a)));
    }
    for (std::size_t l = 0; l < lurkers; ++l) {
        if (const auto id = out.log->nodes().find("l" + std::to_string(l))) {
            cats.lurkers.push_back(*id);
        }
    }
    std::sort(cats.active.begin(), cats.active.end());
    std::sort(cats.lurkers.begin(), cats.lurkers.end());
    out.weeks.assign(weeks, cats);
    out.options.start = 0;
    out.options.week_length = 7;
    return out;
}

PlantedTrend planted_trend(std::size_t pieces, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> slope_of(-3, 3);
    std::uniform_int_distribution<int> length_of(8, 15);
    PlantedTrend out;
    while (out.slopes.size() < pieces) {
        const int s = slope_of(rng);
        if (out.slopes.empty() || std::abs(s - out.slopes.back()) >= 2) {
            out.slopes.push_back(s);
        }
    }
    std::int64_t level = 200;
    Day day = 0;
    out.series.push_back({static_cast<std::uint32_t>(level), day});
    for (const int s : out.slopes) {
        const int len = length_of(rng);
        for (int i = 0; i < len; ++i) {
            level += s;
            ++day;
            out.series.push_back({static_cast<std::uint32_t>(level), day});
        }
    }
    return out;
}

std::shared_ptr<const EventLog> geometric_responders(std::size_t users, std::size_t actions, double p,
                                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::geometric_distribution<Day> gap(p);
    std::vector<EventLog::Row> rows;
    std::vector<Day> days;
    for (std::size_t u = 0; u < users; ++u) {
        const auto name = "r" + std::to_string(u);
        rows.push_back(row(name, ActionKind::follow, "producer", "", 0));
        Day t = 1;
        for (std::size_t i = 0; i < actions; ++i) {
            if (i > 0) {
                t += gap(rng);
            }
            days.push_back(t);
            rows.push_back(row(name, ActionKind::like, "producer", "", t));
        }
    }
    std::sort(days.begin(), days.end());
    days.erase(std::unique(days.begin(), days.end()), days.end());
    for (const auto d : days) {
        rows.push_back(row("producer", ActionKind::post, "", "", d));
    }
    return make_log(std::move(rows));
}

} // namespace lurk::testing
