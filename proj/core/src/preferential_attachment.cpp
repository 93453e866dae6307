#include "lurkrank/preferential_attachment.hpp"

#include <cmath>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "lurkrank/error.hpp"

namespace lurk {

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    const std::vector<double> ones(x.size(), 1.0);
    return least_squares(x, y, ones);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y, std::span<const double> weights) {
    if (x.size() != y.size() || x.size() != weights.size()) {
        throw InvalidArgument("least_squares: x, y and weights differ in length");
    }
    double total = 0.0;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(weights[i] >= 0.0)) {
            throw InvalidArgument("least_squares: weights must be non-negative");
        }
        total += weights[i];
        mx += weights[i] * x[i];
        my += weights[i] * y[i];
    }
    if (total <= 0.0) {
        throw InvalidArgument("least_squares: total weight is zero");
    }
    mx /= total;
    my /= total;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += weights[i] * (x[i] - mx) * (x[i] - mx);
        sxy += weights[i] * (x[i] - mx) * (y[i] - my);
        syy += weights[i] * (y[i] - my) * (y[i] - my);
    }
    if (x.size() < 2 || sxx == 0.0) {
        throw InvalidArgument("linear fit needs at least two distinct x values");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.correlation = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
    return fit;
}

AttachmentSeries preferential_attachment_series(const EventLog &log, std::span<const WeeklyCategories> weeks,
                                                AttachmentMode mode, const AttachmentOptions &options) {
    if (weeks.size() < 2) {
        throw InvalidArgument("preferential attachment needs at least two weekly windows");
    }
    if (options.week_length <= 0) {
        throw InvalidArgument("week length must be positive");
    }

    // Links as (producer, consumer): the consumer follows / reacts to the producer.
    std::unordered_set<std::uint64_t> existing;
    std::unordered_map<NodeId, std::vector<NodeId>> consumers_of;
    std::unordered_map<NodeId, std::vector<NodeId>> producers_of;
    auto add_link = [&](NodeId producer, NodeId consumer) {
        if (existing.insert(pair_key(producer, consumer)).second) {
            consumers_of[producer].push_back(consumer);
            producers_of[consumer].push_back(producer);
            return true;
        }
        return false;
    };

    const auto events = log.events();
    std::size_t cursor = 0;
    auto is_link = [&](const ActionEvent &ev) {
        return options.link_kinds.contains(ev.kind) && ev.target_node && *ev.target_node != ev.actor;
    };
    // Links formed before the first week.
    while (cursor < events.size() && events[cursor].timestamp < options.start) {
        if (is_link(events[cursor])) {
            add_link(*events[cursor].target_node, events[cursor].actor);
        }
        ++cursor;
    }

    std::map<std::uint32_t, std::pair<double, std::size_t>> by_k;
    for (std::size_t w = 0; w < weeks.size(); ++w) {
        const Day week_end = options.start + static_cast<Day>(w + 1) * options.week_length;
        if (w == 0) {
            while (cursor < events.size() && events[cursor].timestamp < week_end) {
                if (is_link(events[cursor])) {
                    add_link(*events[cursor].target_node, events[cursor].actor);
                }
                ++cursor;
            }
            continue;
        }
        const auto &cats = weeks[w - 1];
        const std::unordered_set<NodeId> lurkers(cats.lurkers.begin(), cats.lurkers.end());
        const std::unordered_set<NodeId> active(cats.active.begin(), cats.active.end());
        const bool received = mode == AttachmentMode::received_by_active;
        const auto &subjects = received ? cats.active : cats.lurkers;
        const auto &partners = received ? lurkers : active;

        std::unordered_map<NodeId, std::uint32_t> k_of;
        std::unordered_map<NodeId, std::uint32_t> gained;
        for (const auto s : subjects) {
            const auto &nbrs = received ? consumers_of[s] : producers_of[s];
            std::uint32_t k = 0;
            for (const auto x : nbrs) {
                k += partners.contains(x) ? 1 : 0;
            }
            k_of[s] = k;
            gained[s] = 0;
        }
        while (cursor < events.size() && events[cursor].timestamp < week_end) {
            const auto &ev = events[cursor++];
            if (!is_link(ev)) {
                continue;
            }
            const NodeId producer = *ev.target_node;
            const NodeId consumer = ev.actor;
            if (!add_link(producer, consumer)) {
                continue;
            }
            const NodeId subject = received ? producer : consumer;
            const NodeId partner = received ? consumer : producer;
            auto it = gained.find(subject);
            if (it != gained.end() && partners.contains(partner)) {
                ++it->second;
            }
        }
        for (const auto s : subjects) {
            auto &slot = by_k[k_of[s]];
            slot.first += gained[s];
            ++slot.second;
        }
    }

    AttachmentSeries out;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> ws;
    for (const auto &[k, slot] : by_k) {
        const double avg = slot.first / static_cast<double>(slot.second);
        out.points.push_back({k, avg, slot.second});
        xs.push_back(k);
        ys.push_back(avg);
        ws.push_back(static_cast<double>(slot.second));
    }
    out.fit = least_squares(xs, ys);
    out.observation_fit = least_squares(xs, ys, ws);
    return out;
}

} // namespace lurk
