#include "lurkrank/responsiveness.hpp"

#include <algorithm>

#include "lurkrank/error.hpp"

namespace lurk {

double Ecdf::at(Day x) const {
    auto it = std::upper_bound(steps.begin(), steps.end(), x,
                               [](Day value, const std::pair<Day, double> &s) { return value < s.first; });
    if (it == steps.begin()) {
        return 0.0;
    }
    return std::prev(it)->second;
}

std::vector<std::pair<Day, double>> Ecdf::on_grid() const {
    std::vector<std::pair<Day, double>> grid;
    grid.reserve(static_cast<std::size_t>(horizon + 1));
    for (Day x = 0; x <= horizon; ++x) {
        grid.emplace_back(x, at(x));
    }
    return grid;
}

Ecdf ecdf_from_latencies(std::vector<Day> latencies, Day horizon) {
    if (horizon < 0) {
        throw InvalidArgument("ECDF horizon must be non-negative");
    }
    Ecdf out;
    out.horizon = horizon;
    std::sort(latencies.begin(), latencies.end());
    const auto within = std::upper_bound(latencies.begin(), latencies.end(), horizon);
    out.beyond_horizon = static_cast<std::size_t>(latencies.end() - within);
    latencies.erase(within, latencies.end());
    out.samples = latencies.size();
    const double n = static_cast<double>(latencies.size());
    for (std::size_t i = 0; i < latencies.size(); ++i) {
        if (i + 1 == latencies.size() || latencies[i + 1] != latencies[i]) {
            out.steps.emplace_back(latencies[i], static_cast<double>(i + 1) / n);
        }
    }
    return out;
}

std::vector<Day> responsive_latencies(const EventLog &log, std::span<const NodeId> group,
                                      const ResponsivenessOptions &options) {
    std::vector<Day> latencies;
    for (const auto v : group) {
        std::optional<Day> previous;
        for (const auto i : log.actions_of(v)) {
            const auto &ev = log.event(i);
            if (options.until && ev.timestamp > *options.until) {
                break;
            }
            if (!options.kinds.contains(ev.kind) || !ev.target_node) {
                continue;
            }
            const auto since = log.follow_time(*ev.target_node, v);
            if (!since || *since > ev.timestamp) {
                continue;
            }
            if (previous) {
                latencies.push_back(ev.timestamp - *previous);
            }
            previous = ev.timestamp;
        }
    }
    return latencies;
}

Ecdf responsiveness_ecdf(const EventLog &log, std::span<const NodeId> group, const ResponsivenessOptions &options) {
    return ecdf_from_latencies(responsive_latencies(log, group, options), options.horizon);
}

} // namespace lurk
