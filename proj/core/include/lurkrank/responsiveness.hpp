#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lurkrank/event_log.hpp"

namespace lurk {

/// Right-continuous step ECDF of latencies (in days) within a horizon.
struct Ecdf {
    /// (latency, F(latency)) at each distinct latency, increasing.
    std::vector<std::pair<Day, double>> steps;
    /// Latencies within the horizon.
    std::size_t samples = 0;
    /// Latencies dropped for exceeding the horizon.
    std::size_t beyond_horizon = 0;
    Day horizon = 90;

    bool empty() const noexcept { return samples == 0; }
    double at(Day x) const;
    /// F evaluated at every day 0..horizon.
    std::vector<std::pair<Day, double>> on_grid() const;
};

/// ECDF of the latencies in [0, horizon]; longer latencies are counted in
/// `beyond_horizon` only.
Ecdf ecdf_from_latencies(std::vector<Day> latencies, Day horizon = 90);

struct ResponsivenessOptions {
    Day horizon = 90;
    /// Kinds that count as a responsive action.
    KindSet kinds = KindSet::consumption();
    /// Ignore actions after this day.
    std::optional<Day> until;
};

/// Day gaps between consecutive responsive actions of each group member. A
/// responsive action is a reaction of v to content by u while v follows u.
std::vector<Day> responsive_latencies(const EventLog &log, std::span<const NodeId> group,
                                      const ResponsivenessOptions &options = {});

/// Pooled latency ECDF of a group; `empty()` when nobody qualifies.
Ecdf responsiveness_ecdf(const EventLog &log, std::span<const NodeId> group,
                         const ResponsivenessOptions &options = {});

} // namespace lurk
