#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lurkrank/event_log.hpp"

namespace lurk {

/// Knobs of the synthetic social log generator. Users split into producers,
/// lurkers and regular users; lurkers follow and consume a lot but rarely post.
struct SyntheticParams {
    std::size_t users = 400;
    std::size_t events = 10000;
    /// Timestamps fall in [0, days).
    Day days = 196;
    double producer_fraction = 0.1;
    double lurker_fraction = 0.5;
    /// Shares of follow and post events; the rest are consumptions.
    double follow_share = 0.15;
    double post_share = 0.2;
    /// Mean of the geometric delay between a post and its consumption.
    double mean_reaction_delay = 3.0;
};

/// Exactly `params.events` rows. Users are named u<k> and posts p<k>.
std::vector<EventLog::Row> generate_social_rows(const SyntheticParams &params, std::uint64_t seed);

EventLog generate_social_log(const SyntheticParams &params, std::uint64_t seed);

} // namespace lurk
