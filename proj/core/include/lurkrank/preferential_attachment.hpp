#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lurkrank/event_log.hpp"

namespace lurk {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// Pearson correlation of the fitted points.
    double correlation = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Throws InvalidArgument
/// with fewer than two distinct x values.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Weighted least squares; the correlation is the weighted one. Throws
/// InvalidArgument on negative weights or a zero total weight.
LinearFit least_squares(std::span<const double> x, std::span<const double> y, std::span<const double> weights);

enum class AttachmentMode : std::uint8_t {
    /// New links active users receive from lurkers, by current lurker-follower count.
    received_by_active,
    /// New links lurkers create toward active users, by current active-followee count.
    produced_by_lurkers,
};

/// Lurker and active-user sets in force during one week.
struct WeeklyCategories {
    std::vector<NodeId> lurkers;
    std::vector<NodeId> active;
};

struct AttachmentOptions {
    /// Day the first week starts.
    Day start = 0;
    Day week_length = 7;
    /// Event kinds that create links (follow by default).
    KindSet link_kinds{ActionKind::follow};
};

struct AttachmentPoint {
    std::uint32_t k = 0;
    double avg_new_links = 0.0;
    std::size_t observations = 0;
};

struct AttachmentSeries {
    std::vector<AttachmentPoint> points;
    /// Every point counts once, however few observations it averages.
    LinearFit fit;
    /// Points weighted by their observation count; the same line as a fit
    /// over the raw (k, new links) observations.
    LinearFit observation_fit;
};

/// Week w (w >= 1) is observed with the categories of week w - 1: every user in
/// the observed category contributes one (k, new links in week w) observation,
/// where k counts links to the opposite category formed before week w. Points
/// average the observations per k; the fit runs over the points.
///
/// Throws InvalidArgument with fewer than two weeks or fewer than two
/// distinct k values.
AttachmentSeries preferential_attachment_series(const EventLog &log, std::span<const WeeklyCategories> weeks,
                                                AttachmentMode mode, const AttachmentOptions &options = {});

} // namespace lurk
