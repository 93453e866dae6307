#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lurkrank/rankers.hpp"
#include "lurkrank/snapshot.hpp"

namespace lurk {

/// Whether zero-contributors are judged over all history up to the window
/// end or over the window alone.
enum class ZeroContributorScope : std::uint8_t { history, window };

/// User categories of one snapshot. Every set is sorted by node id.
struct UserCategorySnapshot {
    std::uint32_t interval_index = 0;
    TemporalInterval window;
    /// Raw in/out-degree ratio above one, or sinks with at least one in-edge.
    std::vector<NodeId> potential_lurkers;
    /// No post, comment, favorite or like in scope.
    std::vector<NodeId> zero_contributors;
    /// No interaction with another user before the window start.
    std::vector<NodeId> newcomers;
    /// ceil(p |V|) best-ranked nodes.
    std::vector<NodeId> top_lurkers;
    /// ceil(p |V|) worst-ranked nodes.
    std::vector<NodeId> bottom_active;
};

/// Throws InvalidArgument unless 0 < p <= 1.
UserCategorySnapshot classify_users(const SnapshotGraph &g, const RankVector &rank, double p,
                                    ZeroContributorScope scope = ZeroContributorScope::history);

enum class OverlapDenominator : std::uint8_t { first, second };

/// |A ∩ B| / |A| or / |B|. Throws InvalidArgument if the denominator set is empty.
double overlap_ratio(std::span<const NodeId> a, std::span<const NodeId> b, OverlapDenominator denom);

} // namespace lurk
