#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "lurkrank/event_log.hpp"

namespace lurk {

/// Closed day interval [start, end].
struct TemporalInterval {
    Day start = 0;
    Day end = 0;

    constexpr bool contains(Day t) const { return start <= t && t <= end; }
    constexpr bool intersects(Day lo, Day hi) const { return lo <= end && start <= hi; }
    constexpr bool operator==(const TemporalInterval &) const = default;
};

enum class SnapshotMode : std::uint8_t { transient, cumulative };

std::string_view to_string(SnapshotMode mode);
std::optional<SnapshotMode> parse_snapshot_mode(std::string_view text);

/// Which events induce edges.
enum class EdgePolicy : std::uint8_t { all, interaction_only, followship_only };

std::string_view to_string(EdgePolicy policy);
std::optional<EdgePolicy> parse_edge_policy(std::string_view text);

/// Selects one window of the timeline.
///
/// Sub-intervals partition the timeline as [s, s+L], (s+L, s+2L], ... so a
/// transient snapshot i covers the i-th part and a cumulative snapshot i
/// covers [s, s+(i+1)L]. With integer days every window is a closed interval.
struct SnapshotSpec {
    SnapshotMode mode = SnapshotMode::transient;
    Day interval_length = 28;
    Day start = 0;
    std::uint32_t index = 0;

    /// Throws InvalidArgument if interval_length <= 0.
    void validate() const;
    TemporalInterval window() const;

    bool operator==(const SnapshotSpec &) const = default;
};

/// Transient window of sub-interval `index` under the same partition.
TemporalInterval sub_interval(Day start, Day interval_length, std::uint32_t index);

/// Number of sub-intervals needed to cover [start, t_max].
std::uint32_t interval_count(Day start, Day interval_length, Day t_max);

struct SnapshotOptions {
    EdgePolicy edge_policy = EdgePolicy::all;
    /// Consumption kinds that induce edges.
    KindSet consumption_kinds = KindSet::consumption();
    /// Transient mode only: keep follow edges created before the window start.
    bool carry_prior_follows = false;
};

/// Directed graph for one window. Edge (u, v) means v consumes content
/// produced by u. Node indices are local and ordered by global NodeId.
class SnapshotGraph {
public:
    struct Edge {
        std::uint32_t src;
        std::uint32_t dst;
        /// Events that induced the edge, in time order.
        std::vector<std::uint32_t> events;
        Day first_ts;
        Day last_ts;
    };

    const SnapshotSpec &spec() const noexcept { return spec_; }
    TemporalInterval window() const noexcept { return window_; }
    const EventLog &log() const noexcept { return *log_; }
    const std::shared_ptr<const EventLog> &log_ptr() const noexcept { return log_; }
    const SnapshotOptions &options() const noexcept { return options_; }

    /// True when the window does not intersect the log's timespan or holds no events.
    bool empty() const noexcept { return nodes_.empty(); }

    std::size_t num_nodes() const noexcept { return nodes_.size(); }
    std::size_t num_edges() const noexcept { return edges_.size(); }

    std::span<const NodeId> nodes() const noexcept { return nodes_; }
    NodeId node(std::uint32_t local) const { return nodes_.at(local); }
    std::optional<std::uint32_t> local_index(NodeId node) const;
    bool contains(NodeId node) const { return local_index(node).has_value(); }

    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge &edge(std::uint32_t id) const { return edges_.at(id); }
    std::optional<std::uint32_t> find_edge(std::uint32_t src, std::uint32_t dst) const;

    /// Ids of edges ending at / starting from a local node.
    std::span<const std::uint32_t> in_edges(std::uint32_t local) const;
    std::span<const std::uint32_t> out_edges(std::uint32_t local) const;

    std::size_t in_degree(std::uint32_t local) const { return in_edges(local).size(); }
    std::size_t out_degree(std::uint32_t local) const { return out_edges(local).size(); }

    /// Event indices inside the window retained by the edge policy.
    std::span<const std::uint32_t> events() const noexcept { return events_; }

    /// Retained window events performed by a local node.
    std::span<const std::uint32_t> node_actions(std::uint32_t local) const;

private:
    friend SnapshotGraph build_snapshot(std::shared_ptr<const EventLog>, const SnapshotSpec &,
                                        const SnapshotOptions &);

    SnapshotSpec spec_;
    TemporalInterval window_;
    SnapshotOptions options_;
    std::shared_ptr<const EventLog> log_;

    std::vector<NodeId> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::uint32_t> events_;

    std::vector<std::uint32_t> in_offsets_, in_ids_;
    std::vector<std::uint32_t> out_offsets_, out_ids_;
    std::vector<std::uint32_t> action_offsets_, action_ids_;
};

/// Materializes the snapshot selected by `spec`. Multiple events between the
/// same ordered pair collapse into one edge; self-loops are not edges.
SnapshotGraph build_snapshot(std::shared_ptr<const EventLog> log, const SnapshotSpec &spec,
                             const SnapshotOptions &options = {});

/// Add-one smoothed (in-degree, out-degree). Throws UnknownNodeError.
std::pair<std::uint32_t, std::uint32_t> smoothed_degrees(const SnapshotGraph &g, NodeId node);

/// Edge list CSV `src,dst,event_count,first_ts,last_ts` with node names.
void write_edge_list(std::ostream &out, const SnapshotGraph &g);

} // namespace lurk
