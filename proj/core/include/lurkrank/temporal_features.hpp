#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "lurkrank/event_log.hpp"
#include "lurkrank/snapshot.hpp"

namespace lurk {

/// 1 / log2(2 + (T.end - t)) inside T, 0 outside.
double freshness_kernel(Day t, TemporalInterval T);

/// (count, day) pairs, strictly increasing in day; zero-count days omitted.
struct ActivityPoint {
    std::uint32_t count;
    Day time;

    bool operator==(const ActivityPoint &) const = default;
};
using ActivitySeries = std::vector<ActivityPoint>;

/// One DSA segment: a run of source points with close derivatives.
struct DsaSegment {
    /// arctan(mean derivative) / pi + 1/2, so 0.5 is flat.
    double alpha_hat;
    /// Day of the segment's last source point.
    Day end_time;
    /// Number of source points in the segment.
    std::uint32_t length;
};

/// Derivative time series Segment Approximation of an activity series.
///
/// Segment j covers the days (end_{j-1}, end_j]; the first segment starts at
/// the first source day.
struct DsaSeries {
    std::vector<DsaSegment> segments;
    std::size_t source_length = 0;
    Day start_time = 0;

    bool empty() const noexcept { return segments.empty(); }
};

/// First-derivative estimate per point: backward difference over the actual
/// day gap, with the forward difference at the first point.
std::vector<double> derivative_estimate(const ActivitySeries &series);

/// Default segmentation threshold: half the population standard deviation of
/// the derivative series.
double default_dsa_epsilon(std::span<const double> derivatives);

/// Throws InvalidArgument on an empty series. A single point yields one
/// neutral segment (alpha_hat = 0.5).
DsaSeries dsa_transform(const ActivitySeries &series, std::optional<double> epsilon = std::nullopt);

/// Mean alpha_hat over segments whose span intersects T; 0 if none does.
double average_activity(const DsaSeries &dsa, TemporalInterval T);

/// Per-day counts of every action performed by `node`. Throws UnknownNodeError.
ActivitySeries node_activity_series(const EventLog &log, NodeId node);

/// Per-day counts of consumption actions by `consumer` targeting `producer`.
ActivitySeries interaction_activity_series(const EventLog &log, NodeId producer, NodeId consumer,
                                           KindSet kinds = KindSet::consumption());

/// Max kernel value over the node's action days inside T; 0 if it has none.
/// Throws UnknownNodeError.
double user_freshness(const EventLog &log, NodeId node, TemporalInterval T);

/// Max of 1/log2(2 + (t_c - t_p)) over (production, consumption) pairs of
/// u -> v lying inside T; 0 if there are none.
///
/// The production day comes from the consumed post id when the log knows it,
/// else from the producer's latest post at or before the consumption day.
double interaction_freshness(const EventLog &log, NodeId producer, NodeId consumer, TemporalInterval T,
                             KindSet kinds = KindSet::consumption());

struct FeatureOptions {
    /// Fixed DSA threshold; the scale-relative default when unset.
    std::optional<double> dsa_epsilon;
    KindSet consumption_kinds = KindSet::consumption();
};

/// Freshness and average activity of every node and edge of one snapshot,
/// indexed by local node index and edge id.
struct TransientFeatures {
    std::vector<double> node_freshness;
    std::vector<double> node_activity;
    std::vector<double> edge_freshness;
    std::vector<double> edge_activity;
};

/// Precomputes DSA series for every node and consumption pair of a log so
/// per-window queries are cheap. Immutable after construction.
class FeatureExtractor {
public:
    explicit FeatureExtractor(std::shared_ptr<const EventLog> log, FeatureOptions options = {});

    const EventLog &log() const noexcept { return *log_; }
    const FeatureOptions &options() const noexcept { return options_; }

    double user_freshness(NodeId node, TemporalInterval T) const;
    double average_activity(NodeId node, TemporalInterval T) const;
    double interaction_freshness(NodeId producer, NodeId consumer, TemporalInterval T) const;
    double interaction_activity(NodeId producer, NodeId consumer, TemporalInterval T) const;

    const DsaSeries &node_trend(NodeId node) const;
    /// Empty series when the pair never interacted.
    const DsaSeries &interaction_trend(NodeId producer, NodeId consumer) const;

    /// Features of `g` over interval T (the snapshot window by default).
    TransientFeatures transient(const SnapshotGraph &g, std::optional<TemporalInterval> T = std::nullopt) const;

private:
    std::shared_ptr<const EventLog> log_;
    FeatureOptions options_;
    std::vector<DsaSeries> node_trends_;
    std::unordered_map<std::uint64_t, DsaSeries> pair_trends_;
};

/// Whether the normalization maximum in cf' / ca' ranges over past and
/// current sub-intervals only, or over every sub-interval supplied.
enum class NormalizationScope : std::uint8_t { causal, all };

struct CumulativeValues {
    double freshness = 0.0;
    double activity = 0.0;
    double cf = 0.0;
    double ca = 0.0;
    double cf_norm = 0.0;
    double ca_norm = 0.0;
};

/// cf_i = f_i + sum_{k<i} (1 - 2^(k-i)) f_k over sub-interval indices.
double cumulative_score(std::span<const double> transient, std::size_t index);

/// Cumulative and normalized values at every index of a history of
/// transient freshness / activity values.
std::vector<CumulativeValues> cumulative_scores(std::span<const double> freshness,
                                                std::span<const double> activity,
                                                NormalizationScope scope = NormalizationScope::causal);

/// Cumulative values for every node and edge of a cumulative snapshot.
class CumulativeScoreTable {
public:
    std::size_t index() const noexcept { return index_; }

    /// History for indices 0..index. Nodes / pairs absent from the table
    /// have all-zero histories.
    std::span<const CumulativeValues> node(NodeId node) const;
    std::span<const CumulativeValues> edge(NodeId producer, NodeId consumer) const;

    const CumulativeValues &node_at_index(NodeId node) const;
    const CumulativeValues &edge_at_index(NodeId producer, NodeId consumer) const;

    /// `node,interval_index,freshness,avg_activity,cf,ca,cf_norm,ca_norm`.
    void write_csv(std::ostream &out, const EventLog &log) const;

private:
    friend CumulativeScoreTable build_cumulative_table(const FeatureExtractor &, std::span<const TemporalInterval>,
                                                       std::size_t, const SnapshotGraph &, NormalizationScope);

    std::size_t index_ = 0;
    std::vector<CumulativeValues> zeros_;
    std::unordered_map<NodeId, std::vector<CumulativeValues>> nodes_;
    std::unordered_map<std::uint64_t, std::vector<CumulativeValues>> edges_;
};

/// Builds the table for index `index` of the partition `sub_intervals`,
/// covering every node and edge of `g`. With NormalizationScope::all the
/// normalization max also ranges over sub-intervals after `index`.
CumulativeScoreTable build_cumulative_table(const FeatureExtractor &features,
                                            std::span<const TemporalInterval> sub_intervals, std::size_t index,
                                            const SnapshotGraph &g,
                                            NormalizationScope scope = NormalizationScope::causal);

} // namespace lurk
