#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lurkrank/snapshot.hpp"
#include "lurkrank/temporal_features.hpp"

namespace lurk {

enum class Algorithm : std::uint8_t { lr, ts_lr, te_lr, dd };

/// Display name: "LR", "Ts-LR", "Te-LR", "DD".
std::string_view to_string(Algorithm algorithm);
/// Command-line name: "lr", "ts-lr", "te-lr", "dd".
std::string_view cli_name(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view text);

struct RankerConfig {
    double damping = 0.85;
    double omega_f = 0.5;
    double omega_a = 0.5;
    /// Stop when the L1 norm of the score change drops to this value.
    double tolerance = 1e-9;
    std::uint32_t max_iterations = 200;
    /// An iteration is abandoned once the score vector's L1 norm exceeds this.
    double divergence_limit = 1e12;

    /// Throws InvalidArgument naming the offending field.
    void validate() const;
};

/// Score per snapshot node, aligned with `nodes` (sorted global ids).
struct RankVector {
    SnapshotSpec spec;
    Algorithm algorithm = Algorithm::lr;
    std::vector<NodeId> nodes;
    std::vector<double> scores;
    std::uint32_t iterations = 0;
    double residual = 0.0;
    bool converged = true;
    /// The uniform start diverged and the iteration was rerun from the
    /// teleport vector.
    bool restarted = false;

    std::size_t size() const noexcept { return nodes.size(); }
    /// Throws UnknownNodeError.
    double score_of(NodeId node) const;
    /// Node ids by descending score, ties broken by ascending node id.
    std::vector<NodeId> ranking() const;
};

/// Node weight: blend of freshness and average activity, f alone when the
/// activity is zero, and 1 when the freshness is zero.
double node_weight(double freshness, double avg_activity, const RankerConfig &cfg);

/// Edge weight: same blend as node_weight, but 0 when the freshness is zero.
double edge_weight(double freshness, double avg_activity, const RankerConfig &cfg);

/// Node weights (by local index) and edge weights (by edge id) of a snapshot.
struct WeightSet {
    std::vector<double> node;
    std::vector<double> edge;

    /// Node weights 1 and edge weights 0, which reduce Ts-LR to LR.
    static WeightSet neutral(const SnapshotGraph &g);
};

WeightSet transient_weights(const TransientFeatures &features, const RankerConfig &cfg);

/// Node and edge weights from the normalized cumulative values of `table`.
WeightSet cumulative_weights(const SnapshotGraph &g, const CumulativeScoreTable &table, const RankerConfig &cfg);

/// Time-unaware LurkerRank. Throws InvalidArgument on an empty graph.
RankVector lurker_rank(const SnapshotGraph &g, const RankerConfig &cfg = {});

/// Time-static LurkerRank with precomputed weights.
RankVector ts_lurker_rank(const SnapshotGraph &g, const WeightSet &weights, const RankerConfig &cfg = {});

/// Time-static LurkerRank over the snapshot window.
RankVector ts_lurker_rank(const SnapshotGraph &g, const FeatureExtractor &features, const RankerConfig &cfg = {});

/// Time-evolving LurkerRank on a cumulative snapshot.
RankVector te_lurker_rank(const SnapshotGraph &g, const CumulativeScoreTable &table, const RankerConfig &cfg = {});

/// `node,score,rank` sorted by rank (1-based).
void write_rank_csv(std::ostream &out, const RankVector &rank, const EventLog &log);

/// Scores plus convergence metadata.
void write_rank_json(std::ostream &out, const RankVector &rank, const EventLog &log);

} // namespace lurk
