#include "lurkrank/rankers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "lurkrank/csv.hpp"
#include "lurkrank/error.hpp"

namespace lurk {

namespace {

struct Degrees {
    std::vector<double> in;
    std::vector<double> out;
};

Degrees smoothed(const SnapshotGraph &g) {
    Degrees d;
    d.in.resize(g.num_nodes());
    d.out.resize(g.num_nodes());
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) {
        d.in[v] = static_cast<double>(g.in_degree(v) + 1);
        d.out[v] = static_cast<double>(g.out_degree(v) + 1);
    }
    return d;
}

/// Per-node multipliers of the in- and out-neighbor sums:
///   L_in(v)  = in_scale[v]  * sum_{u in B_v} out(u)/in(u) * x(u)
///   L_out(v) = out_scale[v] * sum_{u in R_v} in(u)/out(u) * x(u)
struct Operator {
    std::vector<double> in_scale;
    std::vector<double> out_scale;
};

RankVector solve(const SnapshotGraph &g, const Degrees &deg, const Operator &op, const RankerConfig &cfg,
                 Algorithm algorithm) {
    const auto n = g.num_nodes();
    const double d = cfg.damping;
    const double teleport = (1.0 - d) / static_cast<double>(n);

    std::vector<double> in_coeff(n);
    std::vector<double> out_coeff(n);
    for (std::size_t u = 0; u < n; ++u) {
        in_coeff[u] = deg.out[u] / deg.in[u];
        out_coeff[u] = deg.in[u] / deg.out[u];
    }

    RankVector result;
    result.spec = g.spec();
    result.algorithm = algorithm;
    result.nodes.assign(g.nodes().begin(), g.nodes().end());
    std::vector<double> next(n);

    // Returns false when the score vector blows past the divergence limit.
    auto iterate = [&](std::vector<double> &x) {
        result.converged = false;
        for (std::uint32_t it = 0; it < cfg.max_iterations; ++it) {
            double residual = 0.0;
            double norm = 0.0;
            for (std::uint32_t v = 0; v < n; ++v) {
                double in_sum = 0.0;
                for (const auto e : g.in_edges(v)) {
                    const auto u = g.edge(e).src;
                    in_sum += in_coeff[u] * x[u];
                }
                double out_sum = 0.0;
                for (const auto e : g.out_edges(v)) {
                    const auto u = g.edge(e).dst;
                    out_sum += out_coeff[u] * x[u];
                }
                const double l_in = op.in_scale[v] * in_sum;
                const double l_out = op.out_scale[v] * out_sum;
                next[v] = d * (l_in * (1.0 + l_out)) + teleport;
                residual += std::abs(next[v] - x[v]);
                norm += std::abs(next[v]);
            }
            x.swap(next);
            result.iterations = it + 1;
            result.residual = residual;
            if (!std::isfinite(norm) || norm > cfg.divergence_limit) {
                return false;
            }
            if (residual <= cfg.tolerance) {
                result.converged = true;
                break;
            }
        }
        return true;
    };

    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    if (!iterate(x)) {
        // The map is monotone with non-negative coefficients, so iterating
        // from the teleport vector climbs to the least non-negative fixed
        // point whenever one exists. The uniform start can overshoot it.
        x.assign(n, teleport);
        result.restarted = true;
        iterate(x);
    }
    result.scores = std::move(x);
    return result;
}

void require_nonempty(const SnapshotGraph &g) {
    if (g.empty()) {
        throw InvalidArgument("cannot rank an empty snapshot");
    }
}

Operator weighted_operator(const SnapshotGraph &g, const Degrees &deg, const WeightSet &w) {
    const auto n = g.num_nodes();
    if (w.node.size() != n || w.edge.size() != g.num_edges()) {
        throw InvalidArgument("weight set does not match the snapshot");
    }
    Operator op;
    op.in_scale.resize(n);
    op.out_scale.resize(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        double in_weight = 0.0;
        for (const auto e : g.in_edges(v)) {
            in_weight += w.edge[e];
        }
        double out_weight = 0.0;
        double out_in_degrees = 0.0;
        for (const auto e : g.out_edges(v)) {
            out_weight += w.edge[e];
            out_in_degrees += deg.in[g.edge(e).dst];
        }
        op.in_scale[v] = std::exp(-in_weight) / (w.node[v] * deg.out[v]);
        op.out_scale[v] =
            out_in_degrees > 0.0 ? deg.in[v] * std::exp(-out_weight) / (w.node[v] * out_in_degrees) : 0.0;
    }
    return op;
}

double blend(double f, double a, const RankerConfig &cfg) {
    return (cfg.omega_f * f + cfg.omega_a * a) / (cfg.omega_f + cfg.omega_a);
}

} // namespace

std::string_view to_string(Algorithm algorithm) {
    switch (algorithm) {
    case Algorithm::lr:
        return "LR";
    case Algorithm::ts_lr:
        return "Ts-LR";
    case Algorithm::te_lr:
        return "Te-LR";
    case Algorithm::dd:
        return "DD";
    }
    return "LR";
}

std::string_view cli_name(Algorithm algorithm) {
    switch (algorithm) {
    case Algorithm::lr:
        return "lr";
    case Algorithm::ts_lr:
        return "ts-lr";
    case Algorithm::te_lr:
        return "te-lr";
    case Algorithm::dd:
        return "dd";
    }
    return "lr";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
    for (auto a : {Algorithm::lr, Algorithm::ts_lr, Algorithm::te_lr, Algorithm::dd}) {
        if (cli_name(a) == text || to_string(a) == text) {
            return a;
        }
    }
    return std::nullopt;
}

void RankerConfig::validate() const {
    if (!(damping >= 0.0 && damping <= 1.0)) {
        throw InvalidArgument("damping must lie in [0,1]");
    }
    if (!(omega_f >= 0.0) || !(omega_a >= 0.0)) {
        throw InvalidArgument("omega-f and omega-a must be non-negative");
    }
    if (!(omega_f + omega_a > 0.0)) {
        throw InvalidArgument("omega-f + omega-a must be positive");
    }
    if (!(tolerance > 0.0)) {
        throw InvalidArgument("tolerance must be positive");
    }
    if (max_iterations == 0) {
        throw InvalidArgument("max-iterations must be positive");
    }
}

double RankVector::score_of(NodeId node) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
    if (it == nodes.end() || *it != node) {
        throw UnknownNodeError("node " + std::to_string(node) + " has no score");
    }
    return scores[static_cast<std::size_t>(it - nodes.begin())];
}

std::vector<NodeId> RankVector::ranking() const {
    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) {
            return scores[a] > scores[b];
        }
        return nodes[a] < nodes[b];
    });
    std::vector<NodeId> out(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        out[i] = nodes[order[i]];
    }
    return out;
}

double node_weight(double freshness, double avg_activity, const RankerConfig &cfg) {
    if (freshness != 0.0 && avg_activity != 0.0) {
        return blend(freshness, avg_activity, cfg);
    }
    if (freshness != 0.0) {
        return freshness;
    }
    return 1.0;
}

double edge_weight(double freshness, double avg_activity, const RankerConfig &cfg) {
    if (freshness != 0.0 && avg_activity != 0.0) {
        return blend(freshness, avg_activity, cfg);
    }
    if (freshness != 0.0) {
        return freshness;
    }
    return 0.0;
}

WeightSet WeightSet::neutral(const SnapshotGraph &g) {
    return {std::vector<double>(g.num_nodes(), 1.0), std::vector<double>(g.num_edges(), 0.0)};
}

WeightSet transient_weights(const TransientFeatures &features, const RankerConfig &cfg) {
    WeightSet w;
    w.node.resize(features.node_freshness.size());
    for (std::size_t v = 0; v < w.node.size(); ++v) {
        w.node[v] = node_weight(features.node_freshness[v], features.node_activity[v], cfg);
    }
    w.edge.resize(features.edge_freshness.size());
    for (std::size_t e = 0; e < w.edge.size(); ++e) {
        w.edge[e] = edge_weight(features.edge_freshness[e], features.edge_activity[e], cfg);
    }
    return w;
}

WeightSet cumulative_weights(const SnapshotGraph &g, const CumulativeScoreTable &table, const RankerConfig &cfg) {
    WeightSet w;
    w.node.resize(g.num_nodes());
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) {
        const auto &c = table.node_at_index(g.node(v));
        w.node[v] = node_weight(c.cf_norm, c.ca_norm, cfg);
    }
    w.edge.resize(g.num_edges());
    for (std::uint32_t e = 0; e < g.num_edges(); ++e) {
        const auto &c = table.edge_at_index(g.node(g.edge(e).src), g.node(g.edge(e).dst));
        w.edge[e] = edge_weight(c.cf_norm, c.ca_norm, cfg);
    }
    return w;
}

RankVector lurker_rank(const SnapshotGraph &g, const RankerConfig &cfg) {
    cfg.validate();
    require_nonempty(g);
    const auto deg = smoothed(g);
    const auto n = g.num_nodes();
    Operator op;
    op.in_scale.resize(n);
    op.out_scale.resize(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        op.in_scale[v] = 1.0 / deg.out[v];
        double out_in_degrees = 0.0;
        for (const auto e : g.out_edges(v)) {
            out_in_degrees += deg.in[g.edge(e).dst];
        }
        op.out_scale[v] = out_in_degrees > 0.0 ? deg.in[v] / out_in_degrees : 0.0;
    }
    return solve(g, deg, op, cfg, Algorithm::lr);
}

RankVector ts_lurker_rank(const SnapshotGraph &g, const WeightSet &weights, const RankerConfig &cfg) {
    cfg.validate();
    require_nonempty(g);
    const auto deg = smoothed(g);
    return solve(g, deg, weighted_operator(g, deg, weights), cfg, Algorithm::ts_lr);
}

RankVector ts_lurker_rank(const SnapshotGraph &g, const FeatureExtractor &features, const RankerConfig &cfg) {
    return ts_lurker_rank(g, transient_weights(features.transient(g), cfg), cfg);
}

RankVector te_lurker_rank(const SnapshotGraph &g, const CumulativeScoreTable &table, const RankerConfig &cfg) {
    cfg.validate();
    require_nonempty(g);
    const auto deg = smoothed(g);
    auto result = solve(g, deg, weighted_operator(g, deg, cumulative_weights(g, table, cfg)), cfg, Algorithm::te_lr);
    return result;
}

void write_rank_csv(std::ostream &out, const RankVector &rank, const EventLog &log) {
    out << "node,score,rank\n";
    std::size_t position = 0;
    for (const auto node : rank.ranking()) {
        out << csv::escape(log.nodes().name(node)) << ',' << csv::format_double(rank.score_of(node)) << ','
            << ++position << '\n';
    }
}

void write_rank_json(std::ostream &out, const RankVector &rank, const EventLog &log) {
    const auto window = rank.spec.window();
    nlohmann::ordered_json j;
    j["algorithm"] = to_string(rank.algorithm);
    j["snapshot"] = {{"mode", to_string(rank.spec.mode)},
                     {"interval_length", rank.spec.interval_length},
                     {"start", rank.spec.start},
                     {"index", rank.spec.index},
                     {"window", {window.start, window.end}}};
    j["iterations"] = rank.iterations;
    j["residual"] = rank.residual;
    j["converged"] = rank.converged;
    j["restarted"] = rank.restarted;
    auto scores = nlohmann::ordered_json::array();
    std::size_t position = 0;
    for (const auto node : rank.ranking()) {
        scores.push_back({{"node", log.nodes().name(node)}, {"score", rank.score_of(node)}, {"rank", ++position}});
    }
    j["scores"] = std::move(scores);
    out << j.dump(2) << '\n';
}

} // namespace lurk
