#include "lurkrank/temporal_features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "lurkrank/csv.hpp"
#include "lurkrank/error.hpp"

namespace lurk {

namespace {

ActivitySeries bucket_by_day(const EventLog &log, std::span<const std::uint32_t> events, KindSet kinds,
                             bool filter) {
    ActivitySeries series;
    for (const auto i : events) {
        const auto &ev = log.event(i);
        if (filter && !kinds.contains(ev.kind)) {
            continue;
        }
        if (!series.empty() && series.back().time == ev.timestamp) {
            ++series.back().count;
        } else {
            series.push_back({1, ev.timestamp});
        }
    }
    return series;
}

double kernel_at_distance(Day distance) {
    return 1.0 / std::log2(2.0 + static_cast<double>(distance));
}

} // namespace

double freshness_kernel(Day t, TemporalInterval T) {
    if (!T.contains(t)) {
        return 0.0;
    }
    return kernel_at_distance(T.end - t);
}

std::vector<double> derivative_estimate(const ActivitySeries &series) {
    const auto n = series.size();
    if (n < 2) {
        return std::vector<double>(n, 0.0);
    }
    std::vector<double> d(n);
    for (std::size_t k = 1; k < n; ++k) {
        const double dx = static_cast<double>(series[k].count) - static_cast<double>(series[k - 1].count);
        d[k] = dx / static_cast<double>(series[k].time - series[k - 1].time);
    }
    d[0] = d[1];
    return d;
}

double default_dsa_epsilon(std::span<const double> derivatives) {
    if (derivatives.empty()) {
        return 0.0;
    }
    const double n = static_cast<double>(derivatives.size());
    double mean = 0.0;
    for (const double v : derivatives) {
        mean += v;
    }
    mean /= n;
    double ss = 0.0;
    for (const double v : derivatives) {
        ss += (v - mean) * (v - mean);
    }
    return 0.5 * std::sqrt(ss / n);
}

DsaSeries dsa_transform(const ActivitySeries &series, std::optional<double> epsilon) {
    if (series.empty()) {
        throw InvalidArgument("DSA requires a non-empty series");
    }
    DsaSeries out;
    out.source_length = series.size();
    out.start_time = series.front().time;
    if (series.size() == 1) {
        out.segments.push_back({0.5, series.front().time, 1});
        return out;
    }

    const auto d = derivative_estimate(series);
    const double eps = epsilon.value_or(default_dsa_epsilon(d));
    if (eps < 0.0) {
        throw InvalidArgument("DSA epsilon must be non-negative");
    }

    auto close_segment = [&](double sum, std::uint32_t len, std::size_t last) {
        const double alpha = std::atan(sum / len);
        out.segments.push_back({alpha / std::numbers::pi + 0.5, series[last].time, len});
    };

    double sum = d[0];
    std::uint32_t len = 1;
    for (std::size_t k = 1; k < d.size(); ++k) {
        const double mean = sum / len;
        // Slack absorbs rounding in the running mean of equal derivatives.
        const double slack = 1e-12 * std::max(1.0, std::abs(mean));
        if (std::abs(d[k] - mean) <= eps + slack) {
            sum += d[k];
            ++len;
        } else {
            close_segment(sum, len, k - 1);
            sum = d[k];
            len = 1;
        }
    }
    close_segment(sum, len, d.size() - 1);
    return out;
}

double average_activity(const DsaSeries &dsa, TemporalInterval T) {
    double total = 0.0;
    std::size_t hits = 0;
    Day lo = dsa.start_time;
    for (const auto &seg : dsa.segments) {
        if (T.intersects(lo, seg.end_time)) {
            total += seg.alpha_hat;
            ++hits;
        }
        lo = seg.end_time + 1;
    }
    return hits == 0 ? 0.0 : total / static_cast<double>(hits);
}

ActivitySeries node_activity_series(const EventLog &log, NodeId node) {
    return bucket_by_day(log, log.actions_of(node), {}, false);
}

ActivitySeries interaction_activity_series(const EventLog &log, NodeId producer, NodeId consumer,
                                           KindSet kinds) {
    return bucket_by_day(log, log.consumptions(producer, consumer), kinds, true);
}

double user_freshness(const EventLog &log, NodeId node, TemporalInterval T) {
    double best = 0.0;
    for (const auto i : log.actions_of(node)) {
        best = std::max(best, freshness_kernel(log.event(i).timestamp, T));
    }
    return best;
}

double interaction_freshness(const EventLog &log, NodeId producer, NodeId consumer, TemporalInterval T,
                             KindSet kinds) {
    double best = 0.0;
    for (const auto i : log.consumptions(producer, consumer)) {
        const auto &ev = log.event(i);
        if (!kinds.contains(ev.kind)) {
            continue;
        }
        const Day consumed = ev.timestamp;
        std::optional<Day> produced;
        if (ev.target_post) {
            if (auto info = log.post_info(*ev.target_post); info && info->author == producer) {
                produced = info->timestamp;
            }
        }
        if (!produced) {
            produced = log.latest_post_at_or_before(producer, consumed);
        }
        if (!produced || *produced > consumed || *produced < T.start || consumed > T.end) {
            continue;
        }
        best = std::max(best, kernel_at_distance(consumed - *produced));
    }
    return best;
}

FeatureExtractor::FeatureExtractor(std::shared_ptr<const EventLog> log, FeatureOptions options)
    : log_(std::move(log)), options_(options) {
    if (!log_) {
        throw InvalidArgument("null event log");
    }
    node_trends_.resize(log_->num_nodes());
    for (NodeId v = 0; v < log_->num_nodes(); ++v) {
        auto series = node_activity_series(*log_, v);
        if (!series.empty()) {
            node_trends_[v] = dsa_transform(series, options_.dsa_epsilon);
        }
    }
    for (const auto &[u, v] : log_->consumption_pairs()) {
        auto series = interaction_activity_series(*log_, u, v, options_.consumption_kinds);
        if (!series.empty()) {
            pair_trends_.emplace(pair_key(u, v), dsa_transform(series, options_.dsa_epsilon));
        }
    }
}

const DsaSeries &FeatureExtractor::node_trend(NodeId node) const {
    if (!log_->has_node(node)) {
        throw UnknownNodeError("unknown node id " + std::to_string(node));
    }
    return node_trends_[node];
}

const DsaSeries &FeatureExtractor::interaction_trend(NodeId producer, NodeId consumer) const {
    static const DsaSeries kEmpty;
    auto it = pair_trends_.find(pair_key(producer, consumer));
    return it == pair_trends_.end() ? kEmpty : it->second;
}

double FeatureExtractor::user_freshness(NodeId node, TemporalInterval T) const {
    return lurk::user_freshness(*log_, node, T);
}

double FeatureExtractor::average_activity(NodeId node, TemporalInterval T) const {
    return lurk::average_activity(node_trend(node), T);
}

double FeatureExtractor::interaction_freshness(NodeId producer, NodeId consumer, TemporalInterval T) const {
    return lurk::interaction_freshness(*log_, producer, consumer, T, options_.consumption_kinds);
}

double FeatureExtractor::interaction_activity(NodeId producer, NodeId consumer, TemporalInterval T) const {
    return lurk::average_activity(interaction_trend(producer, consumer), T);
}

TransientFeatures FeatureExtractor::transient(const SnapshotGraph &g, std::optional<TemporalInterval> T) const {
    const auto interval = T.value_or(g.window());
    TransientFeatures out;
    out.node_freshness.resize(g.num_nodes());
    out.node_activity.resize(g.num_nodes());
    for (std::uint32_t i = 0; i < g.num_nodes(); ++i) {
        out.node_freshness[i] = user_freshness(g.node(i), interval);
        out.node_activity[i] = average_activity(g.node(i), interval);
    }
    out.edge_freshness.resize(g.num_edges());
    out.edge_activity.resize(g.num_edges());
    for (std::uint32_t e = 0; e < g.num_edges(); ++e) {
        const auto u = g.node(g.edge(e).src);
        const auto v = g.node(g.edge(e).dst);
        out.edge_freshness[e] = interaction_freshness(u, v, interval);
        out.edge_activity[e] = interaction_activity(u, v, interval);
    }
    return out;
}

double cumulative_score(std::span<const double> transient, std::size_t index) {
    if (index >= transient.size()) {
        throw InvalidArgument("cumulative index out of range");
    }
    double total = transient[index];
    for (std::size_t k = 0; k < index; ++k) {
        const double weight = 1.0 - std::ldexp(1.0, static_cast<int>(k) - static_cast<int>(index));
        total += weight * transient[k];
    }
    return total;
}

std::vector<CumulativeValues> cumulative_scores(std::span<const double> freshness, std::span<const double> activity,
                                                NormalizationScope scope) {
    if (freshness.size() != activity.size()) {
        throw InvalidArgument("freshness and activity histories differ in length");
    }
    const auto n = freshness.size();
    std::vector<CumulativeValues> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].freshness = freshness[i];
        out[i].activity = activity[i];
        out[i].cf = cumulative_score(freshness, i);
        out[i].ca = cumulative_score(activity, i);
    }
    double max_cf = 0.0;
    double max_ca = 0.0;
    if (scope == NormalizationScope::all) {
        for (const auto &v : out) {
            max_cf = std::max(max_cf, v.cf);
            max_ca = std::max(max_ca, v.ca);
        }
    }
    for (auto &v : out) {
        if (scope == NormalizationScope::causal) {
            max_cf = std::max(max_cf, v.cf);
            max_ca = std::max(max_ca, v.ca);
        }
        v.cf_norm = max_cf > 0.0 ? v.cf / max_cf * v.freshness : 0.0;
        v.ca_norm = max_ca > 0.0 ? v.ca / max_ca * v.activity : 0.0;
    }
    return out;
}

std::span<const CumulativeValues> CumulativeScoreTable::node(NodeId node) const {
    auto it = nodes_.find(node);
    return it == nodes_.end() ? std::span<const CumulativeValues>(zeros_) : it->second;
}

std::span<const CumulativeValues> CumulativeScoreTable::edge(NodeId producer, NodeId consumer) const {
    auto it = edges_.find(pair_key(producer, consumer));
    return it == edges_.end() ? std::span<const CumulativeValues>(zeros_) : it->second;
}

const CumulativeValues &CumulativeScoreTable::node_at_index(NodeId node) const {
    return this->node(node)[index_];
}

const CumulativeValues &CumulativeScoreTable::edge_at_index(NodeId producer, NodeId consumer) const {
    return edge(producer, consumer)[index_];
}

void CumulativeScoreTable::write_csv(std::ostream &out, const EventLog &log) const {
    out << "node,interval_index,freshness,avg_activity,cf,ca,cf_norm,ca_norm\n";
    std::vector<NodeId> ids;
    ids.reserve(nodes_.size());
    for (const auto &[id, _] : nodes_) {
        ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    for (const auto id : ids) {
        const auto &history = nodes_.at(id);
        for (std::size_t i = 0; i < history.size(); ++i) {
            const auto &v = history[i];
            out << csv::escape(log.nodes().name(id)) << ',' << i << ',' << csv::format_double(v.freshness) << ','
                << csv::format_double(v.activity) << ',' << csv::format_double(v.cf) << ','
                << csv::format_double(v.ca) << ',' << csv::format_double(v.cf_norm) << ','
                << csv::format_double(v.ca_norm) << '\n';
        }
    }
}

CumulativeScoreTable build_cumulative_table(const FeatureExtractor &features,
                                            std::span<const TemporalInterval> sub_intervals, std::size_t index,
                                            const SnapshotGraph &g, NormalizationScope scope) {
    if (index >= sub_intervals.size()) {
        throw InvalidArgument("cumulative index beyond the supplied sub-intervals");
    }
    const std::size_t horizon = scope == NormalizationScope::causal ? index + 1 : sub_intervals.size();

    CumulativeScoreTable table;
    table.index_ = index;
    table.zeros_.assign(index + 1, CumulativeValues{});

    std::vector<double> f(horizon);
    std::vector<double> a(horizon);
    auto keep = [&](std::vector<CumulativeValues> values) {
        values.resize(index + 1);
        return values;
    };

    for (const auto node : g.nodes()) {
        for (std::size_t k = 0; k < horizon; ++k) {
            f[k] = features.user_freshness(node, sub_intervals[k]);
            a[k] = features.average_activity(node, sub_intervals[k]);
        }
        table.nodes_.emplace(node, keep(cumulative_scores(f, a, scope)));
    }
    for (const auto &e : g.edges()) {
        const auto u = g.node(e.src);
        const auto v = g.node(e.dst);
        for (std::size_t k = 0; k < horizon; ++k) {
            f[k] = features.interaction_freshness(u, v, sub_intervals[k]);
            a[k] = features.interaction_activity(u, v, sub_intervals[k]);
        }
        table.edges_.emplace(pair_key(u, v), keep(cumulative_scores(f, a, scope)));
    }
    return table;
}

} // namespace lurk
