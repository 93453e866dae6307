#include "lurkrank/snapshot.hpp"

#include <algorithm>
#include <array>
#include <ostream>
#include <tuple>

#include "lurkrank/csv.hpp"
#include "lurkrank/error.hpp"

namespace lurk {

namespace {

void build_csr(std::size_t n, std::span<const std::uint32_t> keys,
               std::vector<std::uint32_t> &offsets, std::vector<std::uint32_t> &ids) {
    offsets.assign(n + 1, 0);
    for (const auto k : keys) {
        ++offsets[k + 1];
    }
    for (std::size_t i = 1; i <= n; ++i) {
        offsets[i] += offsets[i - 1];
    }
    ids.resize(keys.size());
    auto cursor = offsets;
    for (std::uint32_t i = 0; i < keys.size(); ++i) {
        ids[cursor[keys[i]]++] = i;
    }
}

bool retained(const ActionEvent &ev, const SnapshotOptions &opt) {
    switch (ev.kind) {
    case ActionKind::post:
        return true;
    case ActionKind::follow:
        return opt.edge_policy != EdgePolicy::interaction_only;
    default:
        return opt.edge_policy != EdgePolicy::followship_only && opt.consumption_kinds.contains(ev.kind);
    }
}

} // namespace

std::string_view to_string(SnapshotMode mode) {
    return mode == SnapshotMode::transient ? "transient" : "cumulative";
}

std::optional<SnapshotMode> parse_snapshot_mode(std::string_view text) {
    if (text == "transient") {
        return SnapshotMode::transient;
    }
    if (text == "cumulative") {
        return SnapshotMode::cumulative;
    }
    return std::nullopt;
}

std::string_view to_string(EdgePolicy policy) {
    switch (policy) {
    case EdgePolicy::all:
        return "all";
    case EdgePolicy::interaction_only:
        return "interaction";
    case EdgePolicy::followship_only:
        return "followship";
    }
    return "all";
}

std::optional<EdgePolicy> parse_edge_policy(std::string_view text) {
    for (auto p : {EdgePolicy::all, EdgePolicy::interaction_only, EdgePolicy::followship_only}) {
        if (to_string(p) == text) {
            return p;
        }
    }
    return std::nullopt;
}

void SnapshotSpec::validate() const {
    if (interval_length <= 0) {
        throw InvalidArgument("interval-length must be positive");
    }
}

TemporalInterval sub_interval(Day start, Day interval_length, std::uint32_t index) {
    const Day hi = start + (static_cast<Day>(index) + 1) * interval_length;
    if (index == 0) {
        return {start, hi};
    }
    return {start + static_cast<Day>(index) * interval_length + 1, hi};
}

std::uint32_t interval_count(Day start, Day interval_length, Day t_max) {
    if (interval_length <= 0) {
        throw InvalidArgument("interval-length must be positive");
    }
    if (t_max <= start) {
        return 1;
    }
    return static_cast<std::uint32_t>((t_max - start + interval_length - 1) / interval_length);
}

TemporalInterval SnapshotSpec::window() const {
    validate();
    if (mode == SnapshotMode::transient) {
        return sub_interval(start, interval_length, index);
    }
    return {start, start + (static_cast<Day>(index) + 1) * interval_length};
}

std::optional<std::uint32_t> SnapshotGraph::local_index(NodeId node) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
    if (it == nodes_.end() || *it != node) {
        return std::nullopt;
    }
    return static_cast<std::uint32_t>(it - nodes_.begin());
}

std::optional<std::uint32_t> SnapshotGraph::find_edge(std::uint32_t src, std::uint32_t dst) const {
    for (const auto id : out_edges(src)) {
        if (edges_[id].dst == dst) {
            return id;
        }
    }
    return std::nullopt;
}

std::span<const std::uint32_t> SnapshotGraph::in_edges(std::uint32_t local) const {
    return std::span<const std::uint32_t>(in_ids_).subspan(in_offsets_.at(local),
                                                            in_offsets_.at(local + 1) - in_offsets_[local]);
}

std::span<const std::uint32_t> SnapshotGraph::out_edges(std::uint32_t local) const {
    return std::span<const std::uint32_t>(out_ids_).subspan(out_offsets_.at(local),
                                                             out_offsets_.at(local + 1) - out_offsets_[local]);
}

std::span<const std::uint32_t> SnapshotGraph::node_actions(std::uint32_t local) const {
    return std::span<const std::uint32_t>(action_ids_)
        .subspan(action_offsets_.at(local), action_offsets_.at(local + 1) - action_offsets_[local]);
}

SnapshotGraph build_snapshot(std::shared_ptr<const EventLog> log, const SnapshotSpec &spec,
                             const SnapshotOptions &options) {
    if (!log) {
        throw InvalidArgument("null event log");
    }
    SnapshotGraph g;
    g.spec_ = spec;
    g.window_ = spec.window();
    g.options_ = options;
    g.log_ = std::move(log);
    const EventLog &events = *g.log_;

    const auto [first, last] = events.range(g.window_.start, g.window_.end);
    for (auto i = first; i < last; ++i) {
        if (retained(events.event(i), options)) {
            g.events_.push_back(i);
        }
    }

    std::vector<std::uint32_t> carried;
    if (options.carry_prior_follows && spec.mode == SnapshotMode::transient &&
        options.edge_policy != EdgePolicy::interaction_only) {
        for (std::uint32_t i = 0; i < first; ++i) {
            if (events.event(i).kind == ActionKind::follow) {
                carried.push_back(i);
            }
        }
    }

    for (const auto ids : {std::span<const std::uint32_t>(carried), std::span<const std::uint32_t>(g.events_)}) {
        for (const auto i : ids) {
            const auto &ev = events.event(i);
            g.nodes_.push_back(ev.actor);
            if (ev.target_node) {
                g.nodes_.push_back(*ev.target_node);
            }
        }
    }
    std::sort(g.nodes_.begin(), g.nodes_.end());
    g.nodes_.erase(std::unique(g.nodes_.begin(), g.nodes_.end()), g.nodes_.end());
    const auto n = g.nodes_.size();

    // (src, dst, event) triples; carried events precede window events in time.
    std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> links;
    for (const auto ids : {std::span<const std::uint32_t>(carried), std::span<const std::uint32_t>(g.events_)}) {
        for (const auto i : ids) {
            const auto &ev = events.event(i);
            if (ev.kind == ActionKind::post || *ev.target_node == ev.actor) {
                continue;
            }
            links.emplace_back(*g.local_index(*ev.target_node), *g.local_index(ev.actor), i);
        }
    }
    std::sort(links.begin(), links.end());
    for (const auto &[src, dst, ev] : links) {
        const Day t = events.event(ev).timestamp;
        if (g.edges_.empty() || g.edges_.back().src != src || g.edges_.back().dst != dst) {
            g.edges_.push_back({src, dst, {ev}, t, t});
        } else {
            auto &e = g.edges_.back();
            e.events.push_back(ev);
            e.first_ts = std::min(e.first_ts, t);
            e.last_ts = std::max(e.last_ts, t);
        }
    }

    std::vector<std::uint32_t> keys(g.edges_.size());
    for (std::size_t e = 0; e < g.edges_.size(); ++e) {
        keys[e] = g.edges_[e].dst;
    }
    build_csr(n, keys, g.in_offsets_, g.in_ids_);
    for (std::size_t e = 0; e < g.edges_.size(); ++e) {
        keys[e] = g.edges_[e].src;
    }
    build_csr(n, keys, g.out_offsets_, g.out_ids_);

    keys.resize(g.events_.size());
    for (std::size_t k = 0; k < g.events_.size(); ++k) {
        keys[k] = *g.local_index(events.event(g.events_[k]).actor);
    }
    std::vector<std::uint32_t> positions;
    build_csr(n, keys, g.action_offsets_, positions);
    g.action_ids_.resize(positions.size());
    for (std::size_t k = 0; k < positions.size(); ++k) {
        g.action_ids_[k] = g.events_[positions[k]];
    }
    return g;
}

std::pair<std::uint32_t, std::uint32_t> smoothed_degrees(const SnapshotGraph &g, NodeId node) {
    const auto local = g.local_index(node);
    if (!local) {
        throw UnknownNodeError("node " + std::to_string(node) + " is not in the snapshot");
    }
    return {static_cast<std::uint32_t>(g.in_degree(*local) + 1),
            static_cast<std::uint32_t>(g.out_degree(*local) + 1)};
}

void write_edge_list(std::ostream &out, const SnapshotGraph &g) {
    const auto &names = g.log().nodes();
    out << "src,dst,event_count,first_ts,last_ts\n";
    for (const auto &e : g.edges()) {
        out << csv::escape(names.name(g.node(e.src))) << ',' << csv::escape(names.name(g.node(e.dst)))
            << ',' << e.events.size() << ',' << e.first_ts << ',' << e.last_ts << '\n';
    }
}

} // namespace lurk
