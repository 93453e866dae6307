#include "lurkrank/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "lurkrank/csv.hpp"
#include "lurkrank/error.hpp"

namespace lurk {

namespace {

// Merge sort counting inversions of `seq`.
std::uint64_t count_inversions(std::vector<std::uint32_t> &seq, std::vector<std::uint32_t> &buf, std::size_t lo,
                               std::size_t hi) {
    if (hi - lo < 2) {
        return 0;
    }
    const auto mid = lo + (hi - lo) / 2;
    auto inversions = count_inversions(seq, buf, lo, mid) + count_inversions(seq, buf, mid, hi);
    std::size_t i = lo;
    std::size_t j = mid;
    std::size_t k = lo;
    while (i < mid && j < hi) {
        if (seq[i] <= seq[j]) {
            buf[k++] = seq[i++];
        } else {
            inversions += mid - i;
            buf[k++] = seq[j++];
        }
    }
    while (i < mid) {
        buf[k++] = seq[i++];
    }
    while (j < hi) {
        buf[k++] = seq[j++];
    }
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              seq.begin() + static_cast<std::ptrdiff_t>(lo));
    return inversions;
}

std::vector<NodeId> restrict_to(std::span<const NodeId> order, const std::unordered_set<NodeId> &keep) {
    std::vector<NodeId> out;
    for (const auto v : order) {
        if (keep.contains(v)) {
            out.push_back(v);
        }
    }
    return out;
}

} // namespace

RankingList::RankingList(std::vector<NodeId> order) : order_(std::move(order)) {
    std::unordered_set<NodeId> seen;
    for (const auto v : order_) {
        if (!seen.insert(v).second) {
            throw InvalidArgument("ranking list contains node " + std::to_string(v) + " twice");
        }
    }
}

RankVector data_driven_rank(const SnapshotGraph &g, const DataDrivenOptions &options) {
    const auto &log = g.log();
    const auto window = g.window();
    RankVector out;
    out.spec = g.spec();
    out.algorithm = Algorithm::dd;
    out.nodes.assign(g.nodes().begin(), g.nodes().end());
    out.scores.assign(g.num_nodes(), 0.0);

    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) {
        std::uint64_t consumed = 0;
        std::uint64_t posts = 0;
        for (const auto i : log.actions_of(g.node(v))) {
            const auto &ev = log.event(i);
            if (!window.contains(ev.timestamp)) {
                continue;
            }
            if (ev.kind == ActionKind::post) {
                ++posts;
            } else if (options.counted_kinds.contains(ev.kind) && ev.target_node) {
                const auto u = g.local_index(*ev.target_node);
                if (u && g.find_edge(*u, v)) {
                    ++consumed;
                }
            }
        }
        out.scores[v] = static_cast<double>(consumed) / (1.0 + static_cast<double>(posts));
    }
    return out;
}

double kendall_tau(const RankingList &a, const RankingList &b) {
    const auto m = a.size();
    if (m != b.size()) {
        throw InvalidArgument("kendall_tau requires rankings over the same node set");
    }
    if (m < 2) {
        throw InvalidArgument("kendall_tau requires at least two nodes");
    }
    std::unordered_map<NodeId, std::uint32_t> position;
    position.reserve(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        position.emplace(b[i], i);
    }
    std::vector<std::uint32_t> seq(m);
    for (std::size_t i = 0; i < m; ++i) {
        auto it = position.find(a[i]);
        if (it == position.end()) {
            throw InvalidArgument("kendall_tau requires rankings over the same node set");
        }
        seq[i] = it->second;
    }
    std::vector<std::uint32_t> buf(m);
    const auto discordant = count_inversions(seq, buf, 0, m);
    // Each discordant pair appears once in each ordered-pair set.
    const auto delta = 2 * discordant;
    return 1.0 - 2.0 * static_cast<double>(delta) / (static_cast<double>(m) * static_cast<double>(m - 1));
}

double fagin_intersection(const RankingList &a, const RankingList &b, std::size_t k) {
    if (k < 1 || k > std::min(a.size(), b.size())) {
        throw InvalidArgument("fagin_intersection: k out of range");
    }
    std::unordered_set<NodeId> seen_a;
    std::unordered_set<NodeId> seen_b;
    std::size_t overlap = 0;
    double total = 0.0;
    for (std::size_t q = 1; q <= k; ++q) {
        const auto x = a[q - 1];
        const auto y = b[q - 1];
        seen_a.insert(x);
        seen_b.insert(y);
        if (x == y) {
            ++overlap;
        } else {
            overlap += seen_b.contains(x) ? 1 : 0;
            overlap += seen_a.contains(y) ? 1 : 0;
        }
        total += static_cast<double>(overlap) / static_cast<double>(q);
    }
    return total / static_cast<double>(k);
}

std::size_t top_k(std::size_t size, double fraction) {
    const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(size)));
    return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(size, 1));
}

RankVector normalize_scores(RankVector rank, ScoreNormalization method) {
    if (rank.scores.empty()) {
        throw InvalidArgument("cannot normalize an empty score vector");
    }
    auto &s = rank.scores;
    if (method == ScoreNormalization::minmax) {
        const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        const double min = *lo;
        const double range = *hi - *lo;
        for (auto &x : s) {
            x = range > 0.0 ? (x - min) / range : 0.5;
        }
    } else {
        double total = 0.0;
        for (const auto x : s) {
            total += x;
        }
        if (total != 0.0) {
            for (auto &x : s) {
                x /= total;
            }
        }
    }
    return rank;
}

EvaluationRow evaluate_against(const RankVector &rank, const RankVector &reference, double top_fraction) {
    std::unordered_set<NodeId> shared(rank.nodes.begin(), rank.nodes.end());
    std::unordered_set<NodeId> common;
    for (const auto v : reference.nodes) {
        if (shared.contains(v)) {
            common.insert(v);
        }
    }
    RankingList a(restrict_to(rank.ranking(), common));
    RankingList b(restrict_to(reference.ranking(), common));

    EvaluationRow row;
    row.snapshot_end = rank.spec.window().end;
    row.algorithm = std::string(to_string(rank.algorithm));
    row.kendall_tau = a.size() >= 2 ? kendall_tau(a, b) : std::nan("");
    row.fagin_at_25 = a.size() >= 1 ? fagin_intersection(a, b, top_k(a.size(), top_fraction)) : std::nan("");
    return row;
}

void write_evaluation_csv(std::ostream &out, std::span<const EvaluationRow> rows) {
    out << "snapshot_end,algorithm,kendall_tau,fagin_at_25\n";
    for (const auto &r : rows) {
        out << r.snapshot_end << ',' << r.algorithm << ',' << csv::format_double(r.kendall_tau) << ','
            << csv::format_double(r.fagin_at_25) << '\n';
    }
}

} // namespace lurk
