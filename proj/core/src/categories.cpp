#include "lurkrank/categories.hpp"

#include <algorithm>
#include <unordered_set>

#include "lurkrank/error.hpp"
#include "lurkrank/evaluation.hpp"

namespace lurk {

namespace {

bool contributes(ActionKind kind) {
    return kind == ActionKind::post || is_consumption(kind);
}

} // namespace

UserCategorySnapshot classify_users(const SnapshotGraph &g, const RankVector &rank, double p,
                                    ZeroContributorScope scope) {
    if (!(p > 0.0 && p <= 1.0)) {
        throw InvalidArgument("category fraction p must lie in (0,1]");
    }
    const auto &log = g.log();
    const auto window = g.window();

    UserCategorySnapshot out;
    out.interval_index = g.spec().index;
    out.window = window;

    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) {
        const auto node = g.node(v);
        const auto in = g.in_degree(v);
        const auto out_deg = g.out_degree(v);
        if ((out_deg == 0 && in > 0) || (out_deg > 0 && in > out_deg)) {
            out.potential_lurkers.push_back(node);
        }

        const Day lo = scope == ZeroContributorScope::history ? log.t_min() : window.start;
        bool contributed = false;
        for (const auto i : log.actions_of(node)) {
            const auto &ev = log.event(i);
            if (ev.timestamp > window.end) {
                break;
            }
            if (ev.timestamp >= lo && contributes(ev.kind)) {
                contributed = true;
                break;
            }
        }
        if (!contributed) {
            out.zero_contributors.push_back(node);
        }

        const auto first = log.first_interaction(node);
        if (!first || *first >= window.start) {
            out.newcomers.push_back(node);
        }
    }

    const auto order = rank.ranking();
    const auto k = std::min(top_k(order.size(), p), order.size());
    out.top_lurkers.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    out.bottom_active.assign(order.end() - static_cast<std::ptrdiff_t>(k), order.end());
    std::sort(out.top_lurkers.begin(), out.top_lurkers.end());
    std::sort(out.bottom_active.begin(), out.bottom_active.end());
    return out;
}

double overlap_ratio(std::span<const NodeId> a, std::span<const NodeId> b, OverlapDenominator denom) {
    const std::unordered_set<NodeId> set_a(a.begin(), a.end());
    const std::unordered_set<NodeId> set_b(b.begin(), b.end());
    const auto &base = denom == OverlapDenominator::first ? set_a : set_b;
    if (base.empty()) {
        throw InvalidArgument("overlap ratio with an empty denominator set");
    }
    std::size_t shared = 0;
    for (const auto v : set_a) {
        shared += set_b.contains(v) ? 1 : 0;
    }
    return static_cast<double>(shared) / static_cast<double>(base.size());
}

} // namespace lurk
