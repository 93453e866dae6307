#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lurkrank/rankers.hpp"
#include "lurkrank/snapshot.hpp"

namespace lurk {

/// Ordered node ids (best first) without duplicates.
class RankingList {
public:
    /// Throws InvalidArgument on duplicate nodes.
    explicit RankingList(std::vector<NodeId> order);
    static RankingList from(const RankVector &rank) { return RankingList(rank.ranking()); }

    std::span<const NodeId> order() const noexcept { return order_; }
    std::size_t size() const noexcept { return order_.size(); }
    NodeId operator[](std::size_t i) const { return order_[i]; }

private:
    std::vector<NodeId> order_;
};

struct DataDrivenOptions {
    /// Consumption kinds counted in the numerator.
    KindSet counted_kinds{ActionKind::favorite, ActionKind::like};
};

/// Reference ranking over the snapshot window: consumption actions a node
/// performed on its in-neighbors' content, over 1 + its own post count.
RankVector data_driven_rank(const SnapshotGraph &g, const DataDrivenOptions &options = {});

/// 1 - 2 * |symmetric difference of ordered-pair sets| / (M (M - 1)).
/// Throws InvalidArgument unless both lists hold the same M >= 2 nodes.
double kendall_tau(const RankingList &a, const RankingList &b);

/// (1/k) * sum_{q=1..k} |a[:q] intersect b[:q]| / q. Lists may cover different
/// node universes. Throws InvalidArgument unless 1 <= k <= min(|a|, |b|).
double fagin_intersection(const RankingList &a, const RankingList &b, std::size_t k);

/// ceil(fraction * size), at least 1.
std::size_t top_k(std::size_t size, double fraction);

enum class ScoreNormalization { minmax, sum1 };

/// minmax maps to [0,1] (a constant vector maps to 0.5); sum1 divides by the
/// total (an all-zero vector stays zero). Throws InvalidArgument when empty.
RankVector normalize_scores(RankVector rank, ScoreNormalization method);

struct EvaluationRow {
    Day snapshot_end = 0;
    std::string algorithm;
    double kendall_tau = 0.0;
    double fagin_at_25 = 0.0;
};

/// Compares `rank` against `reference` over the nodes they share.
EvaluationRow evaluate_against(const RankVector &rank, const RankVector &reference, double top_fraction = 0.25);

/// `snapshot_end,algorithm,kendall_tau,fagin_at_25`.
void write_evaluation_csv(std::ostream &out, std::span<const EvaluationRow> rows);

} // namespace lurk
