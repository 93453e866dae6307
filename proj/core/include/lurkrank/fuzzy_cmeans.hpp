#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lurkrank/evaluation.hpp"
#include "lurkrank/rankers.hpp"

namespace lurk {

/// Normalized lurking scores of one node across consecutive snapshots.
struct ScoreTimeSeries {
    NodeId node = 0;
    std::vector<double> values;
    /// Zero mean, unit sample standard deviation.
    std::vector<double> standardized;
};

/// (x - mean) / sd with the sample standard deviation. Throws
/// InvalidArgument for fewer than two values or zero variance.
std::vector<double> standardize(std::span<const double> values);

struct LurkingSeriesOptions {
    /// Candidates are the top fraction of the first snapshot's ranking.
    double top_fraction = 0.25;
    /// Minimum share of later snapshots a candidate must appear in.
    double presence_fraction = 0.5;
    ScoreNormalization normalization = ScoreNormalization::minmax;
};

struct LurkingSeriesSet {
    std::vector<ScoreTimeSeries> series;
    /// Eligible nodes dropped because their series is constant.
    std::vector<NodeId> zero_variance;
};

/// Builds one series per eligible node from per-snapshot rankings. Missing
/// snapshots are filled by linear interpolation between the nearest present
/// values and by the nearest value at either end.
LurkingSeriesSet build_lurking_series(std::span<const RankVector> snapshots, const LurkingSeriesOptions &options = {});

struct FuzzyCMeansOptions {
    std::size_t clusters = 4;
    double fuzzifier = 1.25;
    /// Stop once the objective improves by less than this.
    double tolerance = 1e-9;
    std::uint32_t max_iterations = 500;
    std::uint64_t seed = 42;
};

struct FuzzyClustering {
    std::size_t clusters = 0;
    double fuzzifier = 0.0;
    std::vector<NodeId> nodes;
    /// membership[i][j]: degree of point i in cluster j; rows sum to 1.
    std::vector<std::vector<double>> membership;
    std::vector<std::vector<double>> centroids;
    double objective = 0.0;
    /// Objective after each iteration.
    std::vector<double> objective_history;
    std::uint32_t iterations = 0;
};

/// Fuzzy c-means in Euclidean space. Throws InvalidArgument unless points
/// share a dimension, 2 <= clusters < |points| and fuzzifier > 1.
FuzzyClustering fuzzy_c_means(std::span<const std::vector<double>> points, const FuzzyCMeansOptions &options = {});

/// Clusters the standardized copies of the series.
FuzzyClustering cluster_lurking_series(std::span<const ScoreTimeSeries> series,
                                       const FuzzyCMeansOptions &options = {});

} // namespace lurk
