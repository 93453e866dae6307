#include "lurkrank/fuzzy_cmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <unordered_set>

#include "lurkrank/error.hpp"

namespace lurk {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        total += d * d;
    }
    return total;
}

void update_memberships(std::span<const std::vector<double>> points, const std::vector<std::vector<double>> &centroids,
                        double fuzzifier, std::vector<std::vector<double>> &u) {
    const auto c = centroids.size();
    const double exponent = 1.0 / (fuzzifier - 1.0);
    std::vector<double> d2(c);
    std::vector<double> logs(c);
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::size_t zeros = 0;
        for (std::size_t j = 0; j < c; ++j) {
            d2[j] = squared_distance(points[i], centroids[j]);
            zeros += d2[j] == 0.0 ? 1 : 0;
        }
        if (zeros > 0) {
            for (std::size_t j = 0; j < c; ++j) {
                u[i][j] = d2[j] == 0.0 ? 1.0 / static_cast<double>(zeros) : 0.0;
            }
            continue;
        }
        // u_ij = d2_ij^-e / sum_k d2_ik^-e, evaluated in log space.
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < c; ++j) {
            logs[j] = -exponent * std::log(d2[j]);
            top = std::max(top, logs[j]);
        }
        double total = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            logs[j] = std::exp(logs[j] - top);
            total += logs[j];
        }
        for (std::size_t j = 0; j < c; ++j) {
            u[i][j] = logs[j] / total;
        }
    }
}

void update_centroids(std::span<const std::vector<double>> points, const std::vector<std::vector<double>> &u,
                      double fuzzifier, std::vector<std::vector<double>> &centroids) {
    const auto dim = points.front().size();
    for (std::size_t j = 0; j < centroids.size(); ++j) {
        std::vector<double> acc(dim, 0.0);
        double weight = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double w = std::pow(u[i][j], fuzzifier);
            weight += w;
            for (std::size_t t = 0; t < dim; ++t) {
                acc[t] += w * points[i][t];
            }
        }
        if (weight > 0.0) {
            for (auto &x : acc) {
                x /= weight;
            }
            centroids[j] = std::move(acc);
        }
    }
}

double objective(std::span<const std::vector<double>> points, const std::vector<std::vector<double>> &centroids,
                 const std::vector<std::vector<double>> &u, double fuzzifier) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < centroids.size(); ++j) {
            total += std::pow(u[i][j], fuzzifier) * squared_distance(points[i], centroids[j]);
        }
    }
    return total;
}

} // namespace

std::vector<double> standardize(std::span<const double> values) {
    if (values.size() < 2) {
        throw InvalidArgument("standardization needs at least two values");
    }
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (const auto v : values) {
        mean += v;
    }
    mean /= n;
    double ss = 0.0;
    for (const auto v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) {
        throw InvalidArgument("cannot standardize a constant series");
    }
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = (values[i] - mean) / sd;
    }
    return out;
}

LurkingSeriesSet build_lurking_series(std::span<const RankVector> snapshots, const LurkingSeriesOptions &options) {
    if (snapshots.size() < 2) {
        throw InvalidArgument("lurking series need at least two snapshots");
    }
    std::vector<RankVector> normalized;
    normalized.reserve(snapshots.size());
    for (const auto &r : snapshots) {
        normalized.push_back(r.nodes.empty() ? r : normalize_scores(r, options.normalization));
    }

    const auto first = normalized.front().ranking();
    const auto k = std::min(top_k(first.size(), options.top_fraction), first.size());
    std::vector<NodeId> candidates(first.begin(), first.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(candidates.begin(), candidates.end());

    const auto later = snapshots.size() - 1;
    LurkingSeriesSet out;
    for (const auto node : candidates) {
        std::vector<std::optional<double>> raw(normalized.size());
        std::size_t present_later = 0;
        for (std::size_t s = 0; s < normalized.size(); ++s) {
            const auto &nodes = normalized[s].nodes;
            auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
            if (it != nodes.end() && *it == node) {
                raw[s] = normalized[s].scores[static_cast<std::size_t>(it - nodes.begin())];
                present_later += s > 0 ? 1 : 0;
            }
        }
        if (static_cast<double>(present_later) < options.presence_fraction * static_cast<double>(later)) {
            continue;
        }

        ScoreTimeSeries series;
        series.node = node;
        series.values.resize(raw.size());
        for (std::size_t s = 0; s < raw.size(); ++s) {
            if (raw[s]) {
                series.values[s] = *raw[s];
                continue;
            }
            std::optional<std::size_t> left;
            std::optional<std::size_t> right;
            for (std::size_t l = s; l-- > 0;) {
                if (raw[l]) {
                    left = l;
                    break;
                }
            }
            for (std::size_t r = s + 1; r < raw.size(); ++r) {
                if (raw[r]) {
                    right = r;
                    break;
                }
            }
            if (left && right) {
                const double t = static_cast<double>(s - *left) / static_cast<double>(*right - *left);
                series.values[s] = *raw[*left] + t * (*raw[*right] - *raw[*left]);
            } else {
                series.values[s] = *raw[left ? *left : *right];
            }
        }
        try {
            series.standardized = standardize(series.values);
        } catch (const InvalidArgument &) {
            out.zero_variance.push_back(node);
            continue;
        }
        out.series.push_back(std::move(series));
    }
    return out;
}

FuzzyClustering fuzzy_c_means(std::span<const std::vector<double>> points, const FuzzyCMeansOptions &options) {
    const auto n = points.size();
    const auto c = options.clusters;
    if (c < 2) {
        throw InvalidArgument("fuzzy c-means needs at least two clusters");
    }
    if (c >= n) {
        throw InvalidArgument("cluster count must be smaller than the number of series");
    }
    if (!(options.fuzzifier > 1.0)) {
        throw InvalidArgument("fuzzifier must be greater than 1");
    }
    const auto dim = points.front().size();
    for (const auto &p : points) {
        if (p.size() != dim || dim == 0) {
            throw InvalidArgument("all series must share the same non-zero length");
        }
    }

    // Seeded farthest-point initialization of the centroids.
    std::mt19937_64 rng(options.seed);
    std::vector<std::vector<double>> centroids;
    centroids.push_back(points[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (centroids.size() < c) {
        std::size_t pick = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(points[i], centroids.back()));
            if (nearest[i] > best) {
                best = nearest[i];
                pick = i;
            }
        }
        centroids.push_back(points[pick]);
    }

    FuzzyClustering out;
    out.clusters = c;
    out.fuzzifier = options.fuzzifier;
    out.membership.assign(n, std::vector<double>(c, 0.0));
    update_memberships(points, centroids, options.fuzzifier, out.membership);

    double previous = std::numeric_limits<double>::infinity();
    for (std::uint32_t it = 0; it < options.max_iterations; ++it) {
        update_centroids(points, out.membership, options.fuzzifier, centroids);
        update_memberships(points, centroids, options.fuzzifier, out.membership);
        const double j = objective(points, centroids, out.membership, options.fuzzifier);
        out.objective_history.push_back(j);
        out.iterations = it + 1;
        if (previous - j < options.tolerance) {
            break;
        }
        previous = j;
    }
    out.centroids = std::move(centroids);
    out.objective = out.objective_history.empty() ? 0.0 : out.objective_history.back();
    return out;
}

FuzzyClustering cluster_lurking_series(std::span<const ScoreTimeSeries> series, const FuzzyCMeansOptions &options) {
    std::vector<std::vector<double>> points;
    points.reserve(series.size());
    for (const auto &s : series) {
        points.push_back(s.standardized);
    }
    auto out = fuzzy_c_means(points, options);
    out.nodes.reserve(series.size());
    for (const auto &s : series) {
        out.nodes.push_back(s.node);
    }
    return out;
}

} // namespace lurk
