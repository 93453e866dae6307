#include "oracles.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

#include <gsl/gsl_sf_zeta.h>

namespace lurk::testing {

EventLog::Row row(std::string actor, ActionKind kind, std::string target_node, std::string target_post, Day t) {
    return {std::move(actor), kind, std::move(target_node), std::move(target_post), t};
}

std::shared_ptr<const EventLog> make_log(std::vector<EventLog::Row> rows) {
    return std::make_shared<const EventLog>(EventLog::from_rows(std::move(rows)));
}

DenseGraph random_dense_graph(std::size_t n, double p, std::mt19937_64 &rng) {
    DenseGraph g;
    g.n = n;
    g.adj.assign(n, std::vector<bool>(n, false));
    std::bernoulli_distribution coin(p);
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            g.adj[u][v] = u != v && coin(rng);
        }
    }
    return g;
}

std::shared_ptr<const EventLog> log_from_graph(const DenseGraph &g) {
    std::vector<EventLog::Row> rows;
    for (std::size_t k = 0; k < g.n; ++k) {
        rows.push_back(row("n" + std::to_string(k), ActionKind::post, "", "post" + std::to_string(k), 0));
    }
    for (std::size_t u = 0; u < g.n; ++u) {
        for (std::size_t v = 0; v < g.n; ++v) {
            if (g.adj[u][v]) {
                rows.push_back(row("n" + std::to_string(v), ActionKind::like, "n" + std::to_string(u),
                                   "post" + std::to_string(u), 1));
            }
        }
    }
    return make_log(std::move(rows));
}

std::vector<double> lurker_map(const DenseGraph &g, std::span<const double> x, double d,
                               const std::vector<double> *node_w, const std::vector<std::vector<double>> *edge_w) {
    const auto n = g.n;
    std::vector<double> in(n, 1.0);
    std::vector<double> out(n, 1.0);
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            if (g.adj[u][v]) {
                out[u] += 1.0;
                in[v] += 1.0;
            }
        }
    }
    std::vector<double> y(n);
    for (std::size_t v = 0; v < n; ++v) {
        const double wv = node_w ? (*node_w)[v] : 1.0;
        double in_w = 0.0;
        double in_sum = 0.0;
        double out_w = 0.0;
        double out_sum = 0.0;
        double out_in = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            if (g.adj[u][v]) { // u in B_v
                in_sum += out[u] / in[u] * x[u];
                in_w += edge_w ? (*edge_w)[u][v] : 0.0;
            }
            if (g.adj[v][u]) { // u in R_v
                out_sum += in[u] / out[u] * x[u];
                out_in += in[u];
                out_w += edge_w ? (*edge_w)[v][u] : 0.0;
            }
        }
        const double l_in = std::exp(-in_w) / (wv * out[v]) * in_sum;
        const double l_out = out_in > 0.0 ? in[v] * std::exp(-out_w) / (wv * out_in) * out_sum : 0.0;
        y[v] = d * l_in * (1.0 + l_out) + (1.0 - d) / static_cast<double>(n);
    }
    return y;
}

std::vector<double> scores_by_index(const RankVector &rank, const EventLog &log, std::size_t n) {
    std::vector<double> out(n, std::nan(""));
    for (std::size_t i = 0; i < rank.nodes.size(); ++i) {
        const auto &name = log.nodes().name(rank.nodes[i]);
        out.at(std::stoul(name.substr(1))) = rank.scores[i];
    }
    return out;
}

double brute_kendall(std::span<const NodeId> a, std::span<const NodeId> b) {
    std::set<std::pair<NodeId, NodeId>> pa;
    std::set<std::pair<NodeId, NodeId>> pb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            pa.insert({a[i], a[j]});
            pb.insert({b[i], b[j]});
        }
    }
    std::size_t delta = 0;
    for (const auto &p : pa) {
        delta += pb.contains(p) ? 0 : 1;
    }
    for (const auto &p : pb) {
        delta += pa.contains(p) ? 0 : 1;
    }
    const auto m = static_cast<double>(a.size());
    return 1.0 - 2.0 * static_cast<double>(delta) / (m * (m - 1.0));
}

double brute_fagin(std::span<const NodeId> a, std::span<const NodeId> b, std::size_t k) {
    double total = 0.0;
    for (std::size_t q = 1; q <= k; ++q) {
        std::size_t common = 0;
        for (std::size_t i = 0; i < q; ++i) {
            for (std::size_t j = 0; j < q; ++j) {
                common += a[i] == b[j] ? 1 : 0;
            }
        }
        total += static_cast<double>(common) / static_cast<double>(q);
    }
    return total / static_cast<double>(k);
}

double hurwitz_zeta(double s, double q) {
    gsl_sf_result r;
    if (gsl_sf_hzeta_e(s, q, &r) != 0) {
        throw std::runtime_error("hurwitz zeta failed");
    }
    return r.val;
}

std::uint64_t sample_power_law(double alpha, std::uint64_t x_min, std::mt19937_64 &rng) {
    // Smallest x with P(X > x) = zeta(alpha, x+1) / zeta(alpha, x_min) <= 1 - u.
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double target = (1.0 - u) * hurwitz_zeta(alpha, static_cast<double>(x_min));
    auto survives = [&](std::uint64_t x) { return hurwitz_zeta(alpha, static_cast<double>(x + 1)) > target; };
    std::uint64_t lo = x_min;
    std::uint64_t hi = x_min;
    while (survives(hi)) {
        lo = hi + 1;
        hi = hi * 2 + 1;
        if (hi > (std::uint64_t{1} << 50)) {
            return hi;
        }
    }
    while (lo < hi) {
        const auto mid = lo + (hi - lo) / 2;
        if (survives(mid)) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return lo;
}

} // namespace lurk::testing
