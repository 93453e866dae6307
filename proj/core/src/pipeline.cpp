#include "lurkrank/pipeline.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "lurkrank/csv.hpp"
#include "lurkrank/error.hpp"
#include "lurkrank/fuzzy_cmeans.hpp"
#include "lurkrank/power_law.hpp"
#include "lurkrank/preferential_attachment.hpp"
#include "lurkrank/responsiveness.hpp"

namespace lurk {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr std::array<Analysis, 5> kAnalyses = {Analysis::overlap, Analysis::newcomers, Analysis::prefattach,
                                               Analysis::responsiveness, Analysis::cluster};

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
    throw InvalidArgument("invalid value '" + std::string(value) + "' for " + std::string(key));
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        if (!item.empty()) {
            out.push_back(item);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

double to_double(std::string_view key, std::string_view value) {
    const auto v = csv::parse_double(value);
    if (!v || !std::isfinite(*v)) {
        bad_value(key, value);
    }
    return *v;
}

std::int64_t to_int(std::string_view key, std::string_view value) {
    const auto v = csv::parse_int(value);
    if (!v) {
        bad_value(key, value);
    }
    return *v;
}

std::uint32_t to_u32(std::string_view key, std::string_view value) {
    const auto v = to_int(key, value);
    if (v < 0 || v > std::numeric_limits<std::uint32_t>::max()) {
        bad_value(key, value);
    }
    return static_cast<std::uint32_t>(v);
}

bool to_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no" || value == "off") {
        return false;
    }
    bad_value(key, value);
}

std::string join_names(const auto &items) {
    std::string out;
    for (const auto &item : items) {
        if (!out.empty()) {
            out += ',';
        }
        out += std::string(to_string(item));
    }
    return out.empty() ? "none" : out;
}

std::string algorithm_list(const std::vector<Algorithm> &algos) {
    std::string out;
    for (const auto a : algos) {
        if (!out.empty()) {
            out += ',';
        }
        out += std::string(cli_name(a));
    }
    return out.empty() ? "none" : out;
}

std::string index_tag(std::uint32_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02u", index);
    return buf;
}

std::string_view scope_name(NormalizationScope s) { return s == NormalizationScope::causal ? "causal" : "all"; }
std::string_view scope_name(ZeroContributorScope s) {
    return s == ZeroContributorScope::history ? "history" : "window";
}

/// Runs fn(0..n-1) on up to `jobs` threads; the first exception is rethrown.
void parallel_for(std::size_t n, std::uint32_t jobs, const std::function<void(std::size_t)> &fn) {
    const auto workers = std::min<std::size_t>(std::max<std::uint32_t>(jobs, 1), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

double ratio_or_nan(std::span<const NodeId> a, std::span<const NodeId> b, OverlapDenominator denom) {
    const auto &base = denom == OverlapDenominator::first ? a : b;
    return base.empty() ? std::nan("") : overlap_ratio(a, b, denom);
}

json names_of(const EventLog &log, std::span<const NodeId> nodes) {
    auto out = json::array();
    for (const auto v : nodes) {
        out.push_back(log.nodes().name(v));
    }
    return out;
}

class Run {
public:
    explicit Run(const RunConfig &cfg) : cfg_(cfg) {}

    RunResult execute() {
        fs::create_directories(cfg_.out);
        stage("ingest", {}, [&] { ingest(); });
        stage("snapshot", {"ingest"}, [&] { snapshots(); });
        if (cfg_.write_ranks && !cfg_.algorithms.empty()) {
            stage("rank", {"snapshot"}, [&] { rank(); });
        }
        if (cfg_.evaluate) {
            stage("eval", {"snapshot"}, [&] { evaluate(); });
        }
        for (const auto a : cfg_.analyses) {
            const auto name = "analyze:" + std::string(to_string(a));
            stage(name, {"snapshot"}, [&] { analyze(a); });
        }
        write_manifest();
        return result_;
    }

private:
    using Body = std::function<void()>;

    void stage(const std::string &name, std::vector<std::string> needs, const Body &body) {
        StageStatus status{name, "ok", ""};
        for (const auto &dep : needs) {
            if (!done_.contains(dep)) {
                status.status = "skipped";
                status.error = "depends on failed stage " + dep;
                result_.stages.push_back(status);
                return;
            }
        }
        try {
            body();
            done_.insert(name);
        } catch (const std::exception &e) {
            status.status = "failed";
            status.error = e.what();
        }
        result_.stages.push_back(status);
    }

    void write(const std::string &relative, const std::function<void(std::ostream &)> &body) {
        const auto path = cfg_.out / relative;
        fs::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw Error("cannot write " + path.string());
        }
        body(out);
        if (!out) {
            throw Error("failed writing " + path.string());
        }
        outputs_.insert(relative);
    }

    void write_json(const std::string &relative, const json &j) {
        write(relative, [&](std::ostream &o) { o << j.dump(2) << '\n'; });
    }

    SnapshotMode mode_for(Algorithm a) const {
        return a == Algorithm::te_lr ? SnapshotMode::cumulative : cfg_.mode.value_or(SnapshotMode::transient);
    }

    static std::size_t slot(SnapshotMode m) { return m == SnapshotMode::transient ? 0 : 1; }
    static std::size_t slot(Algorithm a) { return static_cast<std::size_t>(a); }

    std::string file_stem(SnapshotMode m, std::uint32_t index) const {
        return std::string(to_string(m)) + "_" + index_tag(index);
    }

    void ingest() {
        log_ = std::make_shared<const EventLog>(load_events(cfg_.input));
        start_ = cfg_.start.value_or(log_->t_min());
        if (start_ > log_->t_max()) {
            throw InvalidArgument("start lies after the last event");
        }
        const auto count = interval_count(start_, cfg_.interval_days, log_->t_max());
        for (std::uint32_t i = 0; i < count; ++i) {
            subs_.push_back(sub_interval(start_, cfg_.interval_days, i));
        }
        if (cfg_.index) {
            if (*cfg_.index >= count) {
                throw InvalidArgument("index " + std::to_string(*cfg_.index) + " exceeds the " +
                                      std::to_string(count) + " available sub-intervals");
            }
            indices_ = {*cfg_.index};
        } else {
            for (std::uint32_t i = 0; i < count; ++i) {
                indices_.push_back(i);
            }
        }
        if (cfg_.write_ingest) {
            write("nodes.csv", [&](std::ostream &o) { write_node_table(o, *log_); });
            write("events.csv", [&](std::ostream &o) { write_events(o, *log_); });
        }
    }

    bool mode_needed(SnapshotMode m) const {
        const bool rank_uses = std::any_of(cfg_.algorithms.begin(), cfg_.algorithms.end(),
                                           [&](Algorithm a) { return mode_for(a) == m; });
        const bool eval_uses = cfg_.evaluate && rank_uses;
        const bool analysis_uses = m == SnapshotMode::transient && !cfg_.analyses.empty();
        return rank_uses || eval_uses || analysis_uses || (cfg_.mode && *cfg_.mode == m) ||
               (!cfg_.mode && cfg_.algorithms.empty() && !cfg_.evaluate && cfg_.analyses.empty());
    }

    void snapshots() {
        SnapshotOptions opts;
        opts.edge_policy = cfg_.edge_policy;
        opts.carry_prior_follows = cfg_.carry_prior_follows;
        std::vector<std::vector<std::string>> rows;
        for (const auto m : {SnapshotMode::transient, SnapshotMode::cumulative}) {
            if (!mode_needed(m)) {
                continue;
            }
            auto &graphs = graphs_[slot(m)];
            graphs.resize(indices_.size());
            parallel_for(indices_.size(), cfg_.jobs, [&](std::size_t p) {
                SnapshotSpec spec{m, cfg_.interval_days, start_, indices_[p]};
                graphs[p] = build_snapshot(log_, spec, opts);
            });
            for (std::size_t p = 0; p < indices_.size(); ++p) {
                const auto &g = *graphs[p];
                if (cfg_.write_snapshots) {
                    write("snapshots/" + file_stem(m, indices_[p]) + ".csv",
                          [&](std::ostream &o) { write_edge_list(o, g); });
                }
                rows.push_back({std::string(to_string(m)), std::to_string(indices_[p]),
                                std::to_string(g.window().start), std::to_string(g.window().end),
                                std::to_string(g.num_nodes()), std::to_string(g.num_edges()),
                                std::to_string(g.events().size())});
            }
        }
        if (cfg_.write_snapshots) {
            write("snapshots/index.csv", [&](std::ostream &o) {
                o << "mode,index,window_start,window_end,nodes,edges,events\n";
                for (const auto &r : rows) {
                    for (std::size_t c = 0; c < r.size(); ++c) {
                        o << (c ? "," : "") << r[c];
                    }
                    o << '\n';
                }
            });
        }
    }

    const FeatureExtractor &features() {
        if (!features_) {
            FeatureOptions fo;
            fo.dsa_epsilon = cfg_.dsa_epsilon;
            features_.emplace(log_, fo);
        }
        return *features_;
    }

    std::optional<RankVector> compute(Algorithm a, SnapshotMode m, std::size_t p) {
        const auto &g = *graphs_[slot(m)][p];
        if (g.empty()) {
            return std::nullopt;
        }
        switch (a) {
        case Algorithm::lr:
            return lurker_rank(g, cfg_.ranker);
        case Algorithm::ts_lr:
            return ts_lurker_rank(g, transient_weights(features().transient(g), cfg_.ranker), cfg_.ranker);
        case Algorithm::te_lr:
            return te_lurker_rank(g, table(p), cfg_.ranker);
        case Algorithm::dd:
            return data_driven_rank(g);
        }
        return std::nullopt;
    }

    const CumulativeScoreTable &table(std::size_t p) {
        auto &t = tables_[p];
        if (!t) {
            const auto &g = *graphs_[slot(SnapshotMode::cumulative)][p];
            t = build_cumulative_table(features(), subs_, indices_[p], g, cfg_.normalization);
        }
        return *t;
    }

    /// Rank of algorithm `a` on every selected snapshot of mode `m`, cached.
    const std::vector<std::optional<RankVector>> &ranks(Algorithm a, SnapshotMode m) {
        auto &cache = ranks_[slot(m)][slot(a)];
        if (cache.size() == indices_.size()) {
            return cache;
        }
        if (graphs_[slot(m)].size() != indices_.size()) {
            throw Error(std::string(to_string(m)) + " snapshots were not built");
        }
        if (a == Algorithm::ts_lr || a == Algorithm::te_lr) {
            features();
        }
        if (a == Algorithm::te_lr) {
            tables_.resize(indices_.size());
        }
        std::vector<std::optional<RankVector>> out(indices_.size());
        // Building a cumulative table touches shared state, so prepare them serially.
        if (a == Algorithm::te_lr) {
            for (std::size_t p = 0; p < indices_.size(); ++p) {
                if (!graphs_[slot(m)][p]->empty()) {
                    table(p);
                }
            }
        }
        parallel_for(indices_.size(), cfg_.jobs, [&](std::size_t p) { out[p] = compute(a, m, p); });
        cache = std::move(out);
        return cache;
    }

    void rank() {
        std::vector<std::string> summary;
        for (const auto a : cfg_.algorithms) {
            const auto m = mode_for(a);
            const auto &rs = ranks(a, m);
            for (std::size_t p = 0; p < indices_.size(); ++p) {
                const auto stem = file_stem(m, indices_[p]) + "_" + std::string(cli_name(a));
                if (!rs[p]) {
                    summary.push_back(std::string(cli_name(a)) + "," + std::string(to_string(m)) + "," +
                                      std::to_string(indices_[p]) + ",0,0,0,empty");
                    continue;
                }
                const auto &r = *rs[p];
                write("ranks/" + stem + ".csv", [&](std::ostream &o) { write_rank_csv(o, r, *log_); });
                write("ranks/" + stem + ".json", [&](std::ostream &o) { write_rank_json(o, r, *log_); });
                summary.push_back(std::string(cli_name(a)) + "," + std::string(to_string(m)) + "," +
                                  std::to_string(indices_[p]) + "," + std::to_string(r.size()) + "," +
                                  std::to_string(r.iterations) + "," + csv::format_double(r.residual) + "," +
                                  (r.converged ? (r.restarted ? "converged_after_restart" : "converged") : "not_converged"));
            }
            if (a == Algorithm::te_lr) {
                for (std::size_t p = 0; p < indices_.size(); ++p) {
                    if (tables_[p]) {
                        write("features/cumulative_" + index_tag(indices_[p]) + ".csv",
                              [&](std::ostream &o) { tables_[p]->write_csv(o, *log_); });
                    }
                }
            }
        }
        write("ranks/index.csv", [&](std::ostream &o) {
            o << "algorithm,mode,index,nodes,iterations,residual,status\n";
            for (const auto &line : summary) {
                o << line << '\n';
            }
        });
    }

    void evaluate() {
        std::vector<EvaluationRow> rows;
        std::set<SnapshotMode> modes;
        for (const auto a : cfg_.algorithms) {
            if (a != Algorithm::dd) {
                modes.insert(mode_for(a));
            }
        }
        for (const auto m : modes) {
            const auto &refs = ranks(Algorithm::dd, m);
            for (std::size_t p = 0; p < indices_.size(); ++p) {
                if (refs[p]) {
                    write("reference/" + file_stem(m, indices_[p]) + "_dd.csv",
                          [&](std::ostream &o) { write_rank_csv(o, *refs[p], *log_); });
                }
            }
        }
        for (std::size_t p = 0; p < indices_.size(); ++p) {
            for (const auto a : cfg_.algorithms) {
                if (a == Algorithm::dd) {
                    continue;
                }
                const auto m = mode_for(a);
                const auto &rank = ranks(a, m)[p];
                const auto &ref = ranks(Algorithm::dd, m)[p];
                if (rank && ref) {
                    rows.push_back(evaluate_against(*rank, *ref, cfg_.top_frac));
                } else {
                    rows.push_back({graphs_[slot(m)][p]->window().end, std::string(to_string(a)), std::nan(""),
                                    std::nan("")});
                }
            }
        }
        write("eval.csv", [&](std::ostream &o) { write_evaluation_csv(o, rows); });
    }

    void analyze(Analysis a) {
        switch (a) {
        case Analysis::overlap:
            return overlap();
        case Analysis::newcomers:
            return newcomers();
        case Analysis::prefattach:
            return prefattach();
        case Analysis::responsiveness:
            return responsiveness();
        case Analysis::cluster:
            return cluster();
        }
    }

    std::vector<UserCategorySnapshot> categories() {
        if (categories_) {
            return *categories_;
        }
        const auto &rs = ranks(Algorithm::lr, SnapshotMode::transient);
        std::vector<UserCategorySnapshot> out;
        for (std::size_t p = 0; p < indices_.size(); ++p) {
            if (rs[p]) {
                out.push_back(classify_users(*graphs_[0][p], *rs[p], cfg_.category_frac, cfg_.zero_scope));
            }
        }
        categories_ = out;
        return out;
    }

    void overlap() {
        const auto cats = categories();
        auto rows = json::array();
        write("analysis/overlap.csv", [&](std::ostream &o) {
            o << "index,window_start,window_end,potential_lurkers,zero_contributors,top_lurkers,"
                 "zero_in_potential,top_in_potential,zero_in_top\n";
            for (const auto &c : cats) {
                const double zp = ratio_or_nan(c.zero_contributors, c.potential_lurkers, OverlapDenominator::second);
                const double tp = ratio_or_nan(c.top_lurkers, c.potential_lurkers, OverlapDenominator::second);
                const double zt = ratio_or_nan(c.zero_contributors, c.top_lurkers, OverlapDenominator::second);
                o << c.interval_index << ',' << c.window.start << ',' << c.window.end << ','
                  << c.potential_lurkers.size() << ',' << c.zero_contributors.size() << ',' << c.top_lurkers.size()
                  << ',' << csv::format_double(zp) << ',' << csv::format_double(tp) << ','
                  << csv::format_double(zt) << '\n';
                rows.push_back({{"index", c.interval_index},
                                {"window", {c.window.start, c.window.end}},
                                {"potential_lurkers", c.potential_lurkers.size()},
                                {"zero_contributors", c.zero_contributors.size()},
                                {"top_lurkers", c.top_lurkers.size()},
                                {"zero_in_potential", zp},
                                {"top_in_potential", tp},
                                {"zero_in_top", zt}});
            }
        });
        write_json("analysis/overlap.json", {{"analysis", "overlap"},
                                             {"category_fraction", cfg_.category_frac},
                                             {"zero_contributor_scope", scope_name(cfg_.zero_scope)},
                                             {"snapshots", rows}});
    }

    void newcomers() {
        const auto cats = categories();
        auto rows = json::array();
        write("analysis/newcomers.csv", [&](std::ostream &o) {
            o << "index,window_start,window_end,newcomers,top_lurkers,bottom_active,"
                 "newcomers_in_top,newcomers_in_bottom,potential_among_newcomers\n";
            for (const auto &c : cats) {
                const double nt = ratio_or_nan(c.newcomers, c.top_lurkers, OverlapDenominator::second);
                const double nb = ratio_or_nan(c.newcomers, c.bottom_active, OverlapDenominator::second);
                const double pn = ratio_or_nan(c.potential_lurkers, c.newcomers, OverlapDenominator::second);
                o << c.interval_index << ',' << c.window.start << ',' << c.window.end << ',' << c.newcomers.size()
                  << ',' << c.top_lurkers.size() << ',' << c.bottom_active.size() << ','
                  << csv::format_double(nt) << ',' << csv::format_double(nb) << ',' << csv::format_double(pn)
                  << '\n';
                rows.push_back({{"index", c.interval_index},
                                {"window", {c.window.start, c.window.end}},
                                {"newcomers", c.newcomers.size()},
                                {"newcomers_in_top", nt},
                                {"newcomers_in_bottom", nb},
                                {"potential_among_newcomers", pn}});
            }
        });
        write_json("analysis/newcomers.json",
                   {{"analysis", "newcomers"}, {"category_fraction", cfg_.category_frac}, {"snapshots", rows}});
    }

    /// Lurkers and active users of each week, judged on the follow graph
    /// formed before the week's end.
    std::vector<WeeklyCategories> weekly_categories(Day weeks) const {
        std::vector<WeeklyCategories> out;
        std::unordered_set<std::uint64_t> seen;
        std::map<NodeId, std::pair<std::uint32_t, std::uint32_t>> degree; // node -> (followees, followers)
        const auto events = log_->events();
        std::size_t cursor = 0;
        for (Day w = 0; w < weeks; ++w) {
            const Day end = start_ + (w + 1) * cfg_.week_days;
            for (; cursor < events.size() && events[cursor].timestamp < end; ++cursor) {
                const auto &ev = events[cursor];
                if (ev.kind != ActionKind::follow || !ev.target_node || *ev.target_node == ev.actor) {
                    continue;
                }
                if (seen.insert(pair_key(*ev.target_node, ev.actor)).second) {
                    ++degree[ev.actor].first;
                    ++degree[*ev.target_node].second;
                }
            }
            WeeklyCategories cats;
            for (const auto &[v, d] : degree) {
                (d.first > d.second ? cats.lurkers : cats.active).push_back(v);
            }
            out.push_back(std::move(cats));
        }
        return out;
    }

    void prefattach() {
        const Day weeks = interval_count(start_, cfg_.week_days, log_->t_max());
        const auto cats = weekly_categories(weeks);
        AttachmentOptions opts;
        opts.start = start_;
        opts.week_length = cfg_.week_days;

        json report{{"analysis", "prefattach"}, {"week_days", cfg_.week_days}, {"weeks", weeks}};
        std::ostringstream table;
        table << "mode,k,avg_new_links,observations\n";
        for (const auto mode : {AttachmentMode::received_by_active, AttachmentMode::produced_by_lurkers}) {
            const std::string name = mode == AttachmentMode::received_by_active ? "received_by_active"
                                                                                 : "produced_by_lurkers";
            try {
                const auto series = preferential_attachment_series(*log_, cats, mode, opts);
                auto points = json::array();
                for (const auto &pt : series.points) {
                    table << name << ',' << pt.k << ',' << csv::format_double(pt.avg_new_links) << ','
                          << pt.observations << '\n';
                    points.push_back({{"k", pt.k}, {"avg_new_links", pt.avg_new_links},
                                      {"observations", pt.observations}});
                }
                report[name] = {{"slope", series.fit.slope},
                                {"intercept", series.fit.intercept},
                                {"correlation", series.fit.correlation},
                                {"observation_weighted",
                                 {{"slope", series.observation_fit.slope},
                                  {"intercept", series.observation_fit.intercept},
                                  {"correlation", series.observation_fit.correlation}}},
                                {"points", points}};
            } catch (const InvalidArgument &e) {
                report[name] = {{"error", e.what()}};
            }
        }

        // Distribution of lurker-follower counts among active users at the end.
        std::vector<std::uint64_t> samples;
        if (!cats.empty()) {
            const auto &last = cats.back();
            const std::unordered_set<NodeId> lurkers(last.lurkers.begin(), last.lurkers.end());
            std::unordered_map<NodeId, std::uint64_t> k;
            std::unordered_set<std::uint64_t> seen;
            for (const auto &ev : log_->events()) {
                if (ev.kind == ActionKind::follow && ev.target_node && lurkers.contains(ev.actor) &&
                    seen.insert(pair_key(*ev.target_node, ev.actor)).second) {
                    ++k[*ev.target_node];
                }
            }
            for (const auto v : last.active) {
                if (const auto it = k.find(v); it != k.end()) {
                    samples.push_back(it->second);
                }
            }
        }
        try {
            const auto fit = power_law_fit(samples);
            report["power_law"] = {{"alpha", fit.alpha},
                                   {"x_min", fit.x_min},
                                   {"ks_statistic", fit.ks_statistic},
                                   {"tail_size", fit.tail_size},
                                   {"samples", samples.size()}};
        } catch (const InvalidArgument &e) {
            report["power_law"] = {{"error", e.what()}, {"samples", samples.size()}};
        }
        write("analysis/prefattach.csv", [&](std::ostream &o) { o << table.str(); });
        write_json("analysis/prefattach.json", report);
    }

    void responsiveness() {
        // Groups come from LR on the cumulative snapshot of the last selected interval.
        SnapshotOptions opts;
        opts.edge_policy = cfg_.edge_policy;
        const SnapshotSpec spec{SnapshotMode::cumulative, cfg_.interval_days, start_, indices_.back()};
        const auto g = build_snapshot(log_, spec, opts);
        if (g.empty()) {
            throw InvalidArgument("responsiveness: the cumulative snapshot is empty");
        }
        const auto cats = classify_users(g, lurker_rank(g, cfg_.ranker), cfg_.category_frac, cfg_.zero_scope);

        ResponsivenessOptions ro;
        ro.horizon = cfg_.horizon;
        ro.until = g.window().end;
        json report{{"analysis", "responsiveness"}, {"horizon", cfg_.horizon}, {"window", {g.window().start, g.window().end}}};
        std::ostringstream table;
        table << "group,latency_days,cdf\n";
        for (const auto &[name, group] : {std::pair<std::string, const std::vector<NodeId> &>{"top_lurkers", cats.top_lurkers},
                                          std::pair<std::string, const std::vector<NodeId> &>{"bottom_active", cats.bottom_active}}) {
            const auto ecdf = responsiveness_ecdf(*log_, group, ro);
            auto steps = json::array();
            for (const auto &[x, f] : ecdf.steps) {
                steps.push_back({x, f});
            }
            if (!ecdf.empty()) {
                for (const auto &[x, f] : ecdf.on_grid()) {
                    table << name << ',' << x << ',' << csv::format_double(f) << '\n';
                }
            }
            report[name] = {{"members", group.size()},
                            {"empty", ecdf.empty()},
                            {"samples", ecdf.samples},
                            {"beyond_horizon", ecdf.beyond_horizon},
                            {"steps", steps}};
        }
        write("analysis/responsiveness.csv", [&](std::ostream &o) { o << table.str(); });
        write_json("analysis/responsiveness.json", report);
    }

    void cluster() {
        const auto &rs = ranks(Algorithm::lr, SnapshotMode::transient);
        std::vector<RankVector> series_input;
        for (const auto &r : rs) {
            if (r) {
                series_input.push_back(*r);
            }
        }
        LurkingSeriesOptions lo;
        lo.top_fraction = cfg_.category_frac;
        lo.presence_fraction = cfg_.presence_frac;
        const auto set = build_lurking_series(series_input, lo);

        FuzzyCMeansOptions fo;
        fo.clusters = cfg_.clusters;
        fo.fuzzifier = cfg_.fuzzifier;
        fo.tolerance = cfg_.fcm_tolerance;
        fo.max_iterations = cfg_.fcm_max_iter;
        fo.seed = cfg_.seed;
        const auto fcm = cluster_lurking_series(set.series, fo);

        auto memberships = json::array();
        write("analysis/cluster.csv", [&](std::ostream &o) {
            o << "node,cluster";
            for (std::size_t j = 0; j < fcm.clusters; ++j) {
                o << ",membership_" << j;
            }
            o << '\n';
            for (std::size_t i = 0; i < fcm.nodes.size(); ++i) {
                const auto &row = fcm.membership[i];
                const auto best = std::max_element(row.begin(), row.end()) - row.begin();
                o << csv::escape(log_->nodes().name(fcm.nodes[i])) << ',' << best;
                for (const auto u : row) {
                    o << ',' << csv::format_double(u);
                }
                o << '\n';
                memberships.push_back({{"node", log_->nodes().name(fcm.nodes[i])}, {"cluster", best}, {"membership", row}});
            }
        });
        write_json("analysis/cluster.json", {{"analysis", "cluster"},
                                             {"clusters", fcm.clusters},
                                             {"fuzzifier", fcm.fuzzifier},
                                             {"snapshots", series_input.size()},
                                             {"objective", fcm.objective},
                                             {"iterations", fcm.iterations},
                                             {"zero_variance_excluded", names_of(*log_, set.zero_variance)},
                                             {"centroids", fcm.centroids},
                                             {"memberships", memberships}});
    }

    void write_manifest() {
        json stages = json::array();
        for (const auto &s : result_.stages) {
            json entry{{"name", s.name}, {"status", s.status}};
            if (!s.error.empty()) {
                entry["error"] = s.error;
            }
            stages.push_back(std::move(entry));
        }
        json config = json::object();
        std::istringstream lines(cfg_.canonical());
        for (std::string line; std::getline(lines, line);) {
            const auto eq = line.find(" = ");
            config[line.substr(0, eq)] = line.substr(eq + 3);
        }
        json manifest{{"status", result_.ok() ? "ok" : "failed"},
                      {"config_hash", cfg_.hash()},
                      {"seed", cfg_.seed},
                      {"config", config},
                      {"stages", stages},
                      {"outputs", outputs_}};
        std::ofstream out(cfg_.out / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << '\n';
    }

    const RunConfig &cfg_;
    RunResult result_;
    std::set<std::string> done_;
    std::set<std::string> outputs_;

    std::shared_ptr<const EventLog> log_;
    Day start_ = 0;
    std::vector<TemporalInterval> subs_;
    std::vector<std::uint32_t> indices_;
    std::array<std::vector<std::optional<SnapshotGraph>>, 2> graphs_;
    std::optional<FeatureExtractor> features_;
    std::vector<std::optional<CumulativeScoreTable>> tables_;
    std::array<std::array<std::vector<std::optional<RankVector>>, 4>, 2> ranks_;
    std::optional<std::vector<UserCategorySnapshot>> categories_;
};

} // namespace

std::string_view to_string(Analysis analysis) {
    switch (analysis) {
    case Analysis::overlap:
        return "overlap";
    case Analysis::newcomers:
        return "newcomers";
    case Analysis::prefattach:
        return "prefattach";
    case Analysis::responsiveness:
        return "responsiveness";
    case Analysis::cluster:
        return "cluster";
    }
    return "unknown";
}

std::optional<Analysis> parse_analysis(std::string_view text) {
    for (const auto a : kAnalyses) {
        if (to_string(a) == text) {
            return a;
        }
    }
    return std::nullopt;
}

void RunConfig::set(std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "input") {
        input = std::string(value);
    } else if (key == "out") {
        out = std::string(value);
    } else if (key == "edge-policy") {
        const auto p = parse_edge_policy(value);
        if (!p) {
            bad_value(key, value);
        }
        edge_policy = *p;
    } else if (key == "carry-prior-follows") {
        carry_prior_follows = to_bool(key, value);
    } else if (key == "mode") {
        if (value == "auto") {
            mode.reset();
        } else if (const auto m = parse_snapshot_mode(value)) {
            mode = *m;
        } else {
            bad_value(key, value);
        }
    } else if (key == "interval-days") {
        interval_days = to_int(key, value);
    } else if (key == "start") {
        start = value == "auto" ? std::nullopt : std::optional<Day>(to_int(key, value));
    } else if (key == "index") {
        index = value == "all" ? std::nullopt : std::optional<std::uint32_t>(to_u32(key, value));
    } else if (key == "damping") {
        ranker.damping = to_double(key, value);
    } else if (key == "omega-f") {
        ranker.omega_f = to_double(key, value);
    } else if (key == "omega-a") {
        ranker.omega_a = to_double(key, value);
    } else if (key == "tolerance") {
        ranker.tolerance = to_double(key, value);
    } else if (key == "max-iter") {
        ranker.max_iterations = to_u32(key, value);
    } else if (key == "normalization") {
        if (value == "causal") {
            normalization = NormalizationScope::causal;
        } else if (value == "all") {
            normalization = NormalizationScope::all;
        } else {
            bad_value(key, value);
        }
    } else if (key == "dsa-epsilon") {
        dsa_epsilon = value == "auto" ? std::nullopt : std::optional<double>(to_double(key, value));
    } else if (key == "top-frac") {
        top_frac = to_double(key, value);
    } else if (key == "category-frac") {
        category_frac = to_double(key, value);
    } else if (key == "zero-scope") {
        if (value == "history") {
            zero_scope = ZeroContributorScope::history;
        } else if (value == "window") {
            zero_scope = ZeroContributorScope::window;
        } else {
            bad_value(key, value);
        }
    } else if (key == "week-days") {
        week_days = to_int(key, value);
    } else if (key == "horizon") {
        horizon = to_int(key, value);
    } else if (key == "clusters") {
        clusters = to_u32(key, value);
    } else if (key == "fuzzifier") {
        fuzzifier = to_double(key, value);
    } else if (key == "fcm-tolerance") {
        fcm_tolerance = to_double(key, value);
    } else if (key == "fcm-max-iter") {
        fcm_max_iter = to_u32(key, value);
    } else if (key == "presence-frac") {
        presence_frac = to_double(key, value);
    } else if (key == "seed") {
        const auto v = to_int(key, value);
        if (v < 0) {
            bad_value(key, value);
        }
        seed = static_cast<std::uint64_t>(v);
    } else if (key == "jobs") {
        jobs = to_u32(key, value);
    } else if (key == "write-ingest") {
        write_ingest = to_bool(key, value);
    } else if (key == "write-snapshots") {
        write_snapshots = to_bool(key, value);
    } else if (key == "write-ranks") {
        write_ranks = to_bool(key, value);
    } else if (key == "algorithms") {
        algorithms.clear();
        if (value != "none") {
            for (const auto item : split_list(value)) {
                const auto a = parse_algorithm(item);
                if (!a) {
                    bad_value(key, item);
                }
                if (std::find(algorithms.begin(), algorithms.end(), *a) == algorithms.end()) {
                    algorithms.push_back(*a);
                }
            }
        }
    } else if (key == "evaluate") {
        evaluate = to_bool(key, value);
    } else if (key == "analyses") {
        analyses.clear();
        if (value == "all") {
            analyses.assign(kAnalyses.begin(), kAnalyses.end());
        } else if (value != "none") {
            for (const auto item : split_list(value)) {
                const auto a = parse_analysis(item);
                if (!a) {
                    bad_value(key, item);
                }
                if (std::find(analyses.begin(), analyses.end(), *a) == analyses.end()) {
                    analyses.push_back(*a);
                }
            }
        }
    } else {
        throw InvalidArgument("unknown config key '" + std::string(key) + "'");
    }
}

void RunConfig::validate() const {
    auto require = [](bool ok, std::string_view field, std::string_view what) {
        if (!ok) {
            throw InvalidArgument(std::string(field) + ": " + std::string(what));
        }
    };
    require(!input.empty(), "input", "an input event file is required");
    require(interval_days > 0, "interval-days", "must be positive");
    require(ranker.damping >= 0.0 && ranker.damping <= 1.0, "damping", "must lie in [0,1]");
    require(ranker.omega_f >= 0.0, "omega-f", "must be non-negative");
    require(ranker.omega_a >= 0.0, "omega-a", "must be non-negative");
    require(ranker.omega_f + ranker.omega_a > 0.0, "omega-f", "omega-f + omega-a must be positive");
    require(ranker.tolerance > 0.0, "tolerance", "must be positive");
    require(ranker.max_iterations > 0, "max-iter", "must be positive");
    require(!dsa_epsilon || *dsa_epsilon >= 0.0, "dsa-epsilon", "must be non-negative");
    require(top_frac > 0.0 && top_frac <= 1.0, "top-frac", "must lie in (0,1]");
    require(category_frac > 0.0 && category_frac <= 1.0, "category-frac", "must lie in (0,1]");
    require(week_days > 0, "week-days", "must be positive");
    require(horizon >= 0, "horizon", "must be non-negative");
    require(clusters >= 2, "clusters", "must be at least 2");
    require(fuzzifier > 1.0, "fuzzifier", "must be greater than 1");
    require(fcm_tolerance > 0.0, "fcm-tolerance", "must be positive");
    require(fcm_max_iter > 0, "fcm-max-iter", "must be positive");
    require(presence_frac >= 0.0 && presence_frac <= 1.0, "presence-frac", "must lie in [0,1]");
    require(jobs >= 1, "jobs", "must be at least 1");
    const bool te = std::find(algorithms.begin(), algorithms.end(), Algorithm::te_lr) != algorithms.end();
    require(!(te && mode == SnapshotMode::transient), "mode", "te-lr needs cumulative snapshots");
}

std::string RunConfig::canonical() const {
    std::ostringstream o;
    auto line = [&](std::string_view key, const auto &value) { o << key << " = " << value << '\n'; };
    line("input", input.generic_string());
    line("edge-policy", to_string(edge_policy));
    line("carry-prior-follows", carry_prior_follows ? "true" : "false");
    line("mode", mode ? std::string(to_string(*mode)) : std::string("auto"));
    line("interval-days", interval_days);
    line("start", start ? std::to_string(*start) : std::string("auto"));
    line("index", index ? std::to_string(*index) : std::string("all"));
    line("damping", csv::format_double(ranker.damping));
    line("omega-f", csv::format_double(ranker.omega_f));
    line("omega-a", csv::format_double(ranker.omega_a));
    line("tolerance", csv::format_double(ranker.tolerance));
    line("max-iter", ranker.max_iterations);
    line("normalization", scope_name(normalization));
    line("dsa-epsilon", dsa_epsilon ? csv::format_double(*dsa_epsilon) : std::string("auto"));
    line("top-frac", csv::format_double(top_frac));
    line("category-frac", csv::format_double(category_frac));
    line("zero-scope", scope_name(zero_scope));
    line("week-days", week_days);
    line("horizon", horizon);
    line("clusters", clusters);
    line("fuzzifier", csv::format_double(fuzzifier));
    line("fcm-tolerance", csv::format_double(fcm_tolerance));
    line("fcm-max-iter", fcm_max_iter);
    line("presence-frac", csv::format_double(presence_frac));
    line("seed", seed);
    line("write-ingest", write_ingest ? "true" : "false");
    line("write-snapshots", write_snapshots ? "true" : "false");
    line("write-ranks", write_ranks ? "true" : "false");
    line("algorithms", algorithm_list(algorithms));
    line("evaluate", evaluate ? "true" : "false");
    line("analyses", join_names(analyses));
    return o.str();
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string RunConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
    return buf;
}

void load_config_file(const fs::path &path, RunConfig &cfg) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open config file " + path.string());
    }
    std::size_t number = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++number;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(number, "expected key = value");
        }
        try {
            cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const InvalidArgument &e) {
            throw ParseError(number, e.what());
        }
    }
}

bool RunResult::ok() const {
    return std::all_of(stages.begin(), stages.end(), [](const StageStatus &s) { return s.status == "ok"; });
}

RunResult run_pipeline(const RunConfig &cfg) {
    cfg.validate();
    return Run(cfg).execute();
}

void write_error_manifest(const fs::path &out, std::string_view stage, std::string_view message) {
    fs::create_directories(out);
    json manifest{{"status", "failed"},
                  {"stages", json::array({{{"name", stage}, {"status", "failed"}, {"error", message}}})}};
    std::ofstream file(out / "manifest.json", std::ios::binary);
    file << manifest.dump(2) << '\n';
}

} // namespace lurk
