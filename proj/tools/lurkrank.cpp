#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "lurkrank/error.hpp"
#include "lurkrank/event_log.hpp"
#include "lurkrank/pipeline.hpp"
#include "lurkrank/synthetic.hpp"

namespace {

using lurk::RunConfig;

std::map<std::string, std::string> default_values() {
    std::map<std::string, std::string> out;
    std::istringstream lines(RunConfig{}.canonical());
    for (std::string line; std::getline(lines, line);) {
        const auto eq = line.find(" = ");
        out[line.substr(0, eq)] = line.substr(eq + 3);
    }
    out["out"] = RunConfig{}.out.string();
    out["jobs"] = "1";
    return out;
}

/// Options a subcommand exposes; each maps onto a RunConfig key.
struct Bindings {
    std::vector<std::pair<std::string, CLI::Option *>> options;
    std::map<std::string, std::string> values;
    std::string config_file;

    void add(CLI::App *app, const std::string &key, const std::string &help) {
        static const auto defaults = default_values();
        auto *opt = app->add_option("--" + key, values[key], help);
        if (const auto it = defaults.find(key); it != defaults.end() && !it->second.empty()) {
            opt->default_str(it->second);
        }
        options.emplace_back(key, opt);
    }

    /// Config file first, then explicit flags on top.
    void apply(RunConfig &cfg) const {
        if (!config_file.empty()) {
            lurk::load_config_file(config_file, cfg);
        }
        for (const auto &[key, opt] : options) {
            if (opt->count() > 0) {
                cfg.set(key, values.at(key));
            }
        }
    }
};

void add_common(CLI::App *app, Bindings &b) {
    app->add_option("--config", b.config_file, "Flat key = value config file; flags override it");
    b.add(app, "input", "Event CSV (actor,kind,target_node,target_post,timestamp)");
    b.add(app, "out", "Output directory");
    b.add(app, "seed", "Seed for every stochastic step");
    b.add(app, "jobs", "Worker threads for per-snapshot work");
}

void add_snapshot_flags(CLI::App *app, Bindings &b) {
    b.add(app, "mode", "Snapshot mode: transient, cumulative or auto");
    b.add(app, "interval-days", "Sub-interval length in days");
    b.add(app, "start", "First day of the timeline, or auto for the first event");
    b.add(app, "index", "Only this sub-interval index, or all");
    b.add(app, "edge-policy", "Edges from: all, interaction or followship events");
    b.add(app, "carry-prior-follows", "Transient snapshots keep follow edges formed earlier");
}

void add_ranker_flags(CLI::App *app, Bindings &b) {
    b.add(app, "damping", "Damping factor d");
    b.add(app, "omega-f", "Freshness weight in node and edge weights");
    b.add(app, "omega-a", "Activity weight in node and edge weights");
    b.add(app, "tolerance", "Convergence threshold on the L1 score change");
    b.add(app, "max-iter", "Iteration cap");
    b.add(app, "normalization", "Cumulative normalization scope: causal or all");
    b.add(app, "dsa-epsilon", "DSA segmentation threshold, or auto");
}

void add_analysis_flags(CLI::App *app, Bindings &b) {
    b.add(app, "category-frac", "Fraction p for top lurkers and bottom active users");
    b.add(app, "zero-scope", "Zero-contributor scope: history or window");
    b.add(app, "week-days", "Week length for preferential attachment");
    b.add(app, "horizon", "Responsiveness ECDF horizon in days");
    b.add(app, "clusters", "Fuzzy c-means cluster count");
    b.add(app, "fuzzifier", "Fuzzy c-means fuzzifier m");
    b.add(app, "fcm-tolerance", "Fuzzy c-means objective tolerance");
    b.add(app, "fcm-max-iter", "Fuzzy c-means iteration cap");
    b.add(app, "presence-frac", "Share of later snapshots a clustered user must appear in");
}

int report(const lurk::RunResult &result, const RunConfig &cfg) {
    for (const auto &s : result.stages) {
        std::cout << s.name << ": " << s.status;
        if (!s.error.empty()) {
            std::cout << " (" << s.error << ')';
        }
        std::cout << '\n';
    }
    std::cout << "outputs in " << cfg.out.string() << " (config " << cfg.hash() << ")\n";
    return result.ok() ? 0 : 1;
}

int synthesize(const std::string &out, const lurk::SyntheticParams &params, std::uint64_t seed) {
    const auto log = lurk::generate_social_log(params, seed);
    std::ofstream file(out, std::ios::binary);
    if (!file) {
        std::cerr << "error: cannot write " << out << '\n';
        return 1;
    }
    lurk::write_events(file, log);
    std::cout << "wrote " << log.size() << " events by " << log.num_nodes() << " users to " << out << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Rank lurkers in timestamped social event logs"};
    app.require_subcommand(1);

    Bindings ingest_b;
    auto *ingest = app.add_subcommand("ingest", "Validate an event log and write its normalized form");
    add_common(ingest, ingest_b);

    Bindings snapshot_b;
    auto *snapshot = app.add_subcommand("snapshot", "Write the edge list of every snapshot");
    add_common(snapshot, snapshot_b);
    add_snapshot_flags(snapshot, snapshot_b);

    Bindings rank_b;
    std::string algo;
    auto *rank = app.add_subcommand("rank", "Rank every snapshot with one algorithm");
    add_common(rank, rank_b);
    add_snapshot_flags(rank, rank_b);
    add_ranker_flags(rank, rank_b);
    rank->add_option("--algo", algo, "lr, ts-lr, te-lr or dd")
        ->required()
        ->check(CLI::IsMember({"lr", "ts-lr", "te-lr", "dd"}));

    Bindings eval_b;
    auto *eval = app.add_subcommand("eval", "Compare rankings against the data-driven reference");
    add_common(eval, eval_b);
    add_snapshot_flags(eval, eval_b);
    add_ranker_flags(eval, eval_b);
    eval_b.add(eval, "algorithms", "Algorithms to evaluate");
    eval_b.add(eval, "top-frac", "Top-k fraction for Fagin's intersection");

    Bindings analyze_b;
    auto *analyze = app.add_subcommand("analyze", "Run one behavioral analysis");
    analyze->require_subcommand(1);
    std::string analysis;
    for (const auto *name : {"overlap", "newcomers", "prefattach", "responsiveness", "cluster"}) {
        auto *sub = analyze->add_subcommand(name);
        sub->fallthrough();
        sub->callback([&analysis, name] { analysis = name; });
    }
    add_common(analyze, analyze_b);
    add_snapshot_flags(analyze, analyze_b);
    add_ranker_flags(analyze, analyze_b);
    add_analysis_flags(analyze, analyze_b);

    Bindings run_b;
    auto *run = app.add_subcommand("run", "Full pipeline: ingest, snapshots, ranks, evaluation, analyses");
    add_common(run, run_b);
    add_snapshot_flags(run, run_b);
    add_ranker_flags(run, run_b);
    add_analysis_flags(run, run_b);
    run_b.add(run, "algorithms", "Ranking algorithms");
    run_b.add(run, "top-frac", "Top-k fraction for Fagin's intersection");
    run_b.add(run, "analyses", "Analyses to run, all or none");
    run_b.add(run, "evaluate", "Write the evaluation report");

    std::string synth_out = "events.csv";
    lurk::SyntheticParams params;
    std::uint64_t synth_seed = 42;
    auto *synth = app.add_subcommand("synth", "Generate a synthetic social event log");
    synth->add_option("--out", synth_out, "Output CSV")->capture_default_str();
    synth->add_option("--events", params.events, "Number of events")->capture_default_str();
    synth->add_option("--users", params.users, "Number of users")->capture_default_str();
    synth->add_option("--days", params.days, "Timeline length in days")->capture_default_str();
    synth->add_option("--seed", synth_seed, "Random seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (synth->parsed()) {
        try {
            return synthesize(synth_out, params, synth_seed);
        } catch (const std::exception &e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        }
    }

    RunConfig cfg;
    const Bindings *bindings = nullptr;
    if (ingest->parsed()) {
        bindings = &ingest_b;
        cfg.set("algorithms", "none");
        cfg.evaluate = false;
        cfg.write_snapshots = false;
    } else if (snapshot->parsed()) {
        bindings = &snapshot_b;
        cfg.set("algorithms", "none");
        cfg.evaluate = false;
        cfg.write_ingest = false;
    } else if (rank->parsed()) {
        bindings = &rank_b;
        cfg.evaluate = false;
        cfg.write_ingest = false;
        cfg.write_snapshots = false;
    } else if (eval->parsed()) {
        bindings = &eval_b;
        cfg.write_ingest = false;
        cfg.write_snapshots = false;
        cfg.write_ranks = false;
    } else if (analyze->parsed()) {
        bindings = &analyze_b;
        cfg.set("algorithms", "none");
        cfg.evaluate = false;
        cfg.write_ingest = false;
        cfg.write_snapshots = false;
    } else {
        bindings = &run_b;
    }

    try {
        bindings->apply(cfg);
        if (rank->parsed()) {
            cfg.set("algorithms", algo);
        }
        if (analyze->parsed()) {
            cfg.set("analyses", analysis);
        }
        cfg.validate();
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        try {
            lurk::write_error_manifest(cfg.out, "config", e.what());
        } catch (const std::exception &) {
        }
        return 2;
    }

    try {
        return report(lurk::run_pipeline(cfg), cfg);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
