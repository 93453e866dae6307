#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lurkrank/categories.hpp"
#include "lurkrank/evaluation.hpp"
#include "lurkrank/rankers.hpp"
#include "lurkrank/snapshot.hpp"
#include "lurkrank/temporal_features.hpp"

namespace lurk {

enum class Analysis : std::uint8_t { overlap, newcomers, prefattach, responsiveness, cluster };

std::string_view to_string(Analysis analysis);
std::optional<Analysis> parse_analysis(std::string_view text);

/// Everything a run needs. Keys accepted by `set` match the long CLI flags.
struct RunConfig {
    std::filesystem::path input;
    std::filesystem::path out = "run";

    EdgePolicy edge_policy = EdgePolicy::all;
    bool carry_prior_follows = false;
    /// Unset: LR, Ts-LR and DD on transient snapshots, Te-LR on cumulative ones.
    std::optional<SnapshotMode> mode;
    Day interval_days = 28;
    /// First day of the timeline; the log's first day when unset.
    std::optional<Day> start;
    /// Restrict the run to one sub-interval index.
    std::optional<std::uint32_t> index;

    RankerConfig ranker;
    NormalizationScope normalization = NormalizationScope::causal;
    std::optional<double> dsa_epsilon;

    double top_frac = 0.25;
    double category_frac = 0.25;
    ZeroContributorScope zero_scope = ZeroContributorScope::history;
    Day week_days = 7;
    Day horizon = 90;
    std::uint32_t clusters = 4;
    double fuzzifier = 1.25;
    double fcm_tolerance = 1e-9;
    std::uint32_t fcm_max_iter = 500;
    double presence_frac = 0.5;

    std::uint64_t seed = 42;
    std::uint32_t jobs = 1;

    // Stage selection.
    bool write_ingest = true;
    bool write_snapshots = true;
    bool write_ranks = true;
    std::vector<Algorithm> algorithms{Algorithm::lr, Algorithm::ts_lr, Algorithm::te_lr};
    bool evaluate = true;
    std::vector<Analysis> analyses;

    /// Parses `value` into the field named `key`. Throws InvalidArgument
    /// naming the key on an unknown key or malformed value.
    void set(std::string_view key, std::string_view value);

    /// Throws InvalidArgument naming the first out-of-range field.
    void validate() const;

    /// `key = value` lines for every output-affecting field, in a fixed order.
    std::string canonical() const;
    /// 16 hex digits of the FNV-1a hash of `canonical()`.
    std::string hash() const;
};

/// Reads `key = value` lines into `cfg`; blank lines and `#` comments are
/// skipped. Throws ParseError with the line number.
void load_config_file(const std::filesystem::path &path, RunConfig &cfg);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

struct StageStatus {
    std::string name;
    /// "ok", "failed" or "skipped".
    std::string status;
    std::string error;
};

struct RunResult {
    std::vector<StageStatus> stages;
    bool ok() const;
};

/// Runs every selected stage and writes reports plus `manifest.json` under
/// cfg.out. A failing stage is recorded and the stages depending on it are
/// skipped; completed outputs stay on disk.
RunResult run_pipeline(const RunConfig &cfg);

/// Manifest for a run that could not start, e.g. on an invalid config.
void write_error_manifest(const std::filesystem::path &out, std::string_view stage, std::string_view message);

} // namespace lurk
