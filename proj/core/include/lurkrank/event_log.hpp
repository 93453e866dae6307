#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lurk {

/// Time is measured in whole days since the start of the log's epoch.
using Day = std::int64_t;
using NodeId = std::uint32_t;
using PostId = std::uint32_t;

enum class ActionKind : std::uint8_t { post, favorite, like, comment, follow };

inline constexpr std::size_t kActionKindCount = 5;

std::string_view to_string(ActionKind kind);
std::optional<ActionKind> parse_action_kind(std::string_view text);

/// favorite, like and comment: v reacting to content produced by u.
constexpr bool is_consumption(ActionKind kind) {
    return kind == ActionKind::favorite || kind == ActionKind::like ||
           kind == ActionKind::comment;
}

/// Small bitset over ActionKind.
class KindSet {
public:
    constexpr KindSet() = default;
    constexpr KindSet(std::initializer_list<ActionKind> kinds) {
        for (const auto k : kinds) {
            bits_ |= bit(k);
        }
    }

    constexpr bool contains(ActionKind kind) const { return (bits_ & bit(kind)) != 0; }
    constexpr KindSet with(ActionKind kind) const {
        KindSet out = *this;
        out.bits_ |= bit(kind);
        return out;
    }
    constexpr KindSet without(ActionKind kind) const {
        KindSet out = *this;
        out.bits_ &= static_cast<std::uint8_t>(~bit(kind));
        return out;
    }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool operator==(const KindSet &) const = default;

    static constexpr KindSet consumption() {
        return {ActionKind::favorite, ActionKind::like, ActionKind::comment};
    }

private:
    static constexpr std::uint8_t bit(ActionKind kind) {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(kind));
    }
    std::uint8_t bits_ = 0;
};

/// Bidirectional map between opaque string ids and dense integer ids.
class IdTable {
public:
    std::uint32_t intern(std::string_view name);
    std::optional<std::uint32_t> find(std::string_view name) const;
    const std::string &name(std::uint32_t id) const { return names_.at(id); }
    std::size_t size() const noexcept { return names_.size(); }
    std::span<const std::string> names() const noexcept { return names_; }

    bool operator==(const IdTable &other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

/// One timestamped action. For `post`, `target_post` is the id of the
/// created post; for consumption kinds it is the post being consumed.
struct ActionEvent {
    NodeId actor = 0;
    ActionKind kind = ActionKind::post;
    std::optional<NodeId> target_node;
    std::optional<PostId> target_post;
    Day timestamp = 0;

    bool operator==(const ActionEvent &) const = default;
};

struct PostInfo {
    NodeId author;
    Day timestamp;
};

/// Immutable, time-ordered log of actions plus lookup indices.
///
/// Events are sorted by timestamp with ties kept in insertion order. Node and
/// post ids are assigned in order of first appearance in that sorted order, so
/// serializing and re-ingesting a log reproduces it exactly.
class EventLog {
public:
    /// Raw row with string ids, as read from a source.
    struct Row {
        std::string actor;
        ActionKind kind = ActionKind::post;
        std::string target_node; // empty when absent
        std::string target_post; // empty when absent
        Day timestamp = 0;
    };

    /// Builds a log from unsorted rows. Throws InvalidArgument on empty input.
    static EventLog from_rows(std::vector<Row> rows);

    std::span<const ActionEvent> events() const noexcept { return events_; }
    const ActionEvent &event(std::uint32_t index) const { return events_.at(index); }
    std::size_t size() const noexcept { return events_.size(); }

    const IdTable &nodes() const noexcept { return nodes_; }
    const IdTable &posts() const noexcept { return posts_; }
    std::size_t num_nodes() const noexcept { return nodes_.size(); }

    Day t_min() const noexcept { return t_min_; }
    Day t_max() const noexcept { return t_max_; }

    std::size_t count(ActionKind kind) const { return kind_counts_[static_cast<std::size_t>(kind)]; }

    /// Throws UnknownNodeError.
    NodeId node_id(std::string_view name) const;
    bool has_node(NodeId node) const noexcept { return node < nodes_.size(); }

    /// Indices of events performed by `actor`, in time order.
    std::span<const std::uint32_t> actions_of(NodeId actor) const;

    /// Consumption events (any consumption kind) by `consumer` targeting
    /// `producer`, in time order.
    std::span<const std::uint32_t> consumptions(NodeId producer, NodeId consumer) const;

    /// All (producer, consumer) pairs that have at least one consumption event.
    std::span<const std::pair<NodeId, NodeId>> consumption_pairs() const noexcept {
        return consumption_pair_list_;
    }

    std::optional<PostInfo> post_info(PostId post) const;

    /// Latest post by `author` with timestamp <= t.
    std::optional<Day> latest_post_at_or_before(NodeId author, Day t) const;

    /// Earliest follow event in which `follower` follows `followee`.
    std::optional<Day> follow_time(NodeId followee, NodeId follower) const;

    /// Earliest non-post event in which the node is actor or target.
    std::optional<Day> first_interaction(NodeId node) const;

    /// Index range [first, last) of events with lo <= timestamp <= hi.
    std::pair<std::uint32_t, std::uint32_t> range(Day lo, Day hi) const;

    bool operator==(const EventLog &other) const {
        return events_ == other.events_ && nodes_ == other.nodes_ && posts_ == other.posts_;
    }

private:
    EventLog() = default;
    void build_indices();

    std::vector<ActionEvent> events_;
    IdTable nodes_;
    IdTable posts_;
    Day t_min_ = 0;
    Day t_max_ = 0;
    std::array<std::size_t, kActionKindCount> kind_counts_{};

    std::vector<std::uint32_t> action_offsets_;
    std::vector<std::uint32_t> action_index_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> consumption_index_;
    std::vector<std::pair<NodeId, NodeId>> consumption_pair_list_;
    std::unordered_map<std::uint64_t, Day> follow_index_;
    std::vector<std::optional<PostInfo>> post_info_;
    std::vector<std::vector<Day>> post_times_by_author_;
    std::vector<std::optional<Day>> first_interaction_;
};

inline std::uint64_t pair_key(NodeId a, NodeId b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

/// Column layout of the event CSV.
struct CsvFormat {
    char delimiter = ',';
    bool has_header = true;
};

inline constexpr std::string_view kEventCsvHeader = "actor,kind,target_node,target_post,timestamp";

/// Reads the event CSV. Throws ParseError naming the offending line, or
/// InvalidArgument when the source holds no events.
EventLog ingest_events(std::istream &source, const CsvFormat &format = {});
EventLog load_events(const std::filesystem::path &path, const CsvFormat &format = {});

/// Writes the log in the same CSV layout `ingest_events` accepts.
void write_events(std::ostream &out, const EventLog &log);

/// `id,name` table of dense node ids.
void write_node_table(std::ostream &out, const EventLog &log);

} // namespace lurk
