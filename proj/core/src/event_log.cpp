#include "lurkrank/event_log.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "lurkrank/csv.hpp"
#include "lurkrank/error.hpp"

namespace lurk {

namespace {

constexpr std::array<std::string_view, kActionKindCount> kKindNames = {
    "post", "favorite", "like", "comment", "follow"};

// Returns an error message, or an empty string if the row is well-formed.
std::string validate_row(const EventLog::Row &row) {
    if (row.actor.empty()) {
        return "missing actor";
    }
    if (row.timestamp < 0) {
        return "negative timestamp";
    }
    if (row.kind == ActionKind::post && !row.target_node.empty()) {
        return "post must not have a target_node";
    }
    if (row.kind != ActionKind::post && row.target_node.empty()) {
        return std::string(to_string(row.kind)) + " requires a target_node";
    }
    return {};
}

} // namespace

std::string_view to_string(ActionKind kind) {
    return kKindNames.at(static_cast<std::size_t>(kind));
}

std::optional<ActionKind> parse_action_kind(std::string_view text) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == text) {
            return static_cast<ActionKind>(i);
        }
    }
    return std::nullopt;
}

std::uint32_t IdTable::intern(std::string_view name) {
    auto it = index_.find(std::string(name));
    if (it != index_.end()) {
        return it->second;
    }
    const auto id = static_cast<std::uint32_t>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
}

std::optional<std::uint32_t> IdTable::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

EventLog EventLog::from_rows(std::vector<Row> rows) {
    if (rows.empty()) {
        throw InvalidArgument("event source is empty");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (auto msg = validate_row(rows[i]); !msg.empty()) {
            throw InvalidArgument("row " + std::to_string(i) + ": " + msg);
        }
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row &a, const Row &b) { return a.timestamp < b.timestamp; });

    EventLog log;
    log.events_.reserve(rows.size());
    for (const auto &row : rows) {
        ActionEvent ev;
        ev.actor = log.nodes_.intern(row.actor);
        ev.kind = row.kind;
        if (!row.target_node.empty()) {
            ev.target_node = log.nodes_.intern(row.target_node);
        }
        if (!row.target_post.empty()) {
            ev.target_post = log.posts_.intern(row.target_post);
        }
        ev.timestamp = row.timestamp;
        log.events_.push_back(ev);
    }
    log.build_indices();
    return log;
}

void EventLog::build_indices() {
    t_min_ = events_.front().timestamp;
    t_max_ = events_.back().timestamp;

    const auto n = nodes_.size();
    std::vector<std::uint32_t> counts(n + 1, 0);
    for (const auto &ev : events_) {
        ++counts[ev.actor + 1];
        ++kind_counts_[static_cast<std::size_t>(ev.kind)];
    }
    for (std::size_t i = 1; i <= n; ++i) {
        counts[i] += counts[i - 1];
    }
    action_offsets_ = counts;
    action_index_.resize(events_.size());
    post_info_.assign(posts_.size(), std::nullopt);
    post_times_by_author_.assign(n, {});
    first_interaction_.assign(n, std::nullopt);

    for (std::uint32_t i = 0; i < events_.size(); ++i) {
        const auto &ev = events_[i];
        action_index_[counts[ev.actor]++] = i;

        if (ev.kind == ActionKind::post) {
            post_times_by_author_[ev.actor].push_back(ev.timestamp);
            if (ev.target_post && !post_info_[*ev.target_post]) {
                post_info_[*ev.target_post] = PostInfo{ev.actor, ev.timestamp};
            }
            continue;
        }

        for (const NodeId node : {ev.actor, *ev.target_node}) {
            if (!first_interaction_[node]) {
                first_interaction_[node] = ev.timestamp;
            }
        }
        if (is_consumption(ev.kind)) {
            auto &bucket = consumption_index_[pair_key(*ev.target_node, ev.actor)];
            if (bucket.empty()) {
                consumption_pair_list_.emplace_back(*ev.target_node, ev.actor);
            }
            bucket.push_back(i);
        } else if (ev.kind == ActionKind::follow) {
            follow_index_.try_emplace(pair_key(*ev.target_node, ev.actor), ev.timestamp);
        }
    }
    std::sort(consumption_pair_list_.begin(), consumption_pair_list_.end());
}

NodeId EventLog::node_id(std::string_view name) const {
    if (auto id = nodes_.find(name)) {
        return *id;
    }
    throw UnknownNodeError("unknown node '" + std::string(name) + "'");
}

std::span<const std::uint32_t> EventLog::actions_of(NodeId actor) const {
    if (!has_node(actor)) {
        throw UnknownNodeError("unknown node id " + std::to_string(actor));
    }
    const auto begin = action_offsets_[actor];
    const auto end = action_offsets_[actor + 1];
    return std::span<const std::uint32_t>(action_index_).subspan(begin, end - begin);
}

std::span<const std::uint32_t> EventLog::consumptions(NodeId producer, NodeId consumer) const {
    auto it = consumption_index_.find(pair_key(producer, consumer));
    if (it == consumption_index_.end()) {
        return {};
    }
    return it->second;
}

std::optional<PostInfo> EventLog::post_info(PostId post) const {
    if (post >= post_info_.size()) {
        return std::nullopt;
    }
    return post_info_[post];
}

std::optional<Day> EventLog::latest_post_at_or_before(NodeId author, Day t) const {
    if (!has_node(author)) {
        return std::nullopt;
    }
    const auto &times = post_times_by_author_[author];
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) {
        return std::nullopt;
    }
    return *std::prev(it);
}

std::optional<Day> EventLog::follow_time(NodeId followee, NodeId follower) const {
    auto it = follow_index_.find(pair_key(followee, follower));
    if (it == follow_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<Day> EventLog::first_interaction(NodeId node) const {
    if (!has_node(node)) {
        throw UnknownNodeError("unknown node id " + std::to_string(node));
    }
    return first_interaction_[node];
}

std::pair<std::uint32_t, std::uint32_t> EventLog::range(Day lo, Day hi) const {
    auto by_time = [](const ActionEvent &ev, Day t) { return ev.timestamp < t; };
    auto first = std::lower_bound(events_.begin(), events_.end(), lo, by_time);
    auto last = std::upper_bound(events_.begin(), events_.end(), hi,
                                 [](Day t, const ActionEvent &ev) { return t < ev.timestamp; });
    if (last < first) {
        last = first;
    }
    return {static_cast<std::uint32_t>(first - events_.begin()),
            static_cast<std::uint32_t>(last - events_.begin())};
}

EventLog ingest_events(std::istream &source, const CsvFormat &format) {
    std::vector<EventLog::Row> rows;
    std::string line;
    std::size_t line_no = 0;

    if (format.has_header) {
        while (std::getline(source, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.empty()) {
                continue;
            }
            std::string expected(kEventCsvHeader);
            if (format.delimiter != ',') {
                std::replace(expected.begin(), expected.end(), ',', format.delimiter);
            }
            if (line != expected) {
                throw ParseError(line_no, "expected header '" + expected + "'");
            }
            break;
        }
    }

    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        auto fields = csv::split_record(line, format.delimiter);
        if (!fields) {
            throw ParseError(line_no, "unterminated quoted field");
        }
        if (fields->size() != 5) {
            throw ParseError(line_no, "expected 5 fields, found " + std::to_string(fields->size()));
        }
        auto kind = parse_action_kind((*fields)[1]);
        if (!kind) {
            throw ParseError(line_no, "unknown kind '" + (*fields)[1] + "'");
        }
        auto ts = csv::parse_int((*fields)[4]);
        if (!ts) {
            throw ParseError(line_no, "timestamp is not an integer: '" + (*fields)[4] + "'");
        }
        EventLog::Row row{std::move((*fields)[0]), *kind, std::move((*fields)[2]),
                          std::move((*fields)[3]), *ts};
        if (auto msg = validate_row(row); !msg.empty()) {
            throw ParseError(line_no, msg);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw InvalidArgument("event source contains no events");
    }
    return EventLog::from_rows(std::move(rows));
}

EventLog load_events(const std::filesystem::path &path, const CsvFormat &format) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open '" + path.string() + "'");
    }
    return ingest_events(in, format);
}

void write_events(std::ostream &out, const EventLog &log) {
    out << kEventCsvHeader << '\n';
    for (const auto &ev : log.events()) {
        out << csv::escape(log.nodes().name(ev.actor)) << ',' << to_string(ev.kind) << ',';
        if (ev.target_node) {
            out << csv::escape(log.nodes().name(*ev.target_node));
        }
        out << ',';
        if (ev.target_post) {
            out << csv::escape(log.posts().name(*ev.target_post));
        }
        out << ',' << ev.timestamp << '\n';
    }
}

void write_node_table(std::ostream &out, const EventLog &log) {
    out << "id,name\n";
    for (std::size_t i = 0; i < log.num_nodes(); ++i) {
        out << i << ',' << csv::escape(log.nodes().name(static_cast<NodeId>(i))) << '\n';
    }
}

} // namespace lurk
