#include "lurkrank/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <unordered_set>

#include "lurkrank/error.hpp"

namespace lurk {

namespace {

enum class Role { producer, lurker, regular };

struct Post {
    std::size_t author;
    Day day;
    std::string id;
};

std::string user_name(std::size_t k) { return "u" + std::to_string(k); }

} // namespace

std::vector<EventLog::Row> generate_social_rows(const SyntheticParams &params, std::uint64_t seed) {
    if (params.users < 2) {
        throw InvalidArgument("synthetic log needs at least two users");
    }
    if (params.events == 0 || params.days <= 0) {
        throw InvalidArgument("synthetic log needs a positive event count and day span");
    }
    if (params.producer_fraction + params.lurker_fraction > 1.0 || params.follow_share + params.post_share > 1.0) {
        throw InvalidArgument("synthetic role and event shares must not exceed 1");
    }

    std::mt19937_64 rng(seed);
    const auto n = params.users;
    const auto producers = std::max<std::size_t>(1, static_cast<std::size_t>(params.producer_fraction * n));
    const auto lurkers = static_cast<std::size_t>(params.lurker_fraction * n);

    std::vector<Role> role(n, Role::regular);
    std::vector<Day> joined(n);
    std::uniform_int_distribution<Day> join_day(0, std::max<Day>(0, params.days / 2));
    for (std::size_t k = 0; k < n; ++k) {
        role[k] = k < producers ? Role::producer : (k < producers + lurkers ? Role::lurker : Role::regular);
        joined[k] = join_day(rng);
    }

    auto weights_for = [&](double producer, double lurker, double regular) {
        std::vector<double> w(n);
        for (std::size_t k = 0; k < n; ++k) {
            w[k] = role[k] == Role::producer ? producer : (role[k] == Role::lurker ? lurker : regular);
        }
        return std::discrete_distribution<std::size_t>(w.begin(), w.end());
    };
    auto follower_pick = weights_for(1.0, 4.0, 2.0);
    auto followee_pick = weights_for(8.0, 0.2, 1.0);
    auto author_pick = weights_for(10.0, 0.1, 2.0);
    auto consumer_pick = weights_for(1.0, 5.0, 2.0);

    auto day_after = [&](Day from) {
        return std::uniform_int_distribution<Day>(std::min(from, params.days - 1), params.days - 1)(rng);
    };

    const auto n_follow = static_cast<std::size_t>(params.follow_share * static_cast<double>(params.events));
    const auto n_post = std::max<std::size_t>(
        1, static_cast<std::size_t>(params.post_share * static_cast<double>(params.events)));

    std::vector<EventLog::Row> rows;
    rows.reserve(params.events);

    std::vector<std::vector<std::size_t>> followees(n);
    std::unordered_set<std::uint64_t> follow_pairs;
    for (std::size_t attempt = 0; follow_pairs.size() < n_follow && attempt < 20 * n_follow + 100; ++attempt) {
        const auto follower = follower_pick(rng);
        const auto followee = followee_pick(rng);
        if (follower == followee || !follow_pairs.insert(pair_key(static_cast<NodeId>(followee), static_cast<NodeId>(follower))).second) {
            continue;
        }
        followees[follower].push_back(followee);
        rows.push_back({user_name(follower), ActionKind::follow, user_name(followee), "",
                        day_after(std::max(joined[follower], joined[followee]))});
    }

    std::vector<Post> posts;
    std::vector<std::vector<std::size_t>> posts_by(n);
    while (posts.size() < n_post && rows.size() < params.events) {
        const auto author = author_pick(rng);
        Post p{author, day_after(joined[author]), "p" + std::to_string(posts.size())};
        rows.push_back({user_name(author), ActionKind::post, "", p.id, p.day});
        posts_by[author].push_back(posts.size());
        posts.push_back(std::move(p));
    }

    std::geometric_distribution<Day> delay(1.0 / (1.0 + params.mean_reaction_delay));
    std::discrete_distribution<int> kind_pick({0.4, 0.4, 0.2});
    constexpr ActionKind kKinds[] = {ActionKind::favorite, ActionKind::like, ActionKind::comment};
    std::uniform_int_distribution<std::size_t> any_post(0, posts.size() - 1);

    while (rows.size() < params.events) {
        const auto consumer = consumer_pick(rng);
        std::size_t post_index = any_post(rng);
        const auto &mine = followees[consumer];
        if (!mine.empty()) {
            const auto followee = mine[std::uniform_int_distribution<std::size_t>(0, mine.size() - 1)(rng)];
            const auto &theirs = posts_by[followee];
            if (!theirs.empty()) {
                post_index = theirs[std::uniform_int_distribution<std::size_t>(0, theirs.size() - 1)(rng)];
            }
        }
        const auto &post = posts[post_index];
        if (post.author == consumer) {
            continue;
        }
        const Day day = std::min(params.days - 1, post.day + delay(rng));
        rows.push_back({user_name(consumer), kKinds[kind_pick(rng)], user_name(post.author), post.id, day});
    }
    return rows;
}

EventLog generate_social_log(const SyntheticParams &params, std::uint64_t seed) {
    return EventLog::from_rows(generate_social_rows(params, seed));
}

} // namespace lurk
