#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>

#include "subtbr/ctmdp.hpp"

namespace subtbr::fixtures {

/// init --rate--> goal, goal absorbing.
inline Ctmdp singleJump(double rate) {
    ModelDescription d;
    d.numStates = 2;
    d.initial = 0;
    d.goals = {1};
    d.transitions = {{0, "a", 1, rate}, {1, "a", 1, 1.0}};
    return Ctmdp(d);
}

/// Pure chain 0 -> 1 -> ... -> k of rate r with k the goal: hitting time ~ Erlang(k, r).
inline Ctmdp erlangChain(std::size_t k, double rate) {
    ModelDescription d;
    d.numStates = k + 1;
    d.initial = 0;
    d.goals = {static_cast<StateId>(k)};
    for (StateId s = 0; s < k; ++s) {
        d.transitions.push_back({s, "next", s + 1, rate});
    }
    d.transitions.push_back({static_cast<StateId>(k), "next", static_cast<StateId>(k), rate});
    return Ctmdp(d);
}

/// Random valid CTMDP with at most `maxStates` states and `maxActions` actions per state.
inline Ctmdp randomModel(std::uint64_t seed, std::size_t maxStates = 15, std::size_t maxActions = 3) {
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    std::uniform_real_distribution<double> rate(0.1, 5.0);
    ModelDescription d;
    d.numStates = pick(2, maxStates);
    d.initial = static_cast<StateId>(pick(0, d.numStates - 1));
    std::set<StateId> goals;
    auto const numGoals = pick(1, std::max<std::size_t>(1, d.numStates / 4));
    while (goals.size() < numGoals) {
        goals.insert(static_cast<StateId>(pick(0, d.numStates - 1)));
    }
    // Keep the initial state out of G most of the time so that the problems are not trivial.
    if (goals.contains(d.initial) && pick(0, 9) != 0) {
        goals.erase(d.initial);
        if (goals.empty()) {
            goals.insert(static_cast<StateId>((d.initial + 1) % d.numStates));
        }
    }
    d.goals.assign(goals.begin(), goals.end());
    for (StateId s = 0; s < d.numStates; ++s) {
        auto const actions = pick(1, maxActions);
        for (std::size_t a = 0; a < actions; ++a) {
            std::set<StateId> targets;
            auto const fanout = pick(1, std::min<std::size_t>(3, d.numStates));
            while (targets.size() < fanout) {
                targets.insert(static_cast<StateId>(pick(0, d.numStates - 1)));
            }
            for (auto t : targets) {
                d.transitions.push_back({s, "act" + std::to_string(a), t, rate(rng)});
            }
        }
    }
    return Ctmdp(d);
}

/// Random subset of the states containing the initial state.
inline std::set<StateId> randomSubset(Ctmdp const& model, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::set<StateId> subset{model.initial()};
    for (StateId s = 0; s < model.numStates(); ++s) {
        if (std::bernoulli_distribution(0.5)(rng)) {
            subset.insert(s);
        }
    }
    return subset;
}

}  // namespace subtbr::fixtures
