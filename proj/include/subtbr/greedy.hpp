#pragma once

#include <cstdint>
#include <vector>

#include "subtbr/ctmdp.hpp"
#include "subtbr/solver.hpp"

namespace subtbr {

/// Model in which every state of `removed` keeps only self-loops (one per enabled action, rate
/// maxExitRate()). With asGoal the removed states become goals, otherwise they stop being goals.
Ctmdp removeStates(Ctmdp const& model, std::vector<char> const& removed, bool asGoal);

struct RemovalGap {
    double lower;
    double upper;
    double gap() const {
        return upper - lower;
    }
};

/// Raw discretized values at the initial state of both removal models.
RemovalGap removalGap(Ctmdp const& model, std::vector<char> const& removed, double horizon, double solverEpsilon,
                      std::uint64_t stepCap = kDefaultStepCap);

/// Impact of a single state: value with s made a goal minus value with s made a sink.
double stateScore(Ctmdp const& model, double horizon, StateId s, double solverEpsilon, std::uint64_t stepCap = kDefaultStepCap);

/// Scores of every state (index = state id; the initial state gets 0). Computed in one
/// discretization pass over the disjoint union of all removal models.
std::vector<double> allStateScores(Ctmdp const& model, double horizon, double solverEpsilon, std::uint64_t stepCap = kDefaultStepCap);

struct GreedyResult {
    /// Candidates in removal order with their scores.
    std::vector<StateId> order;
    std::vector<double> scores;
    std::vector<StateId> removed;
    std::vector<StateId> kept;
    double finalGap = 0.0;
    /// Cumulative gap after each accepted removal.
    std::vector<double> gapLog;
};

/// Removes states in ascending score order while the cumulative gap stays within `gapBudget`.
GreedyResult greedyMinSubset(Ctmdp const& model, double horizon, double gapBudget, double solverEpsilon,
                             std::uint64_t stepCap = kDefaultStepCap);

}  // namespace subtbr
