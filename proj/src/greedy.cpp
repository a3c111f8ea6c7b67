#include "subtbr/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace subtbr {

namespace {

ModelDescription removalDescription(Ctmdp const& model, std::vector<char> const& removed, bool asGoal) {
    auto d = model.describe();
    auto const rate = model.maxExitRate();
    std::vector<TransitionRecord> transitions;
    transitions.reserve(d.transitions.size());
    for (auto& t : d.transitions) {
        if (!removed[t.source]) {
            transitions.push_back(std::move(t));
        }
    }
    d.goals.clear();
    for (StateId s = 0; s < model.numStates(); ++s) {
        if (removed[s]) {
            for (auto c = model.choiceBegin(s); c < model.choiceEnd(s); ++c) {
                transitions.push_back({s, model.choiceLabel(c), s, rate});
            }
            if (asGoal) {
                d.goals.push_back(s);
            }
        } else if (model.isGoal(s)) {
            d.goals.push_back(s);
        }
    }
    d.transitions = std::move(transitions);
    return d;
}

/// Copy of `d` restricted to the states reachable from its initial state, with ids shifted
/// by `offset` and appended to `out`. Returns the shifted initial id.
StateId appendReachable(ModelDescription const& d, ModelDescription& out) {
    std::vector<std::vector<std::size_t>> outgoing(d.numStates);
    for (std::size_t i = 0; i < d.transitions.size(); ++i) {
        outgoing[d.transitions[i].source].push_back(i);
    }
    constexpr auto kNone = std::numeric_limits<StateId>::max();
    std::vector<StateId> index(d.numStates, kNone);
    std::vector<StateId> order{d.initial};
    index[d.initial] = 0;
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (auto i : outgoing[order[head]]) {
            auto const t = d.transitions[i].target;
            if (index[t] == kNone) {
                index[t] = static_cast<StateId>(order.size());
                order.push_back(t);
            }
        }
    }
    auto const offset = static_cast<StateId>(out.numStates);
    out.numStates += order.size();
    for (StateId g : d.goals) {
        if (index[g] != kNone) {
            out.goals.push_back(offset + index[g]);
        }
    }
    for (auto s : order) {
        for (auto i : outgoing[s]) {
            auto const& t = d.transitions[i];
            out.transitions.push_back({offset + index[t.source], t.action, offset + index[t.target], t.rate});
        }
    }
    return offset;
}

/// Quotient under labelled strong bisimulation: states with the same goal flag and, per action
/// label, the same rates into each class are merged. Returns the quotient and the class of
/// every state. Goal states all collapse, since their value is 1 throughout.
std::pair<ModelDescription, std::vector<StateId>> lumpIdentical(Ctmdp const& model) {
    using Branch = std::vector<std::pair<StateId, double>>;
    using Signature = std::vector<std::pair<std::string, Branch>>;
    auto const n = model.numStates();
    std::vector<StateId> cls(n);
    for (StateId s = 0; s < n; ++s) {
        cls[s] = model.isGoal(s) ? 0 : 1;
    }
    std::size_t classes = 0;
    while (true) {
        std::map<std::pair<StateId, Signature>, StateId> ids;
        std::vector<StateId> next(n);
        for (StateId s = 0; s < n; ++s) {
            Signature sig;
            if (!model.isGoal(s)) {
                for (auto c = model.choiceBegin(s); c < model.choiceEnd(s); ++c) {
                    std::map<StateId, double> into;
                    auto const targets = model.choiceTargets(c);
                    auto const rates = model.choiceRates(c);
                    for (std::size_t k = 0; k < targets.size(); ++k) {
                        into[cls[targets[k]]] += rates[k];
                    }
                    sig.emplace_back(model.choiceLabel(c), Branch(into.begin(), into.end()));
                }
            }
            auto const [it, inserted] = ids.try_emplace({cls[s], std::move(sig)}, static_cast<StateId>(ids.size()));
            next[s] = it->second;
        }
        cls = std::move(next);
        if (ids.size() == classes) {
            break;
        }
        classes = ids.size();
    }

    ModelDescription d;
    d.numStates = classes;
    d.initial = cls[model.initial()];
    std::vector<char> done(classes, 0);
    for (StateId s = 0; s < n; ++s) {
        auto const q = cls[s];
        if (done[q]) {
            continue;
        }
        done[q] = 1;
        if (model.isGoal(s)) {
            d.goals.push_back(q);
        }
        for (auto c = model.choiceBegin(s); c < model.choiceEnd(s); ++c) {
            std::map<StateId, double> into;
            auto const targets = model.choiceTargets(c);
            auto const rates = model.choiceRates(c);
            for (std::size_t k = 0; k < targets.size(); ++k) {
                into[cls[targets[k]]] += rates[k];
            }
            for (auto const& [target, rate] : into) {
                d.transitions.push_back({q, model.choiceLabel(c), target, rate});
            }
        }
    }
    std::sort(d.goals.begin(), d.goals.end());
    return {std::move(d), std::move(cls)};
}

void checkSolverInputs(double horizon, double solverEpsilon) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("time bound must be a non-negative finite number");
    }
    if (!(solverEpsilon > 0.0 && solverEpsilon < 1.0)) {
        throw std::invalid_argument("solver precision must lie in (0,1)");
    }
}

}  // namespace

Ctmdp removeStates(Ctmdp const& model, std::vector<char> const& removed, bool asGoal) {
    if (removed.size() != model.numStates()) {
        throw std::invalid_argument("removal mask size does not match the model");
    }
    return Ctmdp(removalDescription(model, removed, asGoal));
}

RemovalGap removalGap(Ctmdp const& model, std::vector<char> const& removed, double horizon, double solverEpsilon, std::uint64_t stepCap) {
    checkSolverInputs(horizon, solverEpsilon);
    if (removed.size() != model.numStates()) {
        throw std::invalid_argument("removal mask size does not match the model");
    }
    // Both removal models in one lumped solve; see allStateScores.
    ModelDescription unionModel;
    auto const lowerInit = appendReachable(removalDescription(model, removed, false), unionModel);
    auto const upperInit = appendReachable(removalDescription(model, removed, true), unionModel);
    unionModel.initial = lowerInit;
    auto const [lumped, classOf] = lumpIdentical(Ctmdp(unionModel));
    auto const outcome = solveTbr(Ctmdp(lumped), horizon, Objective::Maximize, solverEpsilon, SolverOptions{stepCap, false, false});
    return {outcome.values[classOf[lowerInit]], outcome.values[classOf[upperInit]]};
}

double stateScore(Ctmdp const& model, double horizon, StateId s, double solverEpsilon, std::uint64_t stepCap) {
    if (s >= model.numStates()) {
        throw std::invalid_argument("state " + std::to_string(s) + " out of range");
    }
    if (s == model.initial()) {
        throw std::invalid_argument("the initial state cannot be scored");
    }
    std::vector<char> removed(model.numStates(), 0);
    removed[s] = 1;
    return removalGap(model, removed, horizon, solverEpsilon, stepCap).gap();
}

std::vector<double> allStateScores(Ctmdp const& model, double horizon, double solverEpsilon, std::uint64_t stepCap) {
    checkSolverInputs(horizon, solverEpsilon);
    std::vector<double> scores(model.numStates(), 0.0);
    auto const reachable = reachableFromInitial(model);

    // Disjoint union of all removal models, each cut down to its reachable part. Every copy
    // keeps the original maximal exit rate (the removed state carries it), so the union is
    // solved on exactly the grid the individual models would use.
    ModelDescription unionModel;
    std::vector<std::pair<StateId, StateId>> initials(model.numStates(), {0, 0});
    std::vector<char> removed(model.numStates(), 0);
    bool any = false;
    for (StateId s = 0; s < model.numStates(); ++s) {
        // Unreachable states cannot influence the initial value: both removal models agree there.
        if (s == model.initial() || !reachable[s]) {
            continue;
        }
        removed[s] = 1;
        auto const lowerInit = appendReachable(removalDescription(model, removed, false), unionModel);
        auto const upperInit = appendReachable(removalDescription(model, removed, true), unionModel);
        removed[s] = 0;
        initials[s] = {lowerInit, upperInit};
        any = true;
    }
    if (!any) {
        return scores;
    }
    unionModel.initial = 0;
    // Copies share most of their structure; merging identical states keeps the values and the
    // grid (lumping preserves exit rates) while shrinking the solve considerably.
    auto const [lumped, classOf] = lumpIdentical(Ctmdp(unionModel));
    Ctmdp const combined(lumped);
    auto const outcome = solveTbr(combined, horizon, Objective::Maximize, solverEpsilon, SolverOptions{stepCap, false, false});
    for (StateId s = 0; s < model.numStates(); ++s) {
        if (s != model.initial() && reachable[s]) {
            scores[s] = outcome.values[classOf[initials[s].second]] - outcome.values[classOf[initials[s].first]];
        }
    }
    return scores;
}

GreedyResult greedyMinSubset(Ctmdp const& model, double horizon, double gapBudget, double solverEpsilon, std::uint64_t stepCap) {
    if (!(gapBudget > 0.0)) {
        throw std::invalid_argument("gap budget must be positive");
    }
    GreedyResult result;
    auto const scores = allStateScores(model, horizon, solverEpsilon, stepCap);
    for (StateId s = 0; s < model.numStates(); ++s) {
        if (s != model.initial()) {
            result.order.push_back(s);
        }
    }
    std::stable_sort(result.order.begin(), result.order.end(), [&](StateId a, StateId b) { return scores[a] < scores[b]; });
    for (StateId s : result.order) {
        result.scores.push_back(scores[s]);
    }

    std::vector<char> removed(model.numStates(), 0);
    double gap = 0.0;
    for (StateId s : result.order) {
        removed[s] = 1;
        // A state the current removal already cuts off leaves both values bit-for-bit unchanged.
        auto const reachable = reachableFromInitial(removeStates(model, removed, false));
        double trialGap = gap;
        if (reachable[s]) {
            trialGap = removalGap(model, removed, horizon, solverEpsilon, stepCap).gap();
        }
        if (trialGap > gapBudget) {
            removed[s] = 0;
            break;
        }
        gap = trialGap;
        result.gapLog.push_back(gap);
    }
    result.finalGap = gap;
    for (StateId s = 0; s < model.numStates(); ++s) {
        (removed[s] ? result.removed : result.kept).push_back(s);
    }
    return result;
}

}  // namespace subtbr
