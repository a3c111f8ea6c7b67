#include "subtbr/subspace.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace subtbr {

std::size_t SubModelPair::numFringe() const {
    return static_cast<std::size_t>(std::count(explored.begin(), explored.end(), 0));
}

SubModelPair buildSubModelPair(Ctmdp const& model, std::set<StateId> const& subset) {
    if (!subset.contains(model.initial())) {
        throw std::invalid_argument("relevant subset must contain the initial state");
    }
    if (!subset.empty() && *subset.rbegin() >= model.numStates()) {
        throw std::invalid_argument("relevant subset contains an out-of-range state");
    }

    std::set<StateId> closure = subset;
    for (StateId s : subset) {
        auto const succ = model.successors(s);
        closure.insert(succ.begin(), succ.end());
    }

    std::vector<StateId> originalOf(closure.begin(), closure.end());
    std::vector<char> explored(originalOf.size(), 0);
    std::vector<StateId> subIndex(model.numStates(), std::numeric_limits<StateId>::max());
    for (std::size_t i = 0; i < originalOf.size(); ++i) {
        subIndex[originalOf[i]] = static_cast<StateId>(i);
    }

    ModelDescription lower;
    lower.numStates = originalOf.size();
    lower.initial = subIndex[model.initial()];
    auto const loopRate = model.maxExitRate();
    for (std::size_t i = 0; i < originalOf.size(); ++i) {
        auto const s = originalOf[i];
        auto const id = static_cast<StateId>(i);
        bool const inSubset = subset.contains(s);
        explored[i] = inSubset ? 1 : 0;
        if (model.isGoal(s)) {
            lower.goals.push_back(id);
        }
        for (auto c = model.choiceBegin(s); c < model.choiceEnd(s); ++c) {
            if (!inSubset) {
                lower.transitions.push_back({id, model.choiceLabel(c), id, loopRate});
                continue;
            }
            auto const targets = model.choiceTargets(c);
            auto const rates = model.choiceRates(c);
            for (std::size_t k = 0; k < targets.size(); ++k) {
                lower.transitions.push_back({id, model.choiceLabel(c), subIndex[targets[k]], rates[k]});
            }
        }
    }

    ModelDescription upper = lower;
    for (std::size_t i = 0; i < originalOf.size(); ++i) {
        if (!explored[i] && !model.isGoal(originalOf[i])) {
            upper.goals.push_back(static_cast<StateId>(i));
        }
    }
    std::sort(upper.goals.begin(), upper.goals.end());

    return SubModelPair{Ctmdp(lower), Ctmdp(upper), std::move(originalOf), std::move(explored)};
}

Ctmdp lowerSub(Ctmdp const& model, std::set<StateId> const& subset) {
    return buildSubModelPair(model, subset).lower;
}

Ctmdp upperSub(Ctmdp const& model, std::set<StateId> const& subset) {
    return buildSubModelPair(model, subset).upper;
}

std::string toString(GuidePolicy policy) {
    switch (policy) {
        case GuidePolicy::Uniform:
            return "uniform";
        case GuidePolicy::Optimal:
            return "optimal";
        case GuidePolicy::Alternate:
            return "alternate";
    }
    return "uniform";
}

GuidePolicy parseGuidePolicy(std::string const& text) {
    if (text == "uniform") {
        return GuidePolicy::Uniform;
    }
    if (text == "optimal") {
        return GuidePolicy::Optimal;
    }
    if (text == "alternate") {
        return GuidePolicy::Alternate;
    }
    throw std::invalid_argument("unknown simulation scheduler '" + text + "' (expected uniform, optimal or alternate)");
}

SimScheduler chooseScheduler(GuidePolicy policy, std::uint64_t iteration, std::optional<StepScheduler> const& guide, double horizon) {
    if (!guide || policy == GuidePolicy::Uniform) {
        return SimScheduler::uniform();
    }
    if (policy == GuidePolicy::Alternate && iteration % 2 == 1) {
        return SimScheduler::uniform();
    }
    return SimScheduler::guided(*guide, horizon);
}

StepScheduler remapScheduler(StepScheduler const& scheduler, std::vector<StateId> const& originalOf, std::vector<char> const* keep) {
    StepScheduler result;
    result.delta = scheduler.delta;
    result.numSteps = scheduler.numSteps;
    result.objective = scheduler.objective;
    for (auto const& [state, points] : scheduler.decisions) {
        if (keep != nullptr && !(*keep)[state]) {
            continue;
        }
        result.decisions.emplace(originalOf.at(state), points);
    }
    return result;
}

StepScheduler extendScheduler(StepScheduler const& lowerScheduler, SubModelPair const& pair) {
    return remapScheduler(lowerScheduler, pair.originalOf, &pair.explored);
}

void SubspaceConfig::check() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0,1)");
    }
    auto const solver = effectiveSolverEpsilon();
    if (!(solver > 0.0 && solver <= epsilon / 4.0)) {
        throw std::invalid_argument("solver epsilon must lie in (0, epsilon/4]");
    }
    if (simulationsPerIteration < 1) {
        throw std::invalid_argument("number of simulations per iteration must be >= 1");
    }
    if (maxIterations < 1) {
        throw std::invalid_argument("max iterations must be >= 1");
    }
}

SubspaceResult subspaceTbr(Ctmdp const& model, double horizon, SubspaceConfig const& config) {
    config.check();
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("time bound must be a non-negative finite number");
    }
    SubspaceResult result;
    result.seed = config.masterSeed;
    result.explored = {model.initial()};
    if (model.isGoal(model.initial())) {
        result.lower = 1.0;
        result.upper = 1.0;
        result.converged = true;
        result.scheduler.objective = config.objective;
        return result;
    }

    SolverOptions const solverOptions{config.stepCap, false, true};
    auto const solverEpsilon = config.effectiveSolverEpsilon();
    auto simulation = SimScheduler::uniform();

    for (std::uint64_t iteration = 1; iteration <= config.maxIterations; ++iteration) {
        auto const started = std::chrono::steady_clock::now();
        if (horizon > 0.0) {
            auto const sampled = relevantSubset(model, horizon, simulation, config.simulationsPerIteration, config.masterSeed,
                                                (iteration - 1) * config.simulationsPerIteration);
            result.explored.insert(sampled.begin(), sampled.end());
        }

        auto const pair = buildSubModelPair(model, result.explored);
        auto const lowerSolve = solveTbr(pair.lower, horizon, config.objective, solverEpsilon, solverOptions);
        auto const upperSolve = solveTbr(pair.upper, horizon, config.objective, solverEpsilon, solverOptions);
        auto const lower = lowerSolve.valueAtInitial;
        auto const upper = std::min(1.0, upperSolve.valueAtInitial + upperSolve.aprioriBound);

        result.lower = lower;
        result.upper = upper;
        result.scheduler = extendScheduler(lowerSolve.scheduler, pair);
        result.solverSteps = upperSolve.numSteps;
        result.aprioriBound = upperSolve.aprioriBound;
        result.subModelStates = pair.originalOf.size();

        auto const elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        result.iterations.push_back({iteration, result.explored.size(), lower, upper, elapsed});

        if (upper - lower < config.epsilon) {
            result.converged = true;
            break;
        }
        auto const& guiding = config.objective == Objective::Maximize ? upperSolve : lowerSolve;
        simulation = chooseScheduler(config.guide, iteration + 1, remapScheduler(guiding.scheduler, pair.originalOf), horizon);
    }

    return result;
}

}  // namespace subtbr
