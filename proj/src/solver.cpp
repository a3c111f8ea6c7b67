#include "subtbr/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace subtbr {

std::uint64_t stepCount(double maxRate, double horizon, double precision, std::uint64_t cap) {
    if (!(maxRate > 0.0) || !std::isfinite(maxRate)) {
        throw std::invalid_argument("maximal exit rate must be positive");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("time bound must be positive");
    }
    if (!(precision > 0.0 && precision < 1.0)) {
        throw std::invalid_argument("solver precision must lie in (0,1)");
    }
    auto const scaled = maxRate * horizon;
    auto const exact = std::ceil(scaled * scaled / (2.0 * precision));
    if (!(exact <= static_cast<double>(cap))) {
        auto const required = exact < 1.8e19 ? static_cast<std::uint64_t>(exact) : std::numeric_limits<std::uint64_t>::max();
        throw PrecisionUnattainable(required, cap);
    }
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(exact));
}

double aprioriBound(double maxRate, double horizon, std::uint64_t steps) {
    if (steps == 0) {
        return 0.0;
    }
    auto const scaled = maxRate * horizon;
    return scaled * scaled / (2.0 * static_cast<double>(steps));
}

double minimalPrecision(double maxRate, double horizon, std::uint64_t cap) {
    auto const scaled = maxRate * horizon;
    // Nudge upwards so that stepCount() with the result never lands on cap + 1.
    return std::nextafter(scaled * scaled / (2.0 * static_cast<double>(cap)), 1.0) * (1.0 + 1e-12);
}

namespace {

/// Flattened per-step update for the states whose value actually changes over time: non-goal
/// states that can reach a goal (and, optionally, are reachable from the initial state).
/// Every other state keeps its initial value (1 for goals, 0 otherwise) exactly.
struct Kernel {
    std::vector<StateId> state;
    std::vector<std::uint32_t> choiceBegin;
    std::vector<double> jump;
    std::vector<double> stay;
    std::vector<std::uint32_t> succBegin;
    std::vector<StateId> succ;
    std::vector<double> prob;
    std::vector<std::size_t> modelChoice;
    /// Position of every model state in the solve buffers; active state a sits at position a.
    std::vector<StateId> position;

    std::size_t size() const {
        return state.size();
    }
    std::size_t numChoices(std::size_t a) const {
        return choiceBegin[a + 1] - choiceBegin[a];
    }

    double evaluate(std::uint32_t c, std::uint32_t s, double const* __restrict v) const {
        double sum = 0.0;
        for (auto k = succBegin[c]; k < succBegin[c + 1]; ++k) {
            sum += prob[k] * v[succ[k]];
        }
        return jump[c] * sum + stay[c] * v[s];
    }
};

/// Active states (non-goal, can reach a goal, optionally reachable) are laid out first, in an
/// order that places single-successor chains on consecutive positions; all other states follow.
/// Values are kept in position space throughout a solve.
Kernel buildKernel(Ctmdp const& model, double delta, bool initialOnly) {
    auto const n = model.numStates();
    auto const live = canReachGoal(model);
    std::vector<char> reachable;
    if (initialOnly) {
        reachable = reachableFromInitial(model);
    }
    std::vector<char> active(n, 0);
    for (StateId s = 0; s < n; ++s) {
        active[s] = !model.isGoal(s) && live[s] && (!initialOnly || reachable[s]);
    }

    constexpr auto kNone = std::numeric_limits<StateId>::max();
    std::vector<StateId> chainNext(n, kNone);
    std::vector<char> hasChainPred(n, 0);
    for (StateId s = 0; s < n; ++s) {
        if (!active[s] || model.numEnabled(s) != 1) {
            continue;
        }
        auto const targets = model.choiceTargets(model.choiceBegin(s));
        if (targets.size() == 1 && targets[0] != s && active[targets[0]]) {
            chainNext[s] = targets[0];
            hasChainPred[targets[0]] = 1;
        }
    }

    Kernel k;
    k.position.assign(n, kNone);
    auto walk = [&](StateId s) {
        for (; s != kNone && k.position[s] == kNone; s = chainNext[s]) {
            k.position[s] = static_cast<StateId>(k.state.size());
            k.state.push_back(s);
        }
    };
    for (StateId s = 0; s < n; ++s) {
        if (active[s] && !hasChainPred[s]) {
            walk(s);
        }
    }
    for (StateId s = 0; s < n; ++s) {
        if (active[s]) {
            walk(s);
        }
    }
    auto next = static_cast<StateId>(k.state.size());
    for (StateId s = 0; s < n; ++s) {
        if (k.position[s] == kNone) {
            k.position[s] = next++;
        }
    }

    k.choiceBegin.push_back(0);
    k.succBegin.push_back(0);
    for (auto s : k.state) {
        for (auto c = model.choiceBegin(s); c < model.choiceEnd(s); ++c) {
            auto const exit = model.choiceExitRate(c);
            k.jump.push_back(-std::expm1(-exit * delta));
            k.stay.push_back(std::exp(-exit * delta));
            auto const targets = model.choiceTargets(c);
            auto const rates = model.choiceRates(c);
            for (std::size_t i = 0; i < targets.size(); ++i) {
                k.succ.push_back(k.position[targets[i]]);
                k.prob.push_back(rates[i] / exit);
            }
            k.succBegin.push_back(static_cast<std::uint32_t>(k.succ.size()));
            k.modelChoice.push_back(c);
        }
        k.choiceBegin.push_back(static_cast<std::uint32_t>(k.jump.size()));
    }
    return k;
}

std::vector<double> toPositions(Kernel const& kernel, std::vector<double> const& values) {
    std::vector<double> result(values.size());
    for (std::size_t s = 0; s < values.size(); ++s) {
        result[kernel.position[s]] = values[s];
    }
    return result;
}

std::vector<double> fromPositions(Kernel const& kernel, std::vector<double> const& values) {
    std::vector<double> result(values.size());
    for (std::size_t s = 0; s < values.size(); ++s) {
        result[s] = values[kernel.position[s]];
    }
    return result;
}

std::vector<double> goalIndicator(Ctmdp const& model) {
    std::vector<double> v(model.numStates(), 0.0);
    for (StateId g : model.goals()) {
        v[g] = 1.0;
    }
    return v;
}

/// Single-choice, single-successor update; the branching probability is exactly 1.
struct ChainEntry {
    StateId state;
    StateId target;
    double jump;
    double stay;
};

/// Maximal run of chain entries s -> s+1 over consecutive state ids; updated with unit-stride
/// loads so the compiler can vectorize it.
struct ChainRun {
    StateId first;
    std::uint32_t length;
    std::vector<double> jump;
    std::vector<double> stay;
};

/// Two choices with one successor each; `slot` indexes Partition::multi.
struct PairEntry {
    std::uint32_t state;
    StateId target[2];
    double jump[2];
    double stay[2];
    std::uint32_t slot;
};

struct Partition {
    std::vector<ChainRun> runs;
    std::vector<ChainEntry> chain;
    std::vector<std::uint32_t> single;
    /// Every state with a real decision; pairs and general split it by shape.
    std::vector<std::uint32_t> multi;
    std::vector<PairEntry> pairs;
    std::vector<std::uint32_t> general;
};

/// Splits active states by update shape. Update order within a step is irrelevant (separate
/// input and output buffers), so the split does not change any result.
Partition partition(Kernel const& kernel) {
    Partition p;
    for (std::uint32_t a = 0; a < kernel.size(); ++a) {
        if (kernel.numChoices(a) > 1) {
            auto const slot = static_cast<std::uint32_t>(p.multi.size());
            p.multi.push_back(a);
            auto const c = kernel.choiceBegin[a];
            auto const single = [&](std::uint32_t x) { return kernel.succBegin[x + 1] - kernel.succBegin[x] == 1; };
            if (kernel.numChoices(a) == 2 && single(c) && single(c + 1)) {
                p.pairs.push_back({a,
                                   {kernel.succ[kernel.succBegin[c]], kernel.succ[kernel.succBegin[c + 1]]},
                                   {kernel.jump[c], kernel.jump[c + 1]},
                                   {kernel.stay[c], kernel.stay[c + 1]},
                                   slot});
            } else {
                p.general.push_back(slot);
            }
            continue;
        }
        auto const c = kernel.choiceBegin[a];
        if (kernel.succBegin[c + 1] - kernel.succBegin[c] == 1) {
            p.chain.push_back({a, kernel.succ[kernel.succBegin[c]], kernel.jump[c], kernel.stay[c]});
        } else {
            p.single.push_back(a);
        }
    }

    constexpr std::size_t kMinRun = 8;
    std::vector<ChainEntry> rest;
    for (std::size_t i = 0; i < p.chain.size();) {
        auto j = i;
        while (j < p.chain.size() && p.chain[j].target == p.chain[j].state + 1 &&
               (j == i || p.chain[j].state == p.chain[j - 1].state + 1)) {
            ++j;
        }
        if (j - i >= kMinRun) {
            ChainRun run{p.chain[i].state, static_cast<std::uint32_t>(j - i), {}, {}};
            for (auto k = i; k < j; ++k) {
                run.jump.push_back(p.chain[k].jump);
                run.stay.push_back(p.chain[k].stay);
            }
            p.runs.push_back(std::move(run));
            i = j;
        } else {
            rest.push_back(p.chain[i]);
            ++i;
        }
    }
    p.chain = std::move(rest);
    return p;
}

void checkHorizon(double horizon) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("time bound must be a non-negative finite number");
    }
}

}  // namespace

SolveOutcome solveTbr(Ctmdp const& model, double horizon, Objective objective, double precision, SolverOptions const& options) {
    checkHorizon(horizon);
    SolveOutcome outcome;
    outcome.scheduler.objective = objective;
    auto current = goalIndicator(model);
    auto const init = model.initial();

    if (horizon == 0.0) {
        if (!(precision > 0.0 && precision < 1.0)) {
            throw std::invalid_argument("solver precision must lie in (0,1)");
        }
        for (auto c = model.choiceBegin(init); c < model.choiceEnd(init); ++c) {
            outcome.initialActionValues.emplace_back(model.choiceLabel(c), current[init]);
        }
        outcome.valueAtInitial = current[init];
        outcome.values = std::move(current);
        return outcome;
    }

    auto const steps = stepCount(model.maxExitRate(), horizon, precision, options.stepCap);
    auto const delta = horizon / static_cast<double>(steps);
    outcome.numSteps = steps;
    outcome.aprioriBound = aprioriBound(model.maxExitRate(), horizon, steps);
    outcome.scheduler.delta = delta;
    outcome.scheduler.numSteps = steps;

    auto const kernel = buildKernel(model, delta, options.initialOnly);
    current = toPositions(kernel, current);
    auto next = current;

    auto const [runs, chain, single, multi, pairs, general] = partition(kernel);
    std::vector<std::uint32_t> currentBest(multi.size(), std::numeric_limits<std::uint32_t>::max());
    std::vector<std::vector<std::pair<std::uint64_t, std::uint32_t>>> changes(multi.size());
    bool const maximize = objective == Objective::Maximize;

    // Per-action values at the initial state: the first decision there is fixed to one action
    // until the first jump; everything afterwards is optimal.
    auto const initialPos = std::find(kernel.state.begin(), kernel.state.end(), init);
    bool const tracking = initialPos != kernel.state.end();
    auto const initialActive = static_cast<std::size_t>(initialPos - kernel.state.begin());
    std::vector<double> committed(tracking ? kernel.numChoices(initialActive) : 0, 0.0);

    for (std::uint64_t step = 1; step <= steps; ++step) {
        double const* __restrict v = current.data();
        double* __restrict w = next.data();
        for (auto const& run : runs) {
            double const* __restrict jump = run.jump.data();
            double const* __restrict stay = run.stay.data();
            double const* __restrict in = v + run.first;
            double* __restrict out = w + run.first;
            for (std::uint32_t k = 0; k < run.length; ++k) {
                out[k] = jump[k] * in[k + 1] + stay[k] * in[k];
            }
        }
        for (auto const& e : chain) {
            w[e.state] = e.jump * v[e.target] + e.stay * v[e.state];
        }
        for (auto a : single) {
            w[a] = kernel.evaluate(kernel.choiceBegin[a], a, v);
        }
        if (tracking) {
            for (std::size_t c = 0; c < committed.size(); ++c) {
                auto const choice = kernel.choiceBegin[initialActive] + static_cast<std::uint32_t>(c);
                double sum = 0.0;
                for (auto k = kernel.succBegin[choice]; k < kernel.succBegin[choice + 1]; ++k) {
                    sum += kernel.prob[k] * v[kernel.succ[k]];
                }
                committed[c] = kernel.jump[choice] * sum + kernel.stay[choice] * committed[c];
            }
        }
        for (auto const& e : pairs) {
            auto const q0 = e.jump[0] * v[e.target[0]] + e.stay[0] * v[e.state];
            auto const q1 = e.jump[1] * v[e.target[1]] + e.stay[1] * v[e.state];
            bool const second = maximize ? q1 > q0 : q1 < q0;
            w[e.state] = second ? q1 : q0;
            auto const bestChoice = kernel.choiceBegin[e.state] + (second ? 1u : 0u);
            if (bestChoice != currentBest[e.slot]) {
                currentBest[e.slot] = bestChoice;
                if (options.recordScheduler) {
                    changes[e.slot].emplace_back(step, bestChoice);
                }
            }
        }
        for (auto m : general) {
            auto const a = multi[m];
            auto bestChoice = kernel.choiceBegin[a];
            auto best = kernel.evaluate(bestChoice, a, v);
            for (auto c = bestChoice + 1; c < kernel.choiceBegin[a + 1]; ++c) {
                auto const q = kernel.evaluate(c, a, v);
                if (maximize ? q > best : q < best) {
                    best = q;
                    bestChoice = c;
                }
            }
            w[a] = best;
            if (bestChoice != currentBest[m]) {
                currentBest[m] = bestChoice;
                if (options.recordScheduler) {
                    changes[m].emplace_back(step, bestChoice);
                }
            }
        }
        std::swap(current, next);
    }
    current = fromPositions(kernel, current);

#ifndef NDEBUG
    for (double value : current) {
        assert(value >= 0.0 && value <= 1.0 + 1e-12);
    }
#endif

    if (options.recordScheduler) {
        for (std::size_t m = 0; m < multi.size(); ++m) {
            auto& points = outcome.scheduler.decisions[kernel.state[multi[m]]];
            for (auto const& [step, choice] : changes[m]) {
                points.push_back({step, model.choiceLabel(kernel.modelChoice[choice])});
            }
        }
    }
    for (auto c = model.choiceBegin(init); c < model.choiceEnd(init); ++c) {
        auto const offset = c - model.choiceBegin(init);
        outcome.initialActionValues.emplace_back(model.choiceLabel(c), tracking ? committed[offset] : current[init]);
    }
    outcome.valueAtInitial = current[init];
    outcome.values = std::move(current);
    return outcome;
}

double evaluateScheduler(Ctmdp const& model, StepScheduler const& scheduler, double horizon, double precision,
                         SolverOptions const& options) {
    checkHorizon(horizon);
    scheduler.checkAgainst(model);
    auto current = goalIndicator(model);
    if (horizon == 0.0) {
        return current[model.initial()];
    }
    if (scheduler.numSteps > 0 && scheduler.horizon() < horizon * (1.0 - 1e-9)) {
        throw std::invalid_argument("scheduler horizon " + std::to_string(scheduler.horizon()) + " does not cover time bound " +
                                    std::to_string(horizon));
    }

    auto const steps = stepCount(model.maxExitRate(), horizon, precision, options.stepCap);
    auto const delta = horizon / static_cast<double>(steps);
    auto const kernel = buildKernel(model, delta, options.initialOnly);
    current = toPositions(kernel, current);
    auto next = current;

    bool const sameGrid = scheduler.numSteps == steps && std::abs(scheduler.delta - delta) <= 1e-12 * delta;
    auto schedulerStep = [&](std::uint64_t step) -> std::uint64_t {
        if (scheduler.numSteps == 0) {
            return 0;
        }
        if (sameGrid) {
            return step;
        }
        // Remaining time at the end of this step's interval, bucketed onto the scheduler's grid.
        auto const remaining = static_cast<double>(step) * delta;
        auto const raw = std::ceil(remaining / scheduler.delta - 1e-9);
        return std::clamp<std::uint64_t>(raw < 1.0 ? 1 : static_cast<std::uint64_t>(raw), 1, scheduler.numSteps);
    };

    struct Resolved {
        std::uint32_t active;
        std::vector<std::pair<std::uint64_t, std::uint32_t>> points;
        std::size_t cursor = 0;
    };
    std::vector<std::uint32_t> fixed;
    std::vector<Resolved> guided;
    for (std::uint32_t a = 0; a < kernel.size(); ++a) {
        auto const s = kernel.state[a];
        auto it = scheduler.decisions.find(s);
        if (kernel.numChoices(a) == 1 || it == scheduler.decisions.end() || it->second.empty()) {
            fixed.push_back(a);
            continue;
        }
        Resolved r{a, {}};
        for (auto const& point : it->second) {
            auto const modelChoice = model.findChoice(s, point.action);
            auto const offset = static_cast<std::uint32_t>(modelChoice - model.choiceBegin(s));
            r.points.emplace_back(point.step, kernel.choiceBegin[a] + offset);
        }
        guided.push_back(std::move(r));
    }

    for (std::uint64_t step = 1; step <= steps; ++step) {
        double const* __restrict v = current.data();
        double* __restrict w = next.data();
        for (auto a : fixed) {
            w[a] = kernel.evaluate(kernel.choiceBegin[a], a, v);
        }
        auto const j = schedulerStep(step);
        for (auto& r : guided) {
            auto const a = r.active;
            while (r.cursor + 1 < r.points.size() && r.points[r.cursor + 1].first <= j) {
                ++r.cursor;
            }
            auto const choice = r.points[r.cursor].first <= j ? r.points[r.cursor].second : kernel.choiceBegin[r.active];
            w[a] = kernel.evaluate(choice, a, v);
        }
        std::swap(current, next);
    }
    return current[kernel.position[model.initial()]];
}

}  // namespace subtbr
