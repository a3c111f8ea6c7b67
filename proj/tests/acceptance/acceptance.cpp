// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <boost/math/special_functions/gamma.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>

#include "models.hpp"
#include "subtbr/cli.hpp"
#include "subtbr/generators.hpp"
#include "subtbr/greedy.hpp"
#include "subtbr/model_io.hpp"
#include "subtbr/solver.hpp"
#include "subtbr/subspace.hpp"

namespace {

using namespace subtbr;

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool condition, std::string const& what) {
        if (!condition) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(std::string const& what) {
        if (pass) {
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(char const* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buffer[256];
    std::snprintf(buffer, sizeof(buffer), format, a, b, c, d);
    return buffer;
}

/// gen_erlang with the fast action removed: the goal is hit after k+1 stages of rate r.
Ctmdp slowOnlyErlang(std::size_t k, double rate) {
    auto d = makeErlangModel(k, rate).describe();
    std::erase_if(d.transitions, [](TransitionRecord const& t) { return t.action == "fast"; });
    return Ctmdp(d);
}

/// States reachable from the initial state along paths that stop at goal states.
std::set<StateId> reachableBeforeGoal(Ctmdp const& model) {
    std::set<StateId> seen{model.initial()};
    std::vector<StateId> stack{model.initial()};
    while (!stack.empty()) {
        auto const s = stack.back();
        stack.pop_back();
        if (model.isGoal(s)) {
            continue;
        }
        for (auto t : model.successors(s)) {
            if (seen.insert(t).second) {
                stack.push_back(t);
            }
        }
    }
    return seen;
}

Verdict closedFormOracle() {
    Verdict v;
    int checked = 0;
    double worst = 0.0;
    for (std::size_t k : {1, 5, 20}) {
        for (double rate : {0.5, 10.0}) {
            for (double horizon : {1.0, 3.0}) {
                auto const outcome = solveTbr(slowOnlyErlang(k, rate), horizon, Objective::Maximize, 1e-3);
                auto const exact = boost::math::gamma_p(static_cast<double>(k + 1), rate * horizon);
                auto const diff = exact - outcome.valueAtInitial;
                v.require(diff >= -1e-12 && diff <= outcome.aprioriBound,
                          fmt("k=%g r=%g T=%g: analytic-value=%.3g", static_cast<double>(k), rate, horizon, diff));
                worst = std::max(worst, diff);
                ++checked;
            }
        }
    }
    v.note(std::to_string(checked) + " cases, max(analytic-value)=" + fmt("%.3g", worst));
    return v;
}

Verdict twoChainReproduction() {
    Verdict v;
    auto const model = makeTwoChainModel(TwoChainVariant::A);
    auto const upper = upperSub(model, {0, 1, 2, 14, 15});
    auto const sub = solveTbr(upper, 3.0, Objective::Maximize, 1e-3);
    v.require(std::abs(sub.valueAtInitial - 0.1987) <= 3e-3, fmt("upper_sub value %.5f", sub.valueAtInitial));
    std::vector<double> perAction;
    for (auto const& [label, value] : sub.initialActionValues) {
        perAction.push_back(value);
    }
    std::sort(perAction.begin(), perAction.end());
    v.require(perAction.size() == 2, "expected two actions at the initial state");
    if (perAction.size() == 2) {
        v.require(std::abs(perAction[0] - 0.1911) <= 3e-3 && std::abs(perAction[1] - 0.1987) <= 3e-3,
                  fmt("per-action values %.5f %.5f", perAction[0], perAction[1]));
    }
    auto const full = solveTbr(model, 3.0, Objective::Maximize, 1e-3);
    v.require(std::abs(full.valueAtInitial - 0.1906) <= 3e-3, fmt("full value %.5f", full.valueAtInitial));
    if (perAction.size() == 2) {
        v.note(fmt("sub %.5f {%.5f, %.5f}, full %.5f", sub.valueAtInitial, perAction[1], perAction[0], full.valueAtInitial));
    }
    return v;
}

Verdict sandwichFuzz() {
    Verdict v;
    double const eps = 1e-3;
    int violations = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto const model = fixtures::randomModel(seed);
        auto const subset = fixtures::randomSubset(model, seed + 7919);
        auto const pair = buildSubModelPair(model, subset);
        double const horizon = 0.25 + static_cast<double>(seed % 8) * 0.25;
        for (auto objective : {Objective::Maximize, Objective::Minimize}) {
            auto const value = solveTbr(model, horizon, objective, eps).valueAtInitial;
            auto const lower = solveTbr(pair.lower, horizon, objective, eps).valueAtInitial;
            auto const upperSolve = solveTbr(pair.upper, horizon, objective, eps);
            auto const upper = std::min(1.0, upperSolve.valueAtInitial + upperSolve.aprioriBound);
            if (!(lower <= value + 2 * eps && value <= upper + 2 * eps)) {
                ++violations;
                v.require(false, fmt("seed %g: l=%.6f v=%.6f u=%.6f", static_cast<double>(seed), lower, value, upper));
            }
        }
    }
    v.note("200 models x {max,min}, 0 violations");
    return v;
}

Verdict schedulerCheck() {
    Verdict v;
    double const eps = 1e-3;
    auto check = [&](Ctmdp const& model, double horizon, std::string const& name) {
        SubspaceConfig config;
        config.epsilon = 0.01;
        config.solverEpsilon = eps;
        config.masterSeed = 17;
        config.simulationsPerIteration = 100;
        auto const result = subspaceTbr(model, horizon, config);
        auto const value = evaluateScheduler(model, result.scheduler, horizon, eps);
        v.require(value >= result.lower - 2 * eps && value <= result.upper + 2 * eps,
                  name + fmt(": value %.6f outside [%.6f, %.6f]", value, result.lower - 2 * eps, result.upper + 2 * eps));
    };
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        check(fixtures::randomModel(seed), 1.0, "fuzz " + std::to_string(seed));
    }
    check(makeTwoChainModel(TwoChainVariant::A), 3.0, "twochain-a");
    v.note("20 fuzz models + twochain-a within [l-2e-3, u+2e-3]");
    return v;
}

Verdict erlangBenchmark() {
    Verdict v;
    auto const model = makeErlangModel(50000, 10.0);
    SubspaceConfig config;
    config.epsilon = 0.01;
    config.simulationsPerIteration = 1000;
    config.guide = GuidePolicy::Uniform;
    config.masterSeed = 2024;
    auto const result = subspaceTbr(model, 50.0, config);
    double const reference = 0.5 * -std::expm1(-500.0);
    v.require(result.converged, "not converged");
    v.require(result.explored.size() <= 5000, "explored " + std::to_string(result.explored.size()));
    v.require(result.lower <= reference && reference <= result.upper, fmt("[%.6f, %.6f] misses 0.5", result.lower, result.upper));
    v.note(fmt("explored %g of 50003, [%.6f, %.6f], %g iterations", static_cast<double>(result.explored.size()), result.lower, result.upper,
               static_cast<double>(result.iterations.size())));
    return v;
}

Verdict hardInstance() {
    Verdict v;
    auto const model = makePollingModel(2, 3, PollingGoal::All);
    SubspaceConfig config;
    config.epsilon = 0.01;
    config.masterSeed = 11;
    auto const result = subspaceTbr(model, 2.0, config);
    auto const eps = config.effectiveSolverEpsilon();
    auto const full = solveTbr(model, 2.0, Objective::Maximize, eps).valueAtInitial;
    auto const reachable = reachableFromInitial(model);
    auto const numReachable = static_cast<double>(std::count(reachable.begin(), reachable.end(), 1));
    auto const fraction = static_cast<double>(result.explored.size()) / numReachable;
    v.require(result.converged, "not converged");
    v.require(std::abs(result.lower - full) <= config.epsilon + 2 * eps && std::abs(result.upper - full) <= config.epsilon + 2 * eps,
              fmt("[%.6f, %.6f] vs full %.6f", result.lower, result.upper, full));
    v.require(fraction >= 0.8, fmt("explored fraction %.3f", fraction));
    v.note(fmt("[%.6f, %.6f], full %.6f, explored %.0f%% of reachable", result.lower, result.upper, full, 100 * fraction));
    return v;
}

Verdict exhaustion() {
    Verdict v;
    double const eps = 1e-3;
    double const horizon = 1.0;
    int models = 0;
    for (std::uint64_t seed = 300; seed < 320; ++seed) {
        auto const model = fixtures::randomModel(seed);
        if (model.isGoal(model.initial())) {
            continue;
        }
        auto const target = reachableBeforeGoal(model);
        std::set<StateId> explored{model.initial()};
        std::uint64_t stream = 0;
        std::uint64_t const batch = 1000;
        while (explored != target && stream < 1'000'000) {
            auto const sampled = relevantSubset(model, horizon, SimScheduler::uniform(), batch, seed, stream);
            explored.insert(sampled.begin(), sampled.end());
            stream += batch;
        }
        v.require(explored == target, "seed " + std::to_string(seed) + ": reachable set not covered");
        auto const pair = buildSubModelPair(model, explored);
        auto const lower = solveTbr(pair.lower, horizon, Objective::Maximize, eps);
        auto const upper = solveTbr(pair.upper, horizon, Objective::Maximize, eps);
        auto const gap = std::min(1.0, upper.valueAtInitial + upper.aprioriBound) - lower.valueAtInitial;
        v.require(gap <= 2 * eps + 2 * upper.aprioriBound, "seed " + std::to_string(seed) + fmt(": gap %.3g", gap));

        SubspaceConfig config;
        config.epsilon = 4 * eps;
        config.solverEpsilon = eps;
        config.masterSeed = seed;
        config.simulationsPerIteration = 50;
        config.maxIterations = 1'000'000;
        auto const result = subspaceTbr(model, horizon, config);
        v.require(result.converged, "seed " + std::to_string(seed) + ": loop did not converge");
        ++models;
    }
    v.note(std::to_string(models) + " fuzz models exhausted, gap <= 2eps + 2 apriori");
    return v;
}

Verdict determinism() {
    Verdict v;
    auto const dir = std::filesystem::temp_directory_path() / "subtbr_acceptance_determinism";
    std::filesystem::create_directories(dir);
    auto const model = (dir / "twochain-b.ctmdp").string();
    writeModelFile(makeTwoChainModel(TwoChainVariant::B), model);
    auto const polling = (dir / "polling.ctmdp").string();
    writeModelFile(makePollingModel(2, 3, PollingGoal::All), polling);
    std::regex const wall("\"wall_ms\": [^,}\\n]*");
    auto once = [&](std::vector<std::string> const& args) {
        std::ostringstream out;
        std::ostringstream err;
        auto const code = runCli(args, out, err);
        return std::to_string(code) + std::regex_replace(out.str(), wall, "");
    };
    for (auto const& args : {std::vector<std::string>{"solve", "--model", model, "--time-bound", "3", "--epsilon", "0.05", "--seed", "7",
                                                      "--sim-scheduler", "optimal", "--nsim", "200"},
                             std::vector<std::string>{"solve", "--model", polling, "--time-bound", "2", "--epsilon", "0.01", "--seed", "7",
                                                      "--sim-scheduler", "alternate", "--nsim", "20"}}) {
        auto const first = once(args);
        auto const second = once(args);
        v.require(first == second, "documents differ for " + args[2]);
        v.require(first.size() > 1, "empty document");
    }
    std::filesystem::remove_all(dir);
    v.note("two configurations, byte-identical modulo wall_ms");
    return v;
}

Verdict greedySoundness() {
    Verdict v;
    auto const model = makeTwoChainModel(TwoChainVariant::A);
    double const horizon = 3.0;
    double const budget = 0.001;
    // 1e-4 needs more steps than the default cap; use the finest attainable precision instead.
    double const eps = std::max(1e-4, minimalPrecision(model.maxExitRate(), horizon));
    auto const result = greedyMinSubset(model, horizon, budget, eps);
    std::set<StateId> const kept(result.kept.begin(), result.kept.end());
    auto const pair = buildSubModelPair(model, kept);
    auto const lower = solveTbr(pair.lower, horizon, Objective::Maximize, eps, SolverOptions{kDefaultStepCap, true, false});
    auto const upper = solveTbr(pair.upper, horizon, Objective::Maximize, eps, SolverOptions{kDefaultStepCap, true, false});
    auto const gap = upper.valueAtInitial + upper.aprioriBound - lower.valueAtInitial;
    v.require(gap <= budget + 4 * eps, fmt("re-solved gap %.3g", gap));
    for (StateId s : {0u, 1u, 2u, 3u, 4u, 5u, 6u, 7u, 8u, 9u, 10u, 11u, 12u, 13u, 17u}) {
        v.require(kept.contains(s), "left-chain state " + std::to_string(s) + " removed");
    }
    v.note(fmt("eps_solver %.3g, kept %g states, re-solved gap %.3g (limit %.3g)", eps, static_cast<double>(kept.size()), gap,
               budget + 4 * eps));
    return v;
}

struct Criterion {
    std::string name;
    double limitSeconds;
    std::function<Verdict()> run;
};

}  // namespace

int main() {
    std::vector<Criterion> const criteria{
        {"1 closed-form Erlang oracle", 10, closedFormOracle},
        {"2 two-chain example values", 60, twoChainReproduction},
        {"3 sub-model sandwich fuzz", 120, sandwichFuzz},
        {"4 extended scheduler value", 120, schedulerCheck},
        {"5 desk-scale Erlang benchmark", 300, erlangBenchmark},
        {"6 hard polling instance", 120, hardInstance},
        {"7 exhaustion of the reachable set", 120, exhaustion},
        {"8 deterministic result documents", 120, determinism},
        {"9 greedy kept-set soundness", 180, greedySoundness},
    };
    int failures = 0;
    for (auto const& criterion : criteria) {
        auto const started = std::chrono::steady_clock::now();
        Verdict verdict;
        try {
            verdict = criterion.run();
        } catch (std::exception const& e) {
            verdict.pass = false;
            verdict.detail = std::string("exception: ") + e.what();
        }
        auto const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        if (seconds > criterion.limitSeconds) {
            verdict.require(false, fmt("runtime %.1fs over the %.0fs limit", seconds, criterion.limitSeconds));
        }
        failures += verdict.pass ? 0 : 1;
        std::cout << (verdict.pass ? "PASS" : "FAIL") << "  criterion " << criterion.name << "  (" << fmt("%.1fs", seconds) << ")  "
                  << verdict.detail << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
