#include "subtbr/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "subtbr/generators.hpp"
#include "subtbr/greedy.hpp"
#include "subtbr/model_io.hpp"
#include "subtbr/solver.hpp"

namespace subtbr {

namespace {

struct SolveFlags {
    std::string model;
    double timeBound = 0.0;
    double epsilon = 0.0;
    std::string objective = "max";
    std::optional<double> solverEpsilon;
    std::uint64_t nsim = 1000;
    std::string simScheduler = "uniform";
    std::uint64_t seed = 0;
    std::uint64_t maxIterations = 1000;
    std::uint64_t stepCap = kDefaultStepCap;
    unsigned threads = 1;
    bool full = false;
    std::string emitScheduler;
    std::string output;
};

struct GenerateFlags {
    std::string family;
    std::string out;
    std::size_t k = 0;
    double r = 0.0;
    double fastRate = 10.0;
    double fastSuccess = 0.5;
    std::string variant = "a";
    std::size_t j = 0;
    std::string goal = "all";
    double arrival = 1.0;
    double service = 4.0;
    double success = 0.9;
};

struct GreedyFlags {
    std::string model;
    double timeBound = 0.0;
    double epsilon = 0.0;
    std::optional<double> solverEpsilon;
    std::uint64_t stepCap = kDefaultStepCap;
    std::string output;
};

struct EvaluateFlags {
    std::string model;
    std::string scheduler;
    double timeBound = 0.0;
    double solverEpsilon = 1e-3;
    std::uint64_t stepCap = kDefaultStepCap;
    std::string output;
};

void emit(nlohmann::json const& document, std::string const& path, std::ostream& out) {
    auto const text = document.dump(2) + "\n";
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot write output file '" + path + "'");
    }
    file << text;
}

int runSolve(SolveFlags const& flags, std::ostream& out) {
    auto const model = readModelFile(flags.model);
    auto const objective = parseObjective(flags.objective);

    SubspaceConfig config;
    config.epsilon = flags.epsilon;
    config.solverEpsilon = flags.solverEpsilon;
    config.simulationsPerIteration = flags.nsim;
    config.guide = parseGuidePolicy(flags.simScheduler);
    config.objective = objective;
    config.masterSeed = flags.seed;
    config.maxIterations = flags.maxIterations;
    config.stepCap = flags.stepCap;
    config.check();

    SubspaceResult result;
    if (flags.full) {
        auto const started = std::chrono::steady_clock::now();
        auto const solve = solveTbr(model, flags.timeBound, objective, config.effectiveSolverEpsilon(), SolverOptions{flags.stepCap});
        auto const elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        result.lower = solve.valueAtInitial;
        result.upper = std::min(1.0, solve.valueAtInitial + solve.aprioriBound);
        result.converged = result.upper - result.lower < flags.epsilon;
        for (StateId s = 0; s < model.numStates(); ++s) {
            result.explored.insert(result.explored.end(), s);
        }
        result.iterations.push_back({1, model.numStates(), result.lower, result.upper, elapsed});
        result.scheduler = solve.scheduler;
        result.seed = flags.seed;
        result.solverSteps = solve.numSteps;
        result.aprioriBound = solve.aprioriBound;
        result.subModelStates = model.numStates();
    } else {
        result = subspaceTbr(model, flags.timeBound, config);
    }

    auto document = resultDocument(result, flags.model, model.numStates(), flags.epsilon, flags.timeBound, objective);
    document["mode"] = flags.full ? "full" : "subspace";
    if (!flags.full) {
        document["sim_scheduler"] = flags.simScheduler;
        document["nsim"] = flags.nsim;
    }
    if (!flags.emitScheduler.empty()) {
        writeSchedulerFile(result.scheduler, flags.emitScheduler);
        document["scheduler_path"] = flags.emitScheduler;
    }
    emit(document, flags.output, out);
    return result.converged ? kExitConverged : kExitNotConverged;
}

int runGenerate(GenerateFlags const& flags, std::ostream& out) {
    auto model = [&]() -> Ctmdp {
        if (flags.family == "erlang") {
            return makeErlangModel(flags.k, flags.r, flags.fastRate, flags.fastSuccess);
        }
        if (flags.family == "twochain") {
            if (flags.variant != "a" && flags.variant != "b") {
                throw std::invalid_argument("twochain variant must be 'a' or 'b'");
            }
            return makeTwoChainModel(flags.variant == "a" ? TwoChainVariant::A : TwoChainVariant::B);
        }
        if (flags.goal != "all" && flags.goal != "one") {
            throw std::invalid_argument("polling goal must be 'all' or 'one'");
        }
        return makePollingModel(flags.j, flags.k, flags.goal == "all" ? PollingGoal::All : PollingGoal::One, flags.arrival, flags.service,
                                flags.success);
    }();
    writeModelFile(model, flags.out);
    out << nlohmann::json{{"path", flags.out}, {"states", model.numStates()}, {"transitions", model.numTransitions()}}.dump() << "\n";
    return kExitConverged;
}

int runGreedy(GreedyFlags const& flags, std::ostream& out) {
    auto const model = readModelFile(flags.model);
    auto solverEpsilon = flags.solverEpsilon.value_or(flags.epsilon / 10.0);
    if (!flags.solverEpsilon && flags.timeBound > 0.0) {
        // The default precision is raised to what the step cap allows; an explicit one is not.
        solverEpsilon = std::max(solverEpsilon, minimalPrecision(model.maxExitRate(), flags.timeBound, flags.stepCap));
    }
    auto const result = greedyMinSubset(model, flags.timeBound, flags.epsilon, solverEpsilon, flags.stepCap);
    nlohmann::json order = nlohmann::json::array();
    for (std::size_t i = 0; i < result.order.size(); ++i) {
        order.push_back({{"state", result.order[i]}, {"score", result.scores[i]}});
    }
    nlohmann::json document{{"model", flags.model},
                            {"num_states", model.numStates()},
                            {"time_bound", flags.timeBound},
                            {"epsilon", flags.epsilon},
                            {"solver_epsilon", solverEpsilon},
                            {"kept_count", result.kept.size()},
                            {"kept", result.kept},
                            {"removed", result.removed},
                            {"final_gap", result.finalGap},
                            {"gap_log", result.gapLog},
                            {"order", std::move(order)}};
    emit(document, flags.output, out);
    return kExitConverged;
}

int runEvaluate(EvaluateFlags const& flags, std::ostream& out) {
    auto const model = readModelFile(flags.model);
    auto const scheduler = readSchedulerFile(flags.scheduler);
    auto const value = evaluateScheduler(model, scheduler, flags.timeBound, flags.solverEpsilon, SolverOptions{flags.stepCap});
    auto const steps = flags.timeBound > 0.0 ? stepCount(model.maxExitRate(), flags.timeBound, flags.solverEpsilon, flags.stepCap) : 0;
    nlohmann::json document{{"model", flags.model},
                            {"scheduler", flags.scheduler},
                            {"time_bound", flags.timeBound},
                            {"solver_epsilon", flags.solverEpsilon},
                            {"steps", steps},
                            {"apriori_bound", aprioriBound(model.maxExitRate(), flags.timeBound, steps)},
                            {"value", value}};
    emit(document, flags.output, out);
    return kExitConverged;
}

}  // namespace

nlohmann::json resultDocument(SubspaceResult const& result, std::string const& modelPath, std::size_t numStates, double epsilon,
                              double horizon, Objective objective) {
    nlohmann::json iterations = nlohmann::json::array();
    for (auto const& record : result.iterations) {
        iterations.push_back({{"iteration", record.iteration},
                              {"explored", record.explored},
                              {"lower", record.lower},
                              {"upper", record.upper},
                              {"wall_ms", record.wallMs}});
    }
    return {{"model", modelPath},
            {"num_states", numStates},
            {"explored", result.explored.size()},
            {"sub_model_states", result.subModelStates},
            {"iterations", std::move(iterations)},
            {"lower", result.lower},
            {"upper", result.upper},
            {"epsilon", epsilon},
            {"time_bound", horizon},
            {"objective", toString(objective)},
            {"converged", result.converged},
            {"seed", result.seed},
            {"solver", {{"name", "discretization"}, {"steps", result.solverSteps}, {"apriori_bound", result.aprioriBound}}}};
}

int runCli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Certified time-bounded reachability for CTMDPs on simulation-selected subspaces", "subtbr"};
    app.require_subcommand(1);

    SolveFlags solve;
    auto* solveCmd = app.add_subcommand("solve", "Bound the optimal reachability probability (subspace or --full)");
    solveCmd->add_option("--model", solve.model, "Model file")->required();
    solveCmd->add_option("--time-bound", solve.timeBound, "Time bound T")->required()->check(CLI::NonNegativeNumber);
    solveCmd->add_option("--epsilon", solve.epsilon, "Target gap between lower and upper bound")->required();
    solveCmd->add_option("--objective", solve.objective, "max or min")->check(CLI::IsMember({"max", "min"}));
    solveCmd->add_option("--solver-epsilon", solve.solverEpsilon, "Discretization precision (default epsilon/10)");
    solveCmd->add_option("--nsim", solve.nsim, "Simulations per iteration")->check(CLI::PositiveNumber);
    solveCmd->add_option("--sim-scheduler", solve.simScheduler, "uniform, optimal or alternate")
        ->check(CLI::IsMember({"uniform", "optimal", "alternate"}));
    solveCmd->add_option("--seed", solve.seed, "Master seed");
    solveCmd->add_option("--max-iterations", solve.maxIterations, "Iteration safeguard")->check(CLI::PositiveNumber);
    solveCmd->add_option("--step-cap", solve.stepCap, "Maximal number of discretization steps")->check(CLI::PositiveNumber);
    solveCmd->add_option("--threads", solve.threads, "Cap on intra-iteration parallelism")->check(CLI::PositiveNumber);
    solveCmd->add_flag("--full", solve.full, "Solve the whole model instead of running the subspace loop");
    solveCmd->add_option("--emit-scheduler", solve.emitScheduler, "Write the extended scheduler as JSON");
    solveCmd->add_option("--output", solve.output, "Write the result document here instead of stdout");

    GenerateFlags generate;
    auto* generateCmd = app.add_subcommand("generate", "Write a benchmark model");
    generateCmd->add_option("family", generate.family, "erlang, twochain or polling")
        ->required()
        ->check(CLI::IsMember({"erlang", "twochain", "polling"}));
    generateCmd->add_option("--out", generate.out, "Output model file")->required();
    generateCmd->add_option("--k", generate.k, "Erlang chain length / polling queue capacity");
    generateCmd->add_option("--r", generate.r, "Erlang stage rate");
    generateCmd->add_option("--fast-rate", generate.fastRate, "Erlang fast-path exit rate");
    generateCmd->add_option("--fast-success", generate.fastSuccess, "Erlang fast-path success probability");
    generateCmd->add_option("--variant", generate.variant, "twochain variant: a or b");
    generateCmd->add_option("--j", generate.j, "Polling stations");
    generateCmd->add_option("--goal", generate.goal, "Polling goal: all or one");
    generateCmd->add_option("--arrival", generate.arrival, "Polling arrival rate");
    generateCmd->add_option("--service", generate.service, "Polling service rate");
    generateCmd->add_option("--success", generate.success, "Polling service success probability");

    GreedyFlags greedy;
    auto* greedyCmd = app.add_subcommand("greedy", "Greedy search for a small relevant subset");
    greedyCmd->add_option("--model", greedy.model, "Model file")->required();
    greedyCmd->add_option("--time-bound", greedy.timeBound, "Time bound T")->required()->check(CLI::NonNegativeNumber);
    greedyCmd->add_option("--epsilon", greedy.epsilon, "Gap budget")->required()->check(CLI::PositiveNumber);
    greedyCmd->add_option("--solver-epsilon", greedy.solverEpsilon, "Discretization precision (default epsilon/10)");
    greedyCmd->add_option("--step-cap", greedy.stepCap, "Maximal number of discretization steps")->check(CLI::PositiveNumber);
    greedyCmd->add_option("--output", greedy.output, "Write the result here instead of stdout");

    EvaluateFlags evaluate;
    auto* evaluateCmd = app.add_subcommand("evaluate", "Value of a scheduler file on a model");
    evaluateCmd->add_option("--model", evaluate.model, "Model file")->required();
    evaluateCmd->add_option("--scheduler", evaluate.scheduler, "Scheduler JSON file")->required();
    evaluateCmd->add_option("--time-bound", evaluate.timeBound, "Time bound T")->required()->check(CLI::NonNegativeNumber);
    evaluateCmd->add_option("--solver-epsilon", evaluate.solverEpsilon, "Discretization precision");
    evaluateCmd->add_option("--step-cap", evaluate.stepCap, "Maximal number of discretization steps")->check(CLI::PositiveNumber);
    evaluateCmd->add_option("--output", evaluate.output, "Write the result here instead of stdout");

    std::vector<char const*> argv{"subtbr"};
    for (auto const& arg : args) {
        argv.push_back(arg.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return kExitConverged;
    } catch (CLI::ParseError const& e) {
        err << "error: " << e.what() << "\n";
        auto const* failing = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << failing->help();
        return kExitUsage;
    }

    try {
        if (solveCmd->parsed()) {
            return runSolve(solve, out);
        }
        if (generateCmd->parsed()) {
            return runGenerate(generate, out);
        }
        if (greedyCmd->parsed()) {
            return runGreedy(greedy, out);
        }
        return runEvaluate(evaluate, out);
    } catch (std::exception const& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace subtbr
