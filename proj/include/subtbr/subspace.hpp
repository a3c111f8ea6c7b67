#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "subtbr/ctmdp.hpp"
#include "subtbr/scheduler.hpp"
#include "subtbr/simulator.hpp"
#include "subtbr/solver.hpp"

namespace subtbr {

/// Pessimistic and optimistic sub-models over S~ = S' ∪ Succ(S').
///
/// Both share the state space and rates: states of S' keep their transitions, fringe states
/// (S~ \ S') get one self-loop of the original maximal exit rate per originally enabled action.
/// The lower model keeps the goals G ∩ S~; the upper model additionally makes the fringe goal.
/// Sub-model state i corresponds to original state originalOf[i] (ascending).
struct SubModelPair {
    Ctmdp lower;
    Ctmdp upper;
    std::vector<StateId> originalOf;
    std::vector<char> explored;

    std::size_t numFringe() const;
};

SubModelPair buildSubModelPair(Ctmdp const& model, std::set<StateId> const& subset);
Ctmdp lowerSub(Ctmdp const& model, std::set<StateId> const& subset);
Ctmdp upperSub(Ctmdp const& model, std::set<StateId> const& subset);

enum class GuidePolicy { Uniform, Optimal, Alternate };

std::string toString(GuidePolicy policy);
GuidePolicy parseGuidePolicy(std::string const& text);

/// `guide` is the last guiding solve's scheduler already expressed in original state ids;
/// absent before the first solve. Iterations are 1-based.
SimScheduler chooseScheduler(GuidePolicy policy, std::uint64_t iteration, std::optional<StepScheduler> const& guide, double horizon);

/// Re-keys a sub-model scheduler to original ids; decisions of states outside `keep` (when
/// given) are dropped so that they resolve through the fallback.
StepScheduler remapScheduler(StepScheduler const& scheduler, std::vector<StateId> const& originalOf,
                             std::vector<char> const* keep = nullptr);

/// Lifts the lower sub-model's optimal scheduler to the full model: explored states keep their
/// decisions, every other state uses the lexicographically smallest enabled action.
StepScheduler extendScheduler(StepScheduler const& lowerScheduler, SubModelPair const& pair);

struct SubspaceConfig {
    double epsilon = 0.01;
    /// Defaults to epsilon / 10.
    std::optional<double> solverEpsilon;
    std::uint64_t simulationsPerIteration = 1000;
    GuidePolicy guide = GuidePolicy::Uniform;
    Objective objective = Objective::Maximize;
    std::uint64_t masterSeed = 0;
    std::uint64_t maxIterations = 1000;
    std::uint64_t stepCap = kDefaultStepCap;

    double effectiveSolverEpsilon() const {
        return solverEpsilon.value_or(epsilon / 10.0);
    }
    /// Throws std::invalid_argument on out-of-domain parameters.
    void check() const;
};

struct IterationRecord {
    std::uint64_t iteration;
    std::size_t explored;
    double lower;
    double upper;
    double wallMs;
};

struct SubspaceResult {
    double lower = 0.0;
    double upper = 1.0;
    bool converged = false;
    std::set<StateId> explored;
    std::vector<IterationRecord> iterations;
    StepScheduler scheduler;
    std::uint64_t seed = 0;
    std::uint64_t solverSteps = 0;
    double aprioriBound = 0.0;
    std::size_t subModelStates = 0;
};

/// Iteratively grows a simulation-selected subset S' until the lower/upper sub-model values
/// are closer than epsilon. Non-convergence within maxIterations is reported, not thrown.
SubspaceResult subspaceTbr(Ctmdp const& model, double horizon, SubspaceConfig const& config);

}  // namespace subtbr
