#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "subtbr/ctmdp.hpp"
#include "subtbr/scheduler.hpp"

namespace subtbr {

inline constexpr std::uint64_t kDefaultStepCap = 500'000'000;

/// Raised when the requested solver precision would need more steps than the cap allows.
class PrecisionUnattainable : public std::runtime_error {
   public:
    PrecisionUnattainable(std::uint64_t required, std::uint64_t cap)
        : std::runtime_error("precision unattainable: " + std::to_string(required) + " steps required, cap is " + std::to_string(cap)),
          required_(required) {}

    std::uint64_t required() const {
        return required_;
    }

   private:
    std::uint64_t required_;
};

struct SolverOptions {
    std::uint64_t stepCap = kDefaultStepCap;
    /// Skip states unreachable from the initial state. Their entries in SolveOutcome::values are
    /// then only the goal indicator, and the scheduler has no decisions for them.
    bool initialOnly = false;
    bool recordScheduler = true;
};

/// Number of discretization steps N = ceil((maxRate*T)^2 / (2*precision)), at least 1.
std::uint64_t stepCount(double maxRate, double horizon, double precision, std::uint64_t cap = kDefaultStepCap);

/// Worst-case gap (maxRate*T)^2 / (2N) between the discretized value and the true value.
double aprioriBound(double maxRate, double horizon, std::uint64_t steps);

/// Smallest precision attainable within `cap` steps.
double minimalPrecision(double maxRate, double horizon, std::uint64_t cap = kDefaultStepCap);

struct SolveOutcome {
    std::vector<double> values;
    double valueAtInitial = 0.0;
    double aprioriBound = 0.0;
    std::uint64_t numSteps = 0;
    StepScheduler scheduler;
    /// Value of each enabled action at the initial state with the full horizon remaining.
    std::vector<std::pair<std::string, double>> initialActionValues;
};

/// Optimal time-bounded reachability by backward discretized value iteration.
///
/// With delta = T/N and v^0 = goal indicator, each step computes for non-goal states
///     v^i(s) = opt_a [ (1 - e^{-E(s,a) delta}) * sum_s' P(s,a,s') v^{i-1}(s') + e^{-E(s,a) delta} v^{i-1}(s) ].
/// For maximization v^N(s) <= val(s,T) <= v^N(s) + aprioriBound.
SolveOutcome solveTbr(Ctmdp const& model, double horizon, Objective objective, double precision, SolverOptions const& options = {});

/// Value at the initial state of following `scheduler` on `model`, using the same recursion
/// on the grid selected by `precision`. Scheduler steps are looked up by remaining time when
/// the grids differ.
double evaluateScheduler(Ctmdp const& model, StepScheduler const& scheduler, double horizon, double precision,
                         SolverOptions const& options = {});

}  // namespace subtbr
