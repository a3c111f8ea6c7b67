#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subtbr/ctmdp.hpp"

namespace subtbr {

enum class Objective { Maximize, Minimize };

std::string toString(Objective objective);
Objective parseObjective(std::string const& text);

/// Deterministic scheduler that is piecewise constant in the remaining time.
///
/// Step i (1-based) covers remaining time in ((i-1)*delta, i*delta]. Decisions are stored as
/// change points per state: the action at step i is the one recorded at the greatest step <= i.
/// States without any change point use the lexicographically smallest enabled action.
struct StepScheduler {
    struct ChangePoint {
        std::uint64_t step;
        std::string action;

        friend bool operator==(ChangePoint const&, ChangePoint const&) = default;
    };

    double delta = 0.0;
    std::uint64_t numSteps = 0;
    Objective objective = Objective::Maximize;
    std::map<StateId, std::vector<ChangePoint>> decisions;

    double horizon() const {
        return delta * static_cast<double>(numSteps);
    }

    /// Step index for a given remaining time: clamp(ceil(r/delta), 1, N); 0 when r <= 0 or N = 0.
    std::uint64_t stepForRemaining(double remaining) const;

    /// Recorded action at (state, step), or nullopt if the fallback applies.
    std::optional<std::string> recorded(StateId s, std::uint64_t step) const;

    /// Action to take in `s` with `remaining` time left, fallback included.
    std::string const& actionAt(Ctmdp const& model, StateId s, double remaining) const;

    /// Throws ModelError if some recorded action is not enabled in `model`.
    void checkAgainst(Ctmdp const& model) const;

    friend bool operator==(StepScheduler const&, StepScheduler const&) = default;
};

nlohmann::json toJson(StepScheduler const& scheduler);
StepScheduler schedulerFromJson(nlohmann::json const& document);

void writeSchedulerFile(StepScheduler const& scheduler, std::string const& path);
StepScheduler readSchedulerFile(std::string const& path);

}  // namespace subtbr
