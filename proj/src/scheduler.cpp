#include "subtbr/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace subtbr {

std::string toString(Objective objective) {
    return objective == Objective::Maximize ? "max" : "min";
}

Objective parseObjective(std::string const& text) {
    if (text == "max") {
        return Objective::Maximize;
    }
    if (text == "min") {
        return Objective::Minimize;
    }
    throw std::invalid_argument("unknown objective '" + text + "' (expected max or min)");
}

std::uint64_t StepScheduler::stepForRemaining(double remaining) const {
    if (numSteps == 0 || !(remaining > 0.0)) {
        return 0;
    }
    auto const raw = std::ceil(remaining / delta);
    if (raw >= static_cast<double>(numSteps)) {
        return numSteps;
    }
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(raw));
}

std::optional<std::string> StepScheduler::recorded(StateId s, std::uint64_t step) const {
    auto it = decisions.find(s);
    if (it == decisions.end() || step == 0) {
        return std::nullopt;
    }
    auto const& points = it->second;
    auto upper = std::upper_bound(points.begin(), points.end(), step, [](std::uint64_t v, ChangePoint const& p) { return v < p.step; });
    if (upper == points.begin()) {
        return std::nullopt;
    }
    return std::prev(upper)->action;
}

std::string const& StepScheduler::actionAt(Ctmdp const& model, StateId s, double remaining) const {
    auto const step = stepForRemaining(remaining);
    auto it = decisions.find(s);
    if (step != 0 && it != decisions.end()) {
        auto const& points = it->second;
        auto upper =
            std::upper_bound(points.begin(), points.end(), step, [](std::uint64_t v, ChangePoint const& p) { return v < p.step; });
        if (upper != points.begin()) {
            auto const choice = model.lookupChoice(s, std::prev(upper)->action);
            if (choice != model.choiceEnd(s)) {
                return model.choiceLabel(choice);
            }
        }
    }
    return model.choiceLabel(model.choiceBegin(s));
}

void StepScheduler::checkAgainst(Ctmdp const& model) const {
    for (auto const& [state, points] : decisions) {
        if (state >= model.numStates()) {
            throw ModelError("scheduler refers to state " + std::to_string(state) + " outside the model");
        }
        for (auto const& point : points) {
            model.findChoice(state, point.action);
        }
    }
}

nlohmann::json toJson(StepScheduler const& scheduler) {
    // Regroup change points by step for the on-disk layout.
    std::map<std::uint64_t, std::map<StateId, std::string>> byStep;
    for (auto const& [state, points] : scheduler.decisions) {
        for (auto const& point : points) {
            byStep[point.step][state] = point.action;
        }
    }
    nlohmann::json decisions = nlohmann::json::object();
    for (auto const& [step, entries] : byStep) {
        nlohmann::json row = nlohmann::json::object();
        for (auto const& [state, action] : entries) {
            row[std::to_string(state)] = action;
        }
        decisions[std::to_string(step)] = std::move(row);
    }
    return {{"delta", scheduler.delta},
            {"num_steps", scheduler.numSteps},
            {"objective", toString(scheduler.objective)},
            {"decisions", std::move(decisions)},
            {"fallback", "lex-min"}};
}

namespace {

std::uint64_t parseIndex(std::string const& text, char const* what) {
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
        value = std::stoull(text, &used);
    } catch (std::exception const&) {
        used = 0;
    }
    if (used != text.size() || text.empty() || text.front() == '-' || text.front() == '+') {
        throw std::invalid_argument(std::string("invalid ") + what + " key '" + text + "' in scheduler file");
    }
    return value;
}

}  // namespace

StepScheduler schedulerFromJson(nlohmann::json const& document) {
    StepScheduler scheduler;
    try {
        scheduler.delta = document.at("delta").get<double>();
        scheduler.numSteps = document.at("num_steps").get<std::uint64_t>();
        scheduler.objective = parseObjective(document.at("objective").get<std::string>());
        if (document.contains("fallback") && document.at("fallback").get<std::string>() != "lex-min") {
            throw std::invalid_argument("unsupported scheduler fallback rule");
        }
        if (scheduler.numSteps > 0 && !(scheduler.delta > 0.0)) {
            throw std::invalid_argument("scheduler delta must be positive");
        }
        for (auto const& [stepKey, row] : document.at("decisions").items()) {
            auto const step = parseIndex(stepKey, "step");
            if (step == 0 || step > scheduler.numSteps) {
                throw std::invalid_argument("scheduler step " + stepKey + " outside [1, num_steps]");
            }
            for (auto const& [stateKey, action] : row.items()) {
                auto const state = parseIndex(stateKey, "state");
                scheduler.decisions[static_cast<StateId>(state)].push_back({step, action.get<std::string>()});
            }
        }
    } catch (nlohmann::json::exception const& e) {
        throw std::invalid_argument(std::string("malformed scheduler file: ") + e.what());
    }
    for (auto& [state, points] : scheduler.decisions) {
        std::sort(points.begin(), points.end(), [](auto const& a, auto const& b) { return a.step < b.step; });
    }
    return scheduler;
}

void writeSchedulerFile(StepScheduler const& scheduler, std::string const& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write scheduler file '" + path + "'");
    }
    out << toJson(scheduler).dump() << '\n';
}

StepScheduler readSchedulerFile(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open scheduler file '" + path + "'");
    }
    nlohmann::json document;
    try {
        in >> document;
    } catch (nlohmann::json::exception const& e) {
        throw std::invalid_argument(std::string("malformed scheduler file: ") + e.what());
    }
    return schedulerFromJson(document);
}

}  // namespace subtbr
