#include "subtbr/generators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace subtbr {

namespace {

void requirePositive(double value, char const* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument(std::string(name) + " must be a positive finite number");
    }
}

}  // namespace

Ctmdp makeErlangModel(std::size_t k, double stageRate, double fastRate, double fastSuccess) {
    if (k < 1) {
        throw std::invalid_argument("erlang chain length k must be >= 1");
    }
    if (k > std::numeric_limits<StateId>::max() - 3) {
        throw std::invalid_argument("erlang chain length k too large");
    }
    requirePositive(stageRate, "stage rate");
    requirePositive(fastRate, "fast rate");
    if (!(fastSuccess > 0.0 && fastSuccess < 1.0)) {
        throw std::invalid_argument("fast success probability must lie in (0,1)");
    }

    auto const goal = static_cast<StateId>(k + 1);
    auto const trap = static_cast<StateId>(k + 2);
    ModelDescription d;
    d.numStates = k + 3;
    d.initial = 0;
    d.goals = {goal};
    d.transitions.reserve(k + 5);
    d.transitions.push_back({0, "fast", goal, fastRate * fastSuccess});
    d.transitions.push_back({0, "fast", trap, fastRate * (1.0 - fastSuccess)});
    d.transitions.push_back({0, "slow", 1, stageRate});
    for (StateId stage = 1; stage <= k; ++stage) {
        d.transitions.push_back({stage, "next", stage + 1, stageRate});
    }
    d.transitions.push_back({goal, "loop", goal, 1.0});
    d.transitions.push_back({trap, "loop", trap, 1.0});
    return Ctmdp(d);
}

Ctmdp makeTwoChainModel(TwoChainVariant variant) {
    constexpr double kSlowLeft = 0.51;
    constexpr double kFastLeft = 175.0;
    constexpr double kRight = 0.5;
    constexpr StateId kLeftSlowStages = 2;
    constexpr StateId kLeftFastStages = 11;
    StateId const rightStages = variant == TwoChainVariant::A ? 3 : 13;

    StateId const firstFast = 1 + kLeftSlowStages;
    StateId const firstRight = firstFast + kLeftFastStages;
    StateId const goal = firstRight + rightStages;

    ModelDescription d;
    d.numStates = goal + 1;
    d.initial = 0;
    d.goals = {goal};

    d.transitions.push_back({0, "alpha", 1, kSlowLeft});
    for (StateId s = 1; s < goal && s < firstRight; ++s) {
        StateId const next = s + 1 == firstRight ? goal : s + 1;
        d.transitions.push_back({s, "tau", next, s < firstFast ? kSlowLeft : kFastLeft});
    }
    d.transitions.push_back({0, "beta", firstRight, kRight});
    for (StateId s = firstRight; s < goal; ++s) {
        d.transitions.push_back({s, "tau", s + 1, kRight});
    }
    d.transitions.push_back({goal, "tau", goal, 1.0});
    return Ctmdp(d);
}

Ctmdp makePollingModel(std::size_t stations, std::size_t capacity, PollingGoal goal, double arrivalRate, double serviceRate,
                       double serviceSuccess) {
    if (stations < 1 || capacity < 1) {
        throw std::invalid_argument("polling system needs at least one station and capacity >= 1");
    }
    requirePositive(arrivalRate, "arrival rate");
    requirePositive(serviceRate, "service rate");
    if (!(serviceSuccess > 0.0 && serviceSuccess <= 1.0)) {
        throw std::invalid_argument("service success probability must lie in (0,1]");
    }
    auto const radix = capacity + 1;
    std::size_t numStates = 1;
    for (std::size_t i = 0; i < stations; ++i) {
        if (numStates > std::numeric_limits<StateId>::max() / radix) {
            throw std::invalid_argument("polling state space too large");
        }
        numStates *= radix;
    }

    std::vector<std::size_t> weight(stations);
    for (std::size_t i = 0, w = 1; i < stations; ++i, w *= radix) {
        weight[i] = w;
    }

    ModelDescription d;
    d.numStates = numStates;
    d.initial = 0;
    for (std::size_t i = 0; i < stations; ++i) {
        d.initial += static_cast<StateId>((capacity - 1) * weight[i]);
    }

    std::vector<std::size_t> queue(stations, 0);
    for (std::size_t s = 0; s < numStates; ++s) {
        for (std::size_t i = 0, rest = s; i < stations; ++i, rest /= radix) {
            queue[i] = rest % radix;
        }
        auto const id = static_cast<StateId>(s);
        bool anyEmpty = false;
        bool allEmpty = true;
        for (auto q : queue) {
            anyEmpty = anyEmpty || q == 0;
            allEmpty = allEmpty && q == 0;
        }
        if (goal == PollingGoal::All ? allEmpty : anyEmpty) {
            d.goals.push_back(id);
        }

        auto addArrivals = [&](std::string const& label) {
            for (std::size_t m = 0; m < stations; ++m) {
                if (queue[m] < capacity) {
                    d.transitions.push_back({id, label, static_cast<StateId>(s + weight[m]), arrivalRate});
                }
            }
        };
        if (allEmpty) {
            addArrivals("idle");
            continue;
        }
        for (std::size_t i = 0; i < stations; ++i) {
            if (queue[i] == 0) {
                continue;
            }
            auto const label = "serve_" + std::to_string(i + 1);
            addArrivals(label);
            d.transitions.push_back({id, label, static_cast<StateId>(s - weight[i]), serviceRate * serviceSuccess});
            if (serviceSuccess < 1.0) {
                d.transitions.push_back({id, label, id, serviceRate * (1.0 - serviceSuccess)});
            }
        }
    }
    return Ctmdp(d);
}

}  // namespace subtbr
