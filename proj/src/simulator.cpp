#include "subtbr/simulator.hpp"

#include <cmath>
#include <stdexcept>

namespace subtbr {

std::uint64_t mix64(std::uint64_t value) {
    value += 0x9e3779b97f4a7c15ULL;
    value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
    value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
    return value ^ (value >> 31);
}

RngStream::RngStream(std::uint64_t masterSeed, std::uint64_t streamIndex) : state_(mix64(masterSeed) ^ mix64(~streamIndex)) {}

std::uint64_t RngStream::next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    auto z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double RngStream::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

SimScheduler SimScheduler::uniform() {
    return {};
}

SimScheduler SimScheduler::guided(StepScheduler scheduler, double horizon) {
    SimScheduler s;
    s.kind_ = Kind::StepGuided;
    s.guide_ = std::make_shared<StepScheduler const>(std::move(scheduler));
    s.horizon_ = horizon;
    return s;
}

std::size_t SimScheduler::choose(Ctmdp const& model, StateId s, double elapsed, RngStream& rng) const {
    auto const begin = model.choiceBegin(s);
    if (kind_ == Kind::Uniform) {
        auto const n = model.numEnabled(s);
        if (n == 1) {
            return begin;
        }
        auto index = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
        return begin + std::min(index, n - 1);
    }
    return model.lookupChoice(s, guide_->actionAt(model, s, horizon_ - elapsed));
}

TimedPath samplePath(Ctmdp const& model, double horizon, SimScheduler const& scheduler, RngStream& rng) {
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("simulation time bound must be positive");
    }
    TimedPath path;
    auto s = model.initial();
    path.states.push_back(s);
    while (path.totalTime < horizon && !model.isGoal(s)) {
        auto const choice = scheduler.choose(model, s, path.totalTime, rng);
        auto const exit = model.choiceExitRate(choice);
        auto const sojourn = -std::log1p(-rng.uniform()) / exit;
        if (path.totalTime + sojourn >= horizon) {
            // Time runs out in s: the jump would happen after the bound.
            path.totalTime = horizon;
            break;
        }

        auto const targets = model.choiceTargets(choice);
        auto const rates = model.choiceRates(choice);
        auto const u = rng.uniform();
        auto next = targets.back();
        double cumulative = 0.0;
        for (std::size_t i = 0; i + 1 < targets.size(); ++i) {
            cumulative += rates[i] / exit;
            if (u < cumulative) {
                next = targets[i];
                break;
            }
        }

        path.actions.push_back(model.choiceLabel(choice));
        path.sojourns.push_back(sojourn);
        path.totalTime += sojourn;
        path.states.push_back(next);
        s = next;
    }
    return path;
}

std::set<StateId> relevantSubset(Ctmdp const& model, double horizon, SimScheduler const& scheduler, std::uint64_t runs,
                                 std::uint64_t masterSeed, std::uint64_t firstStream) {
    std::set<StateId> subset{model.initial()};
    for (std::uint64_t i = 0; i < runs; ++i) {
        RngStream rng(masterSeed, firstStream + i);
        auto const path = samplePath(model, horizon, scheduler, rng);
        subset.insert(path.states.begin(), path.states.end());
    }
    return subset;
}

}  // namespace subtbr
