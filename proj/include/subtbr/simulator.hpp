#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "subtbr/ctmdp.hpp"
#include "subtbr/scheduler.hpp"

namespace subtbr {

/// Reproducible random stream: SplitMix64 over a 64-bit counter, seeded with
/// mix(masterSeed, streamIndex). Output is stable across platforms and releases.
class RngStream {
   public:
    RngStream(std::uint64_t masterSeed, std::uint64_t streamIndex);

    std::uint64_t next();
    /// Uniform double in [0,1) with 53 random bits.
    double uniform();

   private:
    std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t value);

struct TimedPath {
    std::vector<StateId> states;
    std::vector<std::string> actions;
    std::vector<double> sojourns;
    double totalTime = 0.0;
};

/// Scheduler that drives simulations.
class SimScheduler {
   public:
    enum class Kind { Uniform, StepGuided };

    static SimScheduler uniform();
    /// Deterministic: looks up `scheduler` at the elapsed time of the path.
    static SimScheduler guided(StepScheduler scheduler, double horizon);

    Kind kind() const {
        return kind_;
    }
    StepScheduler const* guide() const {
        return guide_.get();
    }

    /// Global choice index in `model` for state s at elapsed time t.
    std::size_t choose(Ctmdp const& model, StateId s, double elapsed, RngStream& rng) const;

   private:
    Kind kind_ = Kind::Uniform;
    std::shared_ptr<StepScheduler const> guide_;
    double horizon_ = 0.0;
};

/// Samples one path from the initial state until a goal is entered or the elapsed time reaches
/// `horizon`. Jumps that would happen after the bound are not taken; totalTime is then horizon.
TimedPath samplePath(Ctmdp const& model, double horizon, SimScheduler const& scheduler, RngStream& rng);

/// Union of the states of `runs` sampled paths; run i uses stream firstStream + i.
std::set<StateId> relevantSubset(Ctmdp const& model, double horizon, SimScheduler const& scheduler, std::uint64_t runs,
                                 std::uint64_t masterSeed, std::uint64_t firstStream = 0);

}  // namespace subtbr
