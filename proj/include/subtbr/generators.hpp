#pragma once

#include <cstddef>

#include "subtbr/ctmdp.hpp"

namespace subtbr {

/// Erlang stages: from the initial state, `fast` races to goal/trap, `slow` enters a chain of
/// k Erlang stages of rate `stageRate` ending in the goal.
///
/// State layout: 0 = init, 1..k = stages, k+1 = goal, k+2 = trap.
Ctmdp makeErlangModel(std::size_t k, double stageRate, double fastRate = 10.0, double fastSuccess = 0.5);

enum class TwoChainVariant { A, B };

/// Two-chain examples where the optimal choice at the initial state flips once the end of the
/// fast left chain has been explored.
///
/// Variant A state layout: 0, a1 a2 (1,2), b1..b11 (3..13), c1 c2 c3 (14..16), g (17).
/// Variant B state layout: 0, d1 d2 (1,2), e1..e11 (3..13), f1..f13 (14..26), g (27).
Ctmdp makeTwoChainModel(TwoChainVariant variant);

enum class PollingGoal { All, One };

/// Polling system with j queues of capacity k and a single server. States encode queue
/// vectors in mixed radix (k+1), queue 1 least significant.
Ctmdp makePollingModel(std::size_t stations, std::size_t capacity, PollingGoal goal, double arrivalRate = 1.0,
                       double serviceRate = 4.0, double serviceSuccess = 0.9);

}  // namespace subtbr
