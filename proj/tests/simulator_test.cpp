#include <gtest/gtest.h>

#include <cmath>

#include "models.hpp"
#include "subtbr/generators.hpp"
#include "subtbr/simulator.hpp"
#include "subtbr/solver.hpp"

namespace {

using namespace subtbr;

TEST(SimulatorTest, RngStreamsAreReproducibleAndDistinct) {
    RngStream a(42, 7);
    RngStream b(42, 7);
    RngStream c(42, 8);
    RngStream d(43, 7);
    for (int i = 0; i < 100; ++i) {
        auto const x = a.next();
        EXPECT_EQ(x, b.next());
        EXPECT_NE(x, c.next());
        EXPECT_NE(x, d.next());
    }
    RngStream u(1, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        auto const x = u.uniform();
        ASSERT_GE(x, 0.0);
        ASSERT_LT(x, 1.0);
        sum += x;
    }
    EXPECT_NEAR(0.5, sum / 100000, 5e-3);
}

TEST(SimulatorTest, PinnedStream) {
    // Part of the reproducibility contract: these values must never change.
    EXPECT_EQ(0x910a2dec89025cc1ULL, mix64(1));
    RngStream rng(0, 0);
    EXPECT_EQ(0x379c1e9f8d23af2aULL, rng.next());
    EXPECT_EQ(0x7ae62f36a0bc410eULL, rng.next());
    EXPECT_EQ(0x2fff61660c4d8b9dULL, rng.next());
    RngStream other(12345, 6);
    EXPECT_EQ(0.77925667679296828, other.uniform());
}

TEST(SimulatorTest, InitialGoalGivesEmptyPath) {
    ModelDescription d;
    d.numStates = 2;
    d.goals = {0};
    d.transitions = {{0, "a", 1, 1.0}, {1, "a", 0, 1.0}};
    RngStream rng(3, 0);
    auto const path = samplePath(Ctmdp(d), 5.0, SimScheduler::uniform(), rng);
    EXPECT_EQ(std::vector<StateId>{0}, path.states);
    EXPECT_TRUE(path.actions.empty());
    EXPECT_EQ(0.0, path.totalTime);
}

TEST(SimulatorTest, FastJumpAlwaysHits) {
    auto const model = fixtures::singleJump(1000.0);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        RngStream rng(seed, 0);
        auto const path = samplePath(model, 10.0, SimScheduler::uniform(), rng);
        ASSERT_EQ((std::vector<StateId>{0, 1}), path.states);
        EXPECT_EQ(std::vector<std::string>{"a"}, path.actions);
        EXPECT_LT(path.totalTime, 10.0);
    }
}

TEST(SimulatorTest, PathsStopAtTheBound) {
    auto const model = makeErlangModel(5, 1.0);
    for (std::uint64_t stream = 0; stream < 200; ++stream) {
        RngStream rng(11, stream);
        auto const path = samplePath(model, 0.5, SimScheduler::uniform(), rng);
        EXPECT_EQ(path.states.size(), path.actions.size() + 1);
        EXPECT_EQ(path.actions.size(), path.sojourns.size());
        EXPECT_LE(path.totalTime, 0.5);
        if (!model.isGoal(path.states.back())) {
            EXPECT_EQ(0.5, path.totalTime);
        }
    }
    EXPECT_THROW(
        [&] {
            RngStream rng(0, 0);
            samplePath(model, 0.0, SimScheduler::uniform(), rng);
        }(),
        std::invalid_argument);
}

TEST(SimulatorTest, DeterministicPaths) {
    auto const model = makePollingModel(2, 3, PollingGoal::All);
    RngStream a(5, 9);
    RngStream b(5, 9);
    auto const p = samplePath(model, 2.0, SimScheduler::uniform(), a);
    auto const q = samplePath(model, 2.0, SimScheduler::uniform(), b);
    EXPECT_EQ(p.states, q.states);
    EXPECT_EQ(p.actions, q.actions);
    EXPECT_EQ(p.sojourns, q.sojourns);
}

TEST(SimulatorTest, SojournsFollowExitRate) {
    // Mean sojourn in the initial state of a rate-4 jump is 1/4.
    auto const model = fixtures::singleJump(4.0);
    double sum = 0.0;
    int const runs = 20000;
    for (int i = 0; i < runs; ++i) {
        RngStream rng(17, static_cast<std::uint64_t>(i));
        sum += samplePath(model, 1e9, SimScheduler::uniform(), rng).sojourns.front();
    }
    EXPECT_NEAR(0.25, sum / runs, 0.01);
}

TEST(SimulatorTest, UniformChoiceIsBalanced) {
    auto const model = makeTwoChainModel(TwoChainVariant::A);
    int alpha = 0;
    int const runs = 4000;
    for (int i = 0; i < runs; ++i) {
        RngStream rng(23, static_cast<std::uint64_t>(i));
        alpha += SimScheduler::uniform().choose(model, 0, 0.0, rng) == model.choiceBegin(0) ? 1 : 0;
    }
    EXPECT_NEAR(0.5, static_cast<double>(alpha) / runs, 0.04);
}

TEST(SimulatorTest, GuidedUsesRemainingTime) {
    auto const model = makeErlangModel(2, 2.0, 10.0, 0.5);
    auto const outcome = solveTbr(model, 5.0, Objective::Maximize, 1e-2);
    auto const guided = SimScheduler::guided(outcome.scheduler, 5.0);
    EXPECT_EQ(SimScheduler::Kind::StepGuided, guided.kind());
    ASSERT_NE(nullptr, guided.guide());
    RngStream rng(0, 0);
    EXPECT_EQ(model.lookupChoice(0, "slow"), guided.choose(model, 0, 0.0, rng));
    EXPECT_EQ(model.lookupChoice(0, "fast"), guided.choose(model, 0, 4.9, rng));
    EXPECT_EQ(SimScheduler::Kind::Uniform, SimScheduler::uniform().kind());
}

TEST(SimulatorTest, RelevantSubset) {
    auto const model = makeTwoChainModel(TwoChainVariant::A);
    auto const subset = relevantSubset(model, 3.0, SimScheduler::uniform(), 1000, 1);
    EXPECT_TRUE(subset.contains(0));
    EXPECT_TRUE(subset.contains(14));
    EXPECT_TRUE(subset.contains(1));
    EXPECT_EQ(subset, relevantSubset(model, 3.0, SimScheduler::uniform(), 1000, 1));

    EXPECT_EQ(std::set<StateId>{model.initial()}, relevantSubset(model, 3.0, SimScheduler::uniform(), 0, 1));

    auto const chain = fixtures::erlangChain(30, 1e6);
    auto const all = relevantSubset(chain, 1e6, SimScheduler::uniform(), 1, 0);
    EXPECT_EQ(31ul, all.size());
}

}  // namespace
