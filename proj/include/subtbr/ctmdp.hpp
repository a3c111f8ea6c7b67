#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace subtbr {

using StateId = std::uint32_t;

/// Thrown when a model description violates the CTMDP well-formedness rules.
class ModelError : public std::runtime_error {
   public:
    explicit ModelError(std::string const& message, std::vector<std::string> violations = {})
        : std::runtime_error(message), violations_(std::move(violations)) {}

    std::vector<std::string> const& violations() const {
        return violations_;
    }

   private:
    std::vector<std::string> violations_;
};

struct TransitionRecord {
    StateId source;
    std::string action;
    StateId target;
    double rate;
};

/// Unchecked, order-preserving description of a CTMDP. Everything that builds a model
/// (parser, generators, sub-model constructions) goes through this type.
struct ModelDescription {
    std::size_t numStates = 0;
    StateId initial = 0;
    std::vector<StateId> goals;
    std::vector<TransitionRecord> transitions;
};

/// Returns one human-readable message per violated invariant; empty means valid.
std::vector<std::string> validate(ModelDescription const& description);

struct BranchEntry {
    StateId target;
    double probability;
};

/// Immutable sparse CTMDP.
///
/// Actions of a state are indexed ("choices") in lexicographic byte order of their labels;
/// transitions of a choice are sorted by target id. Exit rates and the maximal exit rate are
/// computed once at construction.
class Ctmdp {
   public:
    /// Validates and builds. Throws ModelError carrying every violation.
    explicit Ctmdp(ModelDescription const& description);

    std::size_t numStates() const {
        return numStates_;
    }
    StateId initial() const {
        return initial_;
    }
    bool isGoal(StateId s) const {
        return goal_[s] != 0;
    }
    std::vector<StateId> goals() const;
    std::size_t numChoices() const {
        return choiceLabel_.size();
    }
    std::size_t numTransitions() const {
        return transTarget_.size();
    }

    /// Global choice indices of state s are [choiceBegin(s), choiceEnd(s)).
    std::size_t choiceBegin(StateId s) const {
        return stateChoiceBegin_[s];
    }
    std::size_t choiceEnd(StateId s) const {
        return stateChoiceBegin_[s + 1];
    }
    std::size_t numEnabled(StateId s) const {
        return choiceEnd(s) - choiceBegin(s);
    }
    std::string const& choiceLabel(std::size_t choice) const {
        return choiceLabel_[choice];
    }
    double choiceExitRate(std::size_t choice) const {
        return choiceExitRate_[choice];
    }
    std::span<StateId const> choiceTargets(std::size_t choice) const {
        return {transTarget_.data() + choiceTransBegin_[choice], choiceTransBegin_[choice + 1] - choiceTransBegin_[choice]};
    }
    std::span<double const> choiceRates(std::size_t choice) const {
        return {transRate_.data() + choiceTransBegin_[choice], choiceTransBegin_[choice + 1] - choiceTransBegin_[choice]};
    }

    /// Global choice index of `action` in state s, or throws ModelError("action not enabled").
    std::size_t findChoice(StateId s, std::string const& action) const;
    /// Same, but returns choiceEnd(s) if the action is not enabled.
    std::size_t lookupChoice(StateId s, std::string const& action) const;

    std::vector<std::string> enabledActions(StateId s) const;

    double exitRate(StateId s, std::string const& action) const;
    std::vector<BranchEntry> branchDistribution(StateId s, std::string const& action) const;
    double maxExitRate() const {
        return maxExitRate_;
    }

    /// All states s' with a positive rate from s under some action.
    std::vector<StateId> successors(StateId s) const;

    /// Converts back to a description (canonical order).
    ModelDescription describe() const;

    friend bool operator==(Ctmdp const& lhs, Ctmdp const& rhs);

   private:
    std::size_t numStates_;
    StateId initial_;
    std::vector<char> goal_;
    std::vector<std::size_t> stateChoiceBegin_;
    std::vector<std::string> choiceLabel_;
    std::vector<double> choiceExitRate_;
    std::vector<std::size_t> choiceTransBegin_;
    std::vector<StateId> transTarget_;
    std::vector<double> transRate_;
    double maxExitRate_ = 0.0;
};

/// Replaces the actions of every goal state by one self-loop of rate maxExitRate().
/// The loop keeps the lexicographically smallest original label.
Ctmdp makeGoalsAbsorbing(Ctmdp const& model);

/// States reachable from the initial state (including it), as a membership mask.
std::vector<char> reachableFromInitial(Ctmdp const& model);

/// States from which some goal state is reachable in the transition graph (goals included).
std::vector<char> canReachGoal(Ctmdp const& model);

}  // namespace subtbr
