#include "subtbr/ctmdp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

namespace subtbr {

namespace {

bool isValidLabel(std::string const& label) {
    if (label.empty()) {
        return false;
    }
    return std::none_of(label.begin(), label.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

std::vector<std::string> validate(ModelDescription const& description) {
    std::vector<std::string> violations;
    auto const n = description.numStates;
    if (n == 0) {
        violations.emplace_back("model has no states");
        return violations;
    }
    if (description.initial >= n) {
        violations.push_back("initial state " + std::to_string(description.initial) + " out of range");
    }
    std::set<StateId> seenGoals;
    for (StateId g : description.goals) {
        if (g >= n) {
            violations.push_back("goal state " + std::to_string(g) + " out of range");
        } else if (!seenGoals.insert(g).second) {
            violations.push_back("goal state " + std::to_string(g) + " listed twice");
        }
    }

    std::vector<char> hasAction(n, 0);
    std::set<std::tuple<StateId, std::string, StateId>> seen;
    for (auto const& t : description.transitions) {
        std::string const where = "transition " + std::to_string(t.source) + " " + t.action + " " + std::to_string(t.target);
        bool inRange = true;
        if (t.source >= n) {
            violations.push_back(where + ": source state out of range");
            inRange = false;
        }
        if (t.target >= n) {
            violations.push_back(where + ": target state out of range");
            inRange = false;
        }
        if (!isValidLabel(t.action)) {
            violations.push_back(where + ": invalid action label");
        }
        if (!(t.rate > 0.0) || !std::isfinite(t.rate)) {
            violations.push_back(where + ": non-positive rate");
        }
        if (!seen.emplace(t.source, t.action, t.target).second) {
            violations.push_back(where + ": duplicate transition");
        }
        if (inRange) {
            hasAction[t.source] = 1;
        }
    }
    for (std::size_t s = 0; s < n; ++s) {
        if (!hasAction[s]) {
            violations.push_back("state " + std::to_string(s) + " has no enabled action");
        }
    }
    return violations;
}

Ctmdp::Ctmdp(ModelDescription const& description) {
    auto violations = validate(description);
    if (!violations.empty()) {
        std::string message = "invalid model: " + violations.front();
        if (violations.size() > 1) {
            message += " (and " + std::to_string(violations.size() - 1) + " more)";
        }
        throw ModelError(message, std::move(violations));
    }

    numStates_ = description.numStates;
    initial_ = description.initial;
    goal_.assign(numStates_, 0);
    for (StateId g : description.goals) {
        goal_[g] = 1;
    }

    // (source, label) -> [(target, rate)], ordered lexicographically by label bytes.
    std::map<std::pair<StateId, std::string>, std::vector<std::pair<StateId, double>>> grouped;
    for (auto const& t : description.transitions) {
        grouped[{t.source, t.action}].emplace_back(t.target, t.rate);
    }

    stateChoiceBegin_.assign(numStates_ + 1, 0);
    choiceTransBegin_.push_back(0);
    for (auto& [key, entries] : grouped) {
        std::sort(entries.begin(), entries.end(), [](auto const& a, auto const& b) { return a.first < b.first; });
        double exit = 0.0;
        for (auto const& [target, rate] : entries) {
            transTarget_.push_back(target);
            transRate_.push_back(rate);
            exit += rate;
        }
        choiceLabel_.push_back(key.second);
        choiceExitRate_.push_back(exit);
        choiceTransBegin_.push_back(transTarget_.size());
        ++stateChoiceBegin_[key.first + 1];
        maxExitRate_ = std::max(maxExitRate_, exit);
    }
    std::partial_sum(stateChoiceBegin_.begin(), stateChoiceBegin_.end(), stateChoiceBegin_.begin());
}

std::vector<StateId> Ctmdp::goals() const {
    std::vector<StateId> result;
    for (StateId s = 0; s < numStates_; ++s) {
        if (goal_[s]) {
            result.push_back(s);
        }
    }
    return result;
}

std::size_t Ctmdp::lookupChoice(StateId s, std::string const& action) const {
    if (s >= numStates_) {
        return 0;
    }
    auto const begin = choiceLabel_.begin() + static_cast<std::ptrdiff_t>(choiceBegin(s));
    auto const end = choiceLabel_.begin() + static_cast<std::ptrdiff_t>(choiceEnd(s));
    auto it = std::lower_bound(begin, end, action);
    if (it == end || *it != action) {
        return choiceEnd(s);
    }
    return static_cast<std::size_t>(it - choiceLabel_.begin());
}

std::size_t Ctmdp::findChoice(StateId s, std::string const& action) const {
    if (s >= numStates_) {
        throw ModelError("state " + std::to_string(s) + " out of range");
    }
    auto const choice = lookupChoice(s, action);
    if (choice == choiceEnd(s)) {
        throw ModelError("action not enabled: state " + std::to_string(s) + " action " + action);
    }
    return choice;
}

std::vector<std::string> Ctmdp::enabledActions(StateId s) const {
    return {choiceLabel_.begin() + static_cast<std::ptrdiff_t>(choiceBegin(s)),
            choiceLabel_.begin() + static_cast<std::ptrdiff_t>(choiceEnd(s))};
}

double Ctmdp::exitRate(StateId s, std::string const& action) const {
    return choiceExitRate_[findChoice(s, action)];
}

std::vector<BranchEntry> Ctmdp::branchDistribution(StateId s, std::string const& action) const {
    auto const choice = findChoice(s, action);
    auto const exit = choiceExitRate_[choice];
    auto const targets = choiceTargets(choice);
    auto const rates = choiceRates(choice);
    std::vector<BranchEntry> result;
    result.reserve(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        result.push_back({targets[i], rates[i] / exit});
    }
    return result;
}

std::vector<StateId> Ctmdp::successors(StateId s) const {
    std::vector<StateId> result;
    for (auto c = choiceBegin(s); c < choiceEnd(s); ++c) {
        auto const targets = choiceTargets(c);
        result.insert(result.end(), targets.begin(), targets.end());
    }
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

ModelDescription Ctmdp::describe() const {
    ModelDescription d;
    d.numStates = numStates_;
    d.initial = initial_;
    d.goals = goals();
    d.transitions.reserve(numTransitions());
    for (StateId s = 0; s < numStates_; ++s) {
        for (auto c = choiceBegin(s); c < choiceEnd(s); ++c) {
            auto const targets = choiceTargets(c);
            auto const rates = choiceRates(c);
            for (std::size_t i = 0; i < targets.size(); ++i) {
                d.transitions.push_back({s, choiceLabel_[c], targets[i], rates[i]});
            }
        }
    }
    return d;
}

bool operator==(Ctmdp const& lhs, Ctmdp const& rhs) {
    return lhs.numStates_ == rhs.numStates_ && lhs.initial_ == rhs.initial_ && lhs.goal_ == rhs.goal_ &&
           lhs.stateChoiceBegin_ == rhs.stateChoiceBegin_ && lhs.choiceLabel_ == rhs.choiceLabel_ &&
           lhs.choiceTransBegin_ == rhs.choiceTransBegin_ && lhs.transTarget_ == rhs.transTarget_ && lhs.transRate_ == rhs.transRate_;
}

Ctmdp makeGoalsAbsorbing(Ctmdp const& model) {
    auto d = model.describe();
    auto const rate = model.maxExitRate();
    std::vector<TransitionRecord> kept;
    kept.reserve(d.transitions.size());
    for (auto& t : d.transitions) {
        if (!model.isGoal(t.source)) {
            kept.push_back(std::move(t));
        }
    }
    for (StateId g : d.goals) {
        kept.push_back({g, model.choiceLabel(model.choiceBegin(g)), g, rate});
    }
    d.transitions = std::move(kept);
    return Ctmdp(d);
}

std::vector<char> reachableFromInitial(Ctmdp const& model) {
    std::vector<char> seen(model.numStates(), 0);
    std::deque<StateId> queue{model.initial()};
    seen[model.initial()] = 1;
    while (!queue.empty()) {
        auto const s = queue.front();
        queue.pop_front();
        for (auto c = model.choiceBegin(s); c < model.choiceEnd(s); ++c) {
            for (StateId t : model.choiceTargets(c)) {
                if (!seen[t]) {
                    seen[t] = 1;
                    queue.push_back(t);
                }
            }
        }
    }
    return seen;
}

std::vector<char> canReachGoal(Ctmdp const& model) {
    auto const n = model.numStates();
    std::vector<std::vector<StateId>> predecessors(n);
    for (StateId s = 0; s < n; ++s) {
        for (StateId t : model.successors(s)) {
            predecessors[t].push_back(s);
        }
    }
    std::vector<char> seen(n, 0);
    std::deque<StateId> queue;
    for (StateId g : model.goals()) {
        seen[g] = 1;
        queue.push_back(g);
    }
    while (!queue.empty()) {
        auto const s = queue.front();
        queue.pop_front();
        for (StateId p : predecessors[s]) {
            if (!seen[p]) {
                seen[p] = 1;
                queue.push_back(p);
            }
        }
    }
    return seen;
}

}  // namespace subtbr
