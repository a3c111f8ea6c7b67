#include "subtbr/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

namespace subtbr {

namespace {

struct Token {
    std::string_view text;
    std::size_t column;
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        auto const start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ++i;
        }
        if (i > start) {
            tokens.push_back({line.substr(start, i - start), start + 1});
        }
    }
    return tokens;
}

class LineParser {
   public:
    LineParser(std::size_t lineNo, std::vector<Token> tokens) : lineNo_(lineNo), tokens_(std::move(tokens)) {}

    [[noreturn]] void fail(std::size_t index, std::string const& message) const {
        auto const column = index < tokens_.size() ? tokens_[index].column : 0;
        throw ParseError(lineNo_, column, message);
    }

    void expectCount(std::size_t count, std::string const& usage) const {
        if (tokens_.size() != count) {
            fail(std::min(count, tokens_.size()), "expected '" + usage + "'");
        }
    }

    std::uint64_t integer(std::size_t index, std::string const& what) const {
        auto const text = tokens_[index].text;
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            fail(index, "invalid " + what + " '" + std::string(text) + "'");
        }
        return value;
    }

    StateId state(std::size_t index, std::size_t numStates) const {
        auto const value = integer(index, "state id");
        if (value >= numStates) {
            fail(index, "state id " + std::to_string(value) + " out of range [0," + std::to_string(numStates) + ")");
        }
        return static_cast<StateId>(value);
    }

    double rate(std::size_t index) const {
        auto const text = tokens_[index].text;
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            fail(index, "invalid rate '" + std::string(text) + "'");
        }
        if (!(value > 0.0) || !std::isfinite(value)) {
            fail(index, "non-positive rate '" + std::string(text) + "'");
        }
        return value;
    }

    std::string_view keyword() const {
        return tokens_.front().text;
    }
    std::string_view text(std::size_t index) const {
        return tokens_[index].text;
    }
    std::size_t size() const {
        return tokens_.size();
    }
    std::size_t lineNo() const {
        return lineNo_;
    }

   private:
    std::size_t lineNo_;
    std::vector<Token> tokens_;
};

constexpr std::string_view kHeaders[] = {"ctmdp", "states", "initial", "goal"};

}  // namespace

Ctmdp parseModel(std::string_view text) {
    ModelDescription description;
    std::size_t headersSeen = 0;
    std::size_t lineNo = 0;
    std::set<std::tuple<StateId, std::string, StateId>> seen;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto const end = std::min(text.find('\n', pos), text.size());
        auto const raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++lineNo;

        auto tokens = tokenize(raw);
        if (tokens.empty() || tokens.front().text.front() == '#') {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        LineParser line(lineNo, std::move(tokens));
        auto const keyword = line.keyword();

        if (headersSeen < std::size(kHeaders)) {
            auto const expected = kHeaders[headersSeen];
            if (keyword != expected) {
                if (headersSeen == 0) {
                    line.fail(0, "expected 'ctmdp' as the first token");
                }
                line.fail(0, "missing header '" + std::string(expected) + "'");
            }
            switch (headersSeen) {
                case 0:
                    line.expectCount(1, "ctmdp");
                    break;
                case 1: {
                    line.expectCount(2, "states <N>");
                    auto const n = line.integer(1, "state count");
                    if (n == 0 || n > std::numeric_limits<StateId>::max()) {
                        line.fail(1, "state count must be in [1, 2^32)");
                    }
                    description.numStates = n;
                    break;
                }
                case 2:
                    line.expectCount(2, "initial <id>");
                    description.initial = line.state(1, description.numStates);
                    break;
                case 3:
                    for (std::size_t i = 1; i < line.size(); ++i) {
                        auto const g = line.state(i, description.numStates);
                        if (std::find(description.goals.begin(), description.goals.end(), g) != description.goals.end()) {
                            line.fail(i, "goal state " + std::to_string(g) + " listed twice");
                        }
                        description.goals.push_back(g);
                    }
                    break;
            }
            ++headersSeen;
        } else if (keyword == "transition") {
            line.expectCount(5, "transition <s> <label> <s'> <rate>");
            auto const source = line.state(1, description.numStates);
            std::string label(line.text(2));
            auto const target = line.state(3, description.numStates);
            auto const rate = line.rate(4);
            if (!seen.emplace(source, label, target).second) {
                line.fail(1, "duplicate transition " + std::to_string(source) + " " + label + " " + std::to_string(target));
            }
            description.transitions.push_back({source, std::move(label), target, rate});
        } else if (std::find(std::begin(kHeaders), std::end(kHeaders), keyword) != std::end(kHeaders)) {
            line.fail(0, "header '" + std::string(keyword) + "' repeated");
        } else {
            line.fail(0, "unknown record '" + std::string(keyword) + "'");
        }
        if (end == text.size()) {
            break;
        }
    }

    if (headersSeen < std::size(kHeaders)) {
        throw ParseError(lineNo, 0, "missing header '" + std::string(kHeaders[headersSeen]) + "'");
    }
    auto violations = validate(description);
    if (!violations.empty()) {
        throw ParseError(lineNo, 0, violations.front());
    }
    return Ctmdp(description);
}

Ctmdp readModelFile(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open model file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parseModel(buffer.str());
}

std::string formatReal(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

std::string serializeModel(Ctmdp const& model) {
    std::string out = "ctmdp\nstates " + std::to_string(model.numStates()) + "\ninitial " + std::to_string(model.initial()) + "\ngoal";
    for (StateId g : model.goals()) {
        out += ' ';
        out += std::to_string(g);
    }
    out += '\n';
    // describe() already yields (source, label, target) order.
    for (auto const& t : model.describe().transitions) {
        out += "transition ";
        out += std::to_string(t.source);
        out += ' ';
        out += t.action;
        out += ' ';
        out += std::to_string(t.target);
        out += ' ';
        out += formatReal(t.rate);
        out += '\n';
    }
    return out;
}

void writeModelFile(Ctmdp const& model, std::string const& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write model file '" + path + "'");
    }
    out << serializeModel(model);
}

}  // namespace subtbr
