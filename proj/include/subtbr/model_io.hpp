#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "subtbr/ctmdp.hpp"

namespace subtbr {

/// Parse failure with a 1-based source position. Column 0 means "whole line" or end of input.
class ParseError : public std::runtime_error {
   public:
    ParseError(std::size_t line, std::size_t column, std::string const& message)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message), line_(line), column_(column) {}

    std::size_t line() const {
        return line_;
    }
    std::size_t column() const {
        return column_;
    }

   private:
    std::size_t line_;
    std::size_t column_;
};

/// Parses the explicit CTMDP text format:
///
///     ctmdp
///     states <N>
///     initial <id>
///     goal <id>...
///     transition <s> <label> <s'> <rate>
///
/// Lines whose first non-blank character is '#' are comments.
Ctmdp parseModel(std::string_view text);

Ctmdp readModelFile(std::string const& path);

/// Canonical text: fixed header order, transitions sorted by (source, label, target),
/// rates in shortest round-trip decimal form.
std::string serializeModel(Ctmdp const& model);

void writeModelFile(Ctmdp const& model, std::string const& path);

/// Shortest decimal string that parses back to exactly `value`.
std::string formatReal(double value);

}  // namespace subtbr
