#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subtbr/subspace.hpp"

namespace subtbr {

/// Process exit codes of the command-line front end.
inline constexpr int kExitConverged = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotConverged = 2;

/// Runs the command line `args` (without the program name) and returns the exit code.
int runCli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

nlohmann::json resultDocument(SubspaceResult const& result, std::string const& modelPath, std::size_t numStates, double epsilon,
                              double horizon, Objective objective);

}  // namespace subtbr
