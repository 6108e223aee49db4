#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace affdim::cli {

// Exit codes shared by every subcommand.
enum Exit : int { kOk = 0, kInput = 1, kBudget = 2, kStageEmpty = 3 };

// Runs the command line; reports go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace affdim::cli
