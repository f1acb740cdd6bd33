#pragma once

#include <ostream>

namespace fair_agents {

// Exit codes of the fair_agents command line.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
// Bad usage, unreadable or invalid scenario, unreadable outcomes, catalog hash
// mismatch.
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNoActiveAgents = 3;

// Entry point behind the fair_agents binary. The human summary goes to `out`,
// logs and errors to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fair_agents
