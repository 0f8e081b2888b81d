#pragma once

#include <optional>
#include <string>
#include <vector>

#include "commons/commons.hpp"
#include "commons/sim/scenario.hpp"

namespace commons::sim {

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<governance::Mode> mode;
};

struct RunResult {
  json report;
  Commons world;
};

// Names of every violated module invariant; empty when the state is sound.
std::vector<std::string> check_invariants(const Commons& c);

// Deterministic run; invariants are checked after every step and the first
// violation aborts with Error(InvariantViolation).
RunResult run(const Scenario& s, const RunOptions& options = {});

}  // namespace commons::sim
