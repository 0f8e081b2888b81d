#pragma once

#include <string>

#include "commons/commons.hpp"

namespace commons::sim {

struct FlashLoanParams {
  Amount loan{182'000'000};
  bool timelock{true};
  bool snapshot{true};
  Epoch timelock_epochs{3};
};

struct AttackOutcome {
  bool succeeded{false};
  // Errc name of the first defense that stopped the attack; empty on success.
  std::string blocked_by;
  Amount treasury_before{0};
  Amount treasury_after{0};
  bool vetoed{false};

  Amount treasury_delta() const { return treasury_after - treasury_before; }
  // "Succeeded" or "Blocked:<reason>".
  std::string result() const;
};

json to_json(const AttackOutcome& o);

// Runs the attack inside an existing world: within the current epoch the
// attacker borrows, proposes a full treasury drain, votes, tallies, tries to
// execute and repays. If the drain is left queued, the founder council vetoes
// it once the clock moves on.
AttackOutcome attack_flashloan(Commons& c, ArcId arc, SoulId attacker, Amount loan);

// Self-contained world: token-weighted ARC with a 182M treasury, ten honest
// holders, a 3-of-5 founder council and one tokenless attacker.
AttackOutcome run_attack_flashloan(const FlashLoanParams& params);

}  // namespace commons::sim
