#include "commons/sim/flashloan.hpp"

namespace commons::sim {

std::string AttackOutcome::result() const { return succeeded ? "Succeeded" : "Blocked:" + blocked_by; }

json to_json(const AttackOutcome& o) {
  return {{"result", o.result()},
          {"treasury_before", o.treasury_before},
          {"treasury_after", o.treasury_after},
          {"treasury_delta", o.treasury_delta()},
          {"vetoed", o.vetoed}};
}

AttackOutcome attack_flashloan(Commons& c, ArcId arc, SoulId attacker, Amount loan) {
  AttackOutcome out;
  out.treasury_before = c.treasury_balance(arc);
  const Epoch epoch = c.now();
  c.mint(attacker, loan);
  std::optional<ProposalId> drain;
  try {
    drain = c.submit_proposal(arc, attacker, governance::ProposalKind::TreasurySpend,
                              {{"to", attacker}, {"amount", out.treasury_before}});
    c.cast_token_vote(*drain, attacker, true);
    auto t = c.tally(*drain);
    if (t.approved) c.execute(*drain);
    else out.blocked_by = governance::to_string(t.reason);
  } catch (const Error& e) {
    out.blocked_by = to_string(e.code());
  }
  // Repayment closes the loan inside the same epoch; drained funds stay with the attacker.
  c.burn(attacker, loan);
  if (c.now() != epoch) throw Error(Errc::InvariantViolation, "flash loan spanned an epoch boundary");
  out.treasury_after = c.treasury_balance(arc);
  out.succeeded = out.blocked_by.empty() && out.treasury_after < out.treasury_before;

  // A drain left sitting in the timelock queue is what the founder council exists for.
  if (drain && c.governance().proposal(*drain).state == governance::ProposalState::Queued) {
    const auto& council = c.governance().arc(arc).founder_council;
    if (!council.empty() && c.founder_veto_weight(arc) > 0) {
      c.advance_epoch(1);
      try {
        c.council_veto(*drain, council);
        out.vetoed = true;
      } catch (const Error&) {
      }
      out.treasury_after = c.treasury_balance(arc);
    }
  }
  return out;
}

AttackOutcome run_attack_flashloan(const FlashLoanParams& params) {
  if (params.loan <= 0) throw Error(Errc::ZeroAmount, "loan");
  Commons c;
  std::vector<SoulId> members;
  std::vector<SoulId> council;
  for (int i = 0; i < 10; ++i) {
    const auto s = c.create_soul();
    c.mint(s, 1'000'000);
    members.push_back(s);
    if (i < 5) council.push_back(s);
  }
  const auto attacker = c.create_soul();
  members.push_back(attacker);

  governance::GovernanceConfig cfg;
  cfg.mode = governance::Mode::TokenWeighted;
  cfg.timelock_epochs = params.timelock ? params.timelock_epochs : 0;
  cfg.snapshot_voting = params.snapshot;
  const auto arc = c.create_arc(members, council, cfg);
  c.fund_treasury(arc, 182'000'000);
  c.advance_epoch(1);
  return attack_flashloan(c, arc, attacker, params.loan);
}

}  // namespace commons::sim
