#include "commons/commons.hpp"

namespace commons {

Commons::Commons(CommonsOptions options) : rng_(options.seed) {
  commit("Genesis", {{"protocol_fee_bp", options.protocol_fee_bp}});
}

Commons::Commons(ReplayTag) {}

Commons Commons::replay(const std::vector<EventRecord>& records) {
  if (auto bad = first_invalid_seq(records)) {
    throw Error(Errc::CorruptLog, "seq " + std::to_string(*bad) + ": hash chain does not verify");
  }
  Commons c{ReplayTag{}};
  for (const auto& r : records) {
    try {
      if ((r.seq == 1) != (r.kind == "Genesis")) throw Error(Errc::CorruptLog, "Genesis must be the first event");
      if (r.epoch != c.now()) throw Error(Errc::CorruptLog, "epoch does not match the replayed clock");
      c.apply(r.kind, r.payload);
      c.log_.append(r.epoch, r.kind, r.payload);
    } catch (const std::exception& e) {
      throw Error(Errc::CorruptLog, "seq " + std::to_string(r.seq) + ": " + e.what());
    }
  }
  return c;
}

void Commons::commit(std::string kind, json payload) {
  const Epoch at = ledger_.epoch;
  apply(kind, payload);
  log_.append(at, std::move(kind), std::move(payload));
}

const std::map<std::string, Commons::Applier, std::less<>>& Commons::appliers() {
  static const std::map<std::string, Applier, std::less<>> table{
      {"Genesis", &Commons::apply_genesis},
      {"SoulCreated", &Commons::apply_soul_created},
      {"Minted", &Commons::apply_minted},
      {"Burned", &Commons::apply_burned},
      {"Transferred", &Commons::apply_transferred},
      {"VestingCreated", &Commons::apply_vesting_created},
      {"VestingClaimed", &Commons::apply_vesting_claimed},
      {"EpochAdvanced", &Commons::apply_epoch_advanced},
      {"SbtIssued", &Commons::apply_sbt_issued},
      {"SbtRevoked", &Commons::apply_sbt_revoked},
      {"SbtReinstated", &Commons::apply_sbt_reinstated},
      {"SbtAppealed", &Commons::apply_sbt_appealed},
      {"StakeCreated", &Commons::apply_stake_created},
      {"StakeReleased", &Commons::apply_stake_released},
      {"ArcCreated", &Commons::apply_arc_created},
      {"MemberAdded", &Commons::apply_member_added},
      {"ProposalDrafted", &Commons::apply_proposal_drafted},
      {"VotingOpened", &Commons::apply_voting_opened},
      {"PluralVoteCast", &Commons::apply_plural_vote_cast},
      {"EpistemicVoteCast", &Commons::apply_epistemic_vote_cast},
      {"TokenVoteCast", &Commons::apply_token_vote_cast},
      {"Delegated", &Commons::apply_delegated},
      {"Undelegated", &Commons::apply_undelegated},
      {"ProposalTallied", &Commons::apply_proposal_tallied},
      {"ProposalVetoed", &Commons::apply_proposal_vetoed},
      {"ProposalExecuted", &Commons::apply_proposal_executed},
      {"RoundOpened", &Commons::apply_round_opened},
      {"Contributed", &Commons::apply_contributed},
      {"RoundSettled", &Commons::apply_round_settled},
      {"ProgramCreated", &Commons::apply_program_created},
      {"MilestoneReported", &Commons::apply_milestone_reported},
      {"TrancheReleased", &Commons::apply_tranche_released},
      {"ProgramCancelled", &Commons::apply_program_cancelled},
      {"IpMinted", &Commons::apply_ip_minted},
      {"OpenAccessDeclared", &Commons::apply_open_access_declared},
      {"LicenseGranted", &Commons::apply_license_granted},
      {"RoyaltiesDistributed", &Commons::apply_royalties_distributed},
      {"Fractionalized", &Commons::apply_fractionalized},
      {"CurveBought", &Commons::apply_curve_bought},
      {"CurveSold", &Commons::apply_curve_sold},
  };
  return table;
}

void Commons::apply(const std::string& kind, const json& payload) {
  const auto& table = appliers();
  auto it = table.find(kind);
  if (it == table.end()) throw Error(Errc::CorruptLog, "unknown event kind " + kind);
  (this->*(it->second))(payload);
}

void Commons::apply_genesis(const json& p) {
  ip_.protocol_fee_bp = p.at("protocol_fee_bp").get<std::int64_t>();
  ledger_.open(AccountId::commons_treasury());
}

json Commons::state_json() const {
  return {{"ledger", ledger_.to_json()},
          {"reputation", sbts_.to_json()},
          {"governance", gov_.to_json()},
          {"funding", funding_.to_json()},
          {"ip", ip_.to_json()}};
}

Digest Commons::state_hash() const { return sha256(canonical(state_json())); }

void Commons::require_soul(SoulId s) const {
  if (!ledger_.has_soul(s)) throw Error(Errc::UnknownSoul, "soul#" + std::to_string(s.value));
}

}  // namespace commons
