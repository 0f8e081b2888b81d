#pragma once

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "commons/event_log.hpp"
#include "commons/funding.hpp"
#include "commons/governance.hpp"
#include "commons/ip_market.hpp"
#include "commons/ledger.hpp"
#include "commons/reputation.hpp"

namespace commons {

struct CommonsOptions {
  // Seeds the salt generator only; salts are recorded in the off-chain vault,
  // never needed for replay.
  std::uint64_t seed{0};
  std::int64_t protocol_fee_bp{ip::kDefaultProtocolFeeBp};
};

// Off-chain half of an SBT: what the holder keeps to open its commitment.
struct Credential {
  reputation::Salt salt{};
  reputation::Metadata metadata;
};

struct ExecutionReceipt {
  ProposalId proposal;
  governance::ProposalKind kind{governance::ProposalKind::TreasurySpend};
  json effect;
};

struct Payout {
  SoulId project;
  Amount contributed{0};
  Amount match{0};

  Amount total() const { return contributed + match; }
};

struct MilestoneSpec {
  std::string description;
  Amount tranche{0};
};

// The protocol state machine. Every public mutation validates first, then
// commits exactly the events that describe it; state changes only inside the
// event appliers, so replaying the log rebuilds an identical state.
// Single writer: the whole object is a value that can be moved between threads
// or copied as an immutable snapshot for concurrent queries.
class Commons {
 public:
  explicit Commons(CommonsOptions options = {});

  // Rebuilds state from a log. Throws Error(CorruptLog) naming the first bad seq.
  static Commons replay(const std::vector<EventRecord>& records);

  // ---- ledger ----
  Epoch now() const noexcept { return ledger_.epoch; }
  SoulId create_soul();
  Amount mint(SoulId soul, Amount amount);
  void burn(SoulId soul, Amount amount);
  void transfer(SoulId from, SoulId to, Amount amount);
  ScheduleId create_vesting(SoulId owner, Amount total, Epoch cliff_epochs, Epoch duration_epochs);
  Amount claimable(ScheduleId schedule, Epoch at_epoch) const;
  Amount claim_vesting(ScheduleId schedule);
  Epoch advance_epoch(Epoch n);

  Amount balance(SoulId soul) const;
  Amount balance(AccountId account) const;
  Amount free_balance(SoulId soul) const;
  Amount locked(SoulId soul) const;
  Amount treasury_balance(ArcId arc) const;

  // ---- reputation ----
  SbtId issue_sbt(ArcId issuer, SoulId subject, reputation::Category category,
                  const reputation::Metadata& metadata = {});
  SbtId issue_sbt(ArcId issuer, SoulId subject, std::string_view category,
                  const reputation::Metadata& metadata = {});
  // SBTs are bound to their subject; this always throws NonTransferable.
  [[noreturn]] void attempt_transfer_sbt(SbtId sbt, SoulId to) const;
  double reputation(SoulId soul, const reputation::ReputationWeights& weights) const;
  double reputation(SoulId soul) const;
  void revoke_sbt(SbtId sbt, ProposalId authorizing_proposal);
  ProposalId appeal_sbt(SbtId sbt);
  Digest commit_metadata(SoulId soul) const;
  reputation::DisclosureProof prove_count_at_least(SoulId soul, reputation::Category category,
                                                   std::size_t k) const;
  static bool verify_proof(const Digest& root, const reputation::DisclosureProof& proof) noexcept;
  StakeId stake_sbt(SoulId soul, SbtId sbt, Epoch until_epoch);
  void unstake(StakeId stake);
  const Credential* credential(SbtId sbt) const;

  // ---- governance ----
  ArcId create_arc(const std::vector<SoulId>& members, const std::vector<SoulId>& founder_council,
                   const governance::GovernanceConfig& config);
  void add_member(ArcId arc, SoulId soul);
  void fund_treasury(ArcId arc, Amount amount);
  ProposalId draft_proposal(ArcId arc, SoulId proposer, governance::ProposalKind kind, json payload);
  void open_voting(ProposalId proposal);
  ProposalId submit_proposal(ArcId arc, SoulId proposer, governance::ProposalKind kind, json payload);
  std::int64_t cast_plural_vote(ProposalId proposal, SoulId voter, std::int64_t votes);
  void cast_epistemic_vote(ProposalId proposal, SoulId voter, bool support);
  void cast_token_vote(ProposalId proposal, SoulId voter, bool support);
  void delegate(SoulId delegator, SoulId delegate_to);
  void undelegate(SoulId delegator);
  governance::TallyResult tally(ProposalId proposal);
  void council_veto(ProposalId proposal, const std::set<SoulId>& signers);
  ExecutionReceipt execute(ProposalId proposal);
  std::string fork_export(ArcId arc) const;
  ArcId fork_import(std::string_view snapshot);

  std::int64_t remaining_credits(ProposalId proposal, SoulId voter) const;
  // Token weight `voter` would carry on `proposal` right now.
  Amount token_power(ProposalId proposal, SoulId voter) const;
  std::map<SoulId, Amount> member_token_power(ProposalId proposal) const;
  double founder_veto_weight(ArcId arc) const;

  // ---- funding ----
  RoundId open_round(ArcId funder, Amount pool, const std::vector<SoulId>& projects,
                     funding::MatchingMode mode = funding::MatchingMode::ProportionalSquares,
                     std::optional<reputation::Category> require_stake = std::nullopt);
  void contribute(RoundId round, SoulId contributor, SoulId project, Amount amount);
  void import_contributions_csv(RoundId round, std::string_view csv);
  funding::MatchResult compute_matching(RoundId round) const;
  std::vector<Payout> settle_round(RoundId round);
  ProgramId create_mission_program(ArcId funder, SoulId director, Amount budget,
                                   const std::vector<MilestoneSpec>& milestones);
  void report_milestone(ProgramId program, std::size_t index, SoulId caller);
  void release_tranche(ProgramId program, std::size_t index, SoulId caller, SoulId recipient);
  Amount cancel_program(ProgramId program, SoulId caller);

  // ---- ip market ----
  AssetId mint_ipnft(ArcId arc, SoulId owner, const Digest& content_commitment, bool open_access,
                     const std::vector<ip::RoyaltyShare>& royalty_split);
  void set_open_access(AssetId asset, SoulId caller, bool open_access);
  ip::RoyaltyReceipt grant_commercial_license(AssetId asset, SoulId caller, SoulId licensee, Amount price,
                                              bool exclusive);
  ip::RoyaltyReceipt distribute_royalties(AssetId asset, SoulId payer, Amount revenue);
  PoolId fractionalize(AssetId asset, SoulId caller, Amount supply_cap, ip::LinearCurve curve,
                       ip::SellPenalty penalty);
  Amount curve_buy(PoolId pool, SoulId buyer, Amount units);
  Amount curve_sell(PoolId pool, SoulId seller, Amount units);

  // ---- state ----
  const ledger::LedgerState& ledger() const noexcept { return ledger_; }
  const reputation::SbtRegistry& sbts() const noexcept { return sbts_; }
  const governance::GovernanceState& governance() const noexcept { return gov_; }
  const funding::FundingState& funding() const noexcept { return funding_; }
  const ip::IpState& ip() const noexcept { return ip_; }
  const EventLog& log() const noexcept { return log_; }

  json state_json() const;
  Digest state_hash() const;

 private:
  struct ReplayTag {};
  explicit Commons(ReplayTag);

  void commit(std::string kind, json payload);
  void apply(const std::string& kind, const json& payload);

  void require_soul(SoulId s) const;
  governance::TallyResult tally_preview(const governance::Proposal& p) const;
  void check_proposal_payload(const governance::Arc& arc, governance::ProposalKind kind, const json& payload) const;
  ProposalId create_proposal(ArcId arc, SoulId proposer, governance::ProposalKind kind, json payload,
                             bool constitutional_class);
  void reinstate_sbt(SbtId sbt, ProposalId authorizing_proposal);
  void check_sbt_authorization(SbtId sbt, ProposalId proposal, governance::ProposalKind expected) const;
  bool has_covering_stake(SoulId soul, reputation::Category category) const;

  void apply_genesis(const json& p);
  void apply_soul_created(const json& p);
  void apply_minted(const json& p);
  void apply_burned(const json& p);
  void apply_transferred(const json& p);
  void apply_vesting_created(const json& p);
  void apply_vesting_claimed(const json& p);
  void apply_epoch_advanced(const json& p);
  void apply_sbt_issued(const json& p);
  void apply_sbt_revoked(const json& p);
  void apply_sbt_reinstated(const json& p);
  void apply_sbt_appealed(const json& p);
  void apply_stake_created(const json& p);
  void apply_stake_released(const json& p);
  void apply_arc_created(const json& p);
  void apply_member_added(const json& p);
  void apply_proposal_drafted(const json& p);
  void apply_voting_opened(const json& p);
  void apply_plural_vote_cast(const json& p);
  void apply_epistemic_vote_cast(const json& p);
  void apply_token_vote_cast(const json& p);
  void apply_delegated(const json& p);
  void apply_undelegated(const json& p);
  void apply_proposal_tallied(const json& p);
  void apply_proposal_vetoed(const json& p);
  void apply_proposal_executed(const json& p);
  void apply_round_opened(const json& p);
  void apply_contributed(const json& p);
  void apply_round_settled(const json& p);
  void apply_program_created(const json& p);
  void apply_milestone_reported(const json& p);
  void apply_tranche_released(const json& p);
  void apply_program_cancelled(const json& p);
  void apply_ip_minted(const json& p);
  void apply_open_access_declared(const json& p);
  void apply_license_granted(const json& p);
  void apply_royalties_distributed(const json& p);
  void apply_fractionalized(const json& p);
  void apply_curve_bought(const json& p);
  void apply_curve_sold(const json& p);
  void pay_receipt(AccountId payer, const json& receipt);

  using Applier = void (Commons::*)(const json&);
  static const std::map<std::string, Applier, std::less<>>& appliers();

  ledger::LedgerState ledger_;
  reputation::SbtRegistry sbts_;
  governance::GovernanceState gov_;
  funding::FundingState funding_;
  ip::IpState ip_;
  EventLog log_;

  std::mt19937_64 rng_;
  std::map<SbtId, Credential> vault_;
};

}  // namespace commons
