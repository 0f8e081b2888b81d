#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "commons/reputation.hpp"
#include "commons/types.hpp"

namespace commons::governance {

enum class QvCostMode { CumulativeSquare, MarginalSquare };
// TokenWeighted is the one-token-one-vote baseline kept for comparison runs.
enum class Mode { Bicameral, TokenWeighted };

struct FounderStep {
  Epoch from{0};
  double weight{0};

  friend bool operator==(const FounderStep&, const FounderStep&) = default;
};

std::vector<FounderStep> default_founder_schedule();

struct GovernanceConfig {
  Mode mode{Mode::Bicameral};
  std::int64_t voice_credits_per_round{100};
  QvCostMode qv_cost_mode{QvCostMode::CumulativeSquare};
  double plural_quorum{0.10};
  double epistemic_min_reputation{5};
  // 0 disables the timelock; otherwise 2..7.
  Epoch timelock_epochs{3};
  int veto_m{3};
  int veto_n{5};
  double minority_veto_threshold{0.20};
  bool snapshot_voting{true};
  std::vector<FounderStep> founder_schedule{default_founder_schedule()};
  reputation::ReputationWeights weights{};

  friend bool operator==(const GovernanceConfig&, const GovernanceConfig&) = default;
};

// Every violated constraint, one message each; empty when valid.
std::vector<std::string> validate(const GovernanceConfig& c);
void to_json(json& j, const GovernanceConfig& c);
// Overlays the keys present in `j` onto defaults. Unknown keys or wrongly
// typed values throw Error(BadConfig).
GovernanceConfig config_from_json(const json& j);
// Applies a single named parameter; throws BadConfig if the result is invalid.
GovernanceConfig with_parameter(GovernanceConfig c, const std::string& key, const json& value);

std::string_view to_string(QvCostMode m);
std::string_view to_string(Mode m);

std::int64_t qv_cost(std::int64_t votes, QvCostMode mode);
std::int64_t max_affordable_votes(std::int64_t credits, QvCostMode mode);

// Step function over the schedule; 0 before the first step is never reached
// because schedules start at epoch 0.
double founder_veto_weight(const GovernanceConfig& c, Epoch at);

enum class ProposalKind { TreasurySpend, ParameterChange, SbtRevocation, SbtReinstate, Constitutional };
enum class ProposalState { Draft, Voting, Queued, Executed, Rejected, Vetoed };
enum class RejectReason { None, QuorumFail, PluralOpposed, EpistemicOpposed, MinorityVeto, TokenOpposed };

std::string_view to_string(ProposalKind k);
std::string_view to_string(ProposalState s);
std::string_view to_string(RejectReason r);
ProposalKind kind_or_throw(std::string_view name);

struct PluralBallot {
  std::int64_t votes{0};
  std::int64_t credits{0};
};

struct TokenBallot {
  bool support{false};
  Amount weight{0};
};

struct TallyResult {
  bool approved{false};
  RejectReason reason{RejectReason::None};
  std::int64_t plural_net{0};
  std::size_t voters{0};
  // Fraction of members casting any ballot.
  double turnout{0};
  // The quorum measure for the mode: member turnout for bicameral, share of
  // member token power for token-weighted.
  double participation{0};
  double epistemic_yes{0};
  double epistemic_no{0};
  double total_reputation{0};
  Amount token_yes{0};
  Amount token_no{0};
  Amount token_total{0};
};

json to_json(const TallyResult& t);

struct Proposal {
  ProposalId id;
  ArcId arc;
  SoulId proposer;
  ProposalKind kind{ProposalKind::TreasurySpend};
  json payload = json::object();
  bool constitutional_class{false};
  ProposalState state{ProposalState::Draft};
  Epoch snapshot_epoch{0};
  Epoch queued_until{0};
  std::optional<Epoch> executed_epoch;
  std::map<SoulId, Amount> token_snapshot;
  std::map<SoulId, double> rep_snapshot;
  std::map<SoulId, PluralBallot> plural;
  std::map<SoulId, bool> epistemic;
  std::map<SoulId, TokenBallot> token_votes;
  std::optional<TallyResult> tally;

  std::size_t voter_count() const;
};

json to_json(const Proposal& p);
Digest proposal_digest(const Proposal& p);

struct Arc {
  ArcId id;
  AccountId treasury;
  std::set<SoulId> members;
  std::set<SoulId> founder_council;
  GovernanceConfig config;
  std::optional<ArcId> forked_from;
  // Proposal digests carried over from a fork source.
  std::vector<std::string> inherited_history;
};

using Delegations = std::map<SoulId, SoulId>;

struct GovernanceState {
  std::map<ArcId, Arc> arcs;
  std::map<ProposalId, Proposal> proposals;
  Delegations delegations;
  // (arc, voter, round) -> credits spent; a round is the snapshot epoch.
  std::map<std::tuple<ArcId, SoulId, Epoch>, std::int64_t> credits_spent;
  std::uint64_t arcs_created{0};
  std::uint64_t proposals_created{0};

  const Arc& arc(ArcId id) const;
  Arc& arc(ArcId id);
  const Proposal& proposal(ProposalId id) const;
  Proposal& proposal(ProposalId id);

  json to_json() const;
};

bool creates_cycle(const Delegations& d, SoulId from, SoulId to);
bool acyclic(const Delegations& d);
// Reputation flowing into `voter`: its own plus every soul whose chain passes
// through it.
double delegated_weight(SoulId voter, const std::map<SoulId, double>& reps, const Delegations& d);
// Liquid resolution at tally time: each soul's reputation goes to the first
// voter along its delegation chain (itself if it voted).
std::map<SoulId, double> resolve_epistemic_weights(const std::map<SoulId, bool>& votes,
                                                   const std::map<SoulId, double>& reps,
                                                   const Delegations& d);

// `token_power` is each member's token voting power for this proposal.
TallyResult compute_tally(const Arc& arc, const Proposal& p, const Delegations& d,
                          const std::map<SoulId, Amount>& token_power);

// Approval share of cast epistemic weight; 0 when nothing was cast.
double epistemic_approval_share(const TallyResult& t);

}  // namespace commons::governance
