#include "commons/commons.hpp"

namespace commons {

using governance::Mode;
using governance::ProposalKind;
using governance::ProposalState;

namespace {

governance::GovernanceConfig merged_config(const governance::GovernanceConfig& base, const json& changes) {
  if (!changes.is_object()) throw Error(Errc::BadPayload, "changes must be an object");
  json merged = base;
  for (const auto& [key, value] : changes.items()) {
    if (!merged.contains(key)) throw Error(Errc::BadConfig, "unknown governance key " + key);
    merged[key] = value;
  }
  auto cfg = governance::config_from_json(merged);
  auto problems = governance::validate(cfg);
  if (!problems.empty()) throw Error(Errc::BadConfig, problems.front());
  return cfg;
}

json config_changes(const governance::Proposal& p) {
  if (p.kind == ProposalKind::ParameterChange) return {{p.payload.at("key").get<std::string>(), p.payload.at("value")}};
  if (p.kind == ProposalKind::Constitutional && p.payload.contains("changes")) return p.payload.at("changes");
  return nullptr;
}

std::set<SoulId> soul_set(const json& j) {
  std::set<SoulId> out;
  for (const auto& s : j) out.insert(s.get<SoulId>());
  return out;
}

}  // namespace

ArcId Commons::create_arc(const std::vector<SoulId>& members, const std::vector<SoulId>& founder_council,
                          const governance::GovernanceConfig& config) {
  if (members.empty()) throw Error(Errc::BadPayload, "an ARC needs at least one member");
  for (auto s : members) require_soul(s);
  for (auto s : founder_council) require_soul(s);
  auto problems = governance::validate(config);
  if (!problems.empty()) throw Error(Errc::BadConfig, problems.front());
  const ArcId id{gov_.arcs_created + 1};
  commit("ArcCreated", {{"arc", id},
                        {"members", std::set<SoulId>(members.begin(), members.end())},
                        {"founder_council", std::set<SoulId>(founder_council.begin(), founder_council.end())},
                        {"config", config}});
  return id;
}

void Commons::add_member(ArcId arc, SoulId soul) {
  require_soul(soul);
  if (gov_.arc(arc).members.contains(soul)) throw Error(Errc::BadPayload, "already a member");
  commit("MemberAdded", {{"arc", arc}, {"soul", soul}});
}

void Commons::fund_treasury(ArcId arc, Amount amount) {
  const auto account = gov_.arc(arc).treasury;
  if (amount <= 0) throw Error(Errc::ZeroAmount, "treasury funding");
  commit("Minted", {{"account", account}, {"amount", amount}});
}

void Commons::check_proposal_payload(const governance::Arc& arc, ProposalKind kind, const json& payload) const {
  if (!payload.is_object()) throw Error(Errc::BadPayload, "payload must be an object");
  try {
    switch (kind) {
      case ProposalKind::TreasurySpend:
        require_soul(payload.at("to").get<SoulId>());
        if (payload.at("amount").get<Amount>() <= 0) throw Error(Errc::ZeroAmount, "spend amount");
        break;
      case ProposalKind::ParameterChange:
        merged_config(arc.config, {{payload.at("key").get<std::string>(), payload.at("value")}});
        break;
      case ProposalKind::SbtRevocation:
      case ProposalKind::SbtReinstate:
        if (sbts_.at(payload.at("sbt").get<SbtId>()).issuer != arc.id) {
          throw Error(Errc::NotAuthorized, "SBT was issued by another ARC");
        }
        break;
      case ProposalKind::Constitutional:
        if (payload.contains("changes")) merged_config(arc.config, payload.at("changes"));
        break;
    }
  } catch (const json::exception& e) {
    throw Error(Errc::BadPayload, std::string(governance::to_string(kind)) + ": " + e.what());
  }
}

ProposalId Commons::create_proposal(ArcId arc, SoulId proposer, ProposalKind kind, json payload,
                                    bool constitutional_class) {
  check_proposal_payload(gov_.arc(arc), kind, payload);
  const ProposalId id{gov_.proposals_created + 1};
  commit("ProposalDrafted", {{"proposal", id},
                             {"arc", arc},
                             {"proposer", proposer},
                             {"kind", governance::to_string(kind)},
                             {"payload", std::move(payload)},
                             {"constitutional_class", constitutional_class}});
  return id;
}

ProposalId Commons::draft_proposal(ArcId arc, SoulId proposer, ProposalKind kind, json payload) {
  const auto& a = gov_.arc(arc);
  require_soul(proposer);
  if (!a.members.contains(proposer)) throw Error(Errc::NotMember, "soul#" + std::to_string(proposer.value));
  const bool constitutional = kind == ProposalKind::Constitutional || kind == ProposalKind::SbtReinstate;
  return create_proposal(arc, proposer, kind, std::move(payload), constitutional);
}

void Commons::open_voting(ProposalId proposal) {
  if (gov_.proposal(proposal).state != ProposalState::Draft) throw Error(Errc::NotDraft);
  commit("VotingOpened", {{"proposal", proposal}});
}

ProposalId Commons::submit_proposal(ArcId arc, SoulId proposer, ProposalKind kind, json payload) {
  const auto id = draft_proposal(arc, proposer, kind, std::move(payload));
  open_voting(id);
  return id;
}

std::int64_t Commons::remaining_credits(ProposalId proposal, SoulId voter) const {
  const auto& p = gov_.proposal(proposal);
  const auto& arc = gov_.arc(p.arc);
  auto it = gov_.credits_spent.find({p.arc, voter, p.snapshot_epoch});
  return arc.config.voice_credits_per_round - (it == gov_.credits_spent.end() ? 0 : it->second);
}

std::int64_t Commons::cast_plural_vote(ProposalId proposal, SoulId voter, std::int64_t votes) {
  const auto& p = gov_.proposal(proposal);
  if (p.state != ProposalState::Voting) throw Error(Errc::NotVoting);
  const auto& arc = gov_.arc(p.arc);
  if (arc.config.mode != Mode::Bicameral) throw Error(Errc::WrongMode, "plural ballots need bicameral mode");
  if (!arc.members.contains(voter)) throw Error(Errc::NotMember, "soul#" + std::to_string(voter.value));
  const auto cost = governance::qv_cost(votes < 0 ? -votes : votes, arc.config.qv_cost_mode);
  auto prior = p.plural.find(voter);
  const auto available = remaining_credits(proposal, voter) + (prior == p.plural.end() ? 0 : prior->second.credits);
  if (cost > available) {
    throw Error(Errc::InsufficientCredits, "cost " + std::to_string(cost) + " > " + std::to_string(available));
  }
  commit("PluralVoteCast", {{"proposal", proposal}, {"voter", voter}, {"votes", votes}, {"credits", cost}});
  return available - cost;
}

void Commons::cast_epistemic_vote(ProposalId proposal, SoulId voter, bool support) {
  const auto& p = gov_.proposal(proposal);
  if (p.state != ProposalState::Voting) throw Error(Errc::NotVoting);
  const auto& arc = gov_.arc(p.arc);
  if (arc.config.mode != Mode::Bicameral) throw Error(Errc::WrongMode, "epistemic ballots need bicameral mode");
  if (!arc.members.contains(voter)) throw Error(Errc::NotMember, "soul#" + std::to_string(voter.value));
  const double weight = governance::delegated_weight(voter, p.rep_snapshot, gov_.delegations);
  if (weight < arc.config.epistemic_min_reputation) {
    throw Error(Errc::BelowThreshold, "weight " + std::to_string(weight) + " below " +
                                          std::to_string(arc.config.epistemic_min_reputation));
  }
  commit("EpistemicVoteCast", {{"proposal", proposal}, {"voter", voter}, {"support", support}});
}

Amount Commons::token_power(ProposalId proposal, SoulId voter) const {
  const auto& p = gov_.proposal(proposal);
  const auto& arc = gov_.arc(p.arc);
  if (!arc.members.contains(voter)) return 0;
  if (arc.config.snapshot_voting) {
    auto it = p.token_snapshot.find(voter);
    return it == p.token_snapshot.end() ? 0 : it->second;
  }
  return ledger_.balance(AccountId::of(voter));
}

std::map<SoulId, Amount> Commons::member_token_power(ProposalId proposal) const {
  std::map<SoulId, Amount> out;
  for (auto m : gov_.arc(gov_.proposal(proposal).arc).members) out[m] = token_power(proposal, m);
  return out;
}

void Commons::cast_token_vote(ProposalId proposal, SoulId voter, bool support) {
  const auto& p = gov_.proposal(proposal);
  if (p.state != ProposalState::Voting) throw Error(Errc::NotVoting);
  const auto& arc = gov_.arc(p.arc);
  if (arc.config.mode != Mode::TokenWeighted) throw Error(Errc::WrongMode, "token ballots need token_weighted mode");
  if (!arc.members.contains(voter)) throw Error(Errc::NotMember, "soul#" + std::to_string(voter.value));
  const auto weight = token_power(proposal, voter);
  if (weight <= 0) throw Error(Errc::NoVotingPower, "soul#" + std::to_string(voter.value));
  commit("TokenVoteCast", {{"proposal", proposal}, {"voter", voter}, {"support", support}, {"weight", weight}});
}

void Commons::delegate(SoulId delegator, SoulId delegate_to) {
  require_soul(delegator);
  require_soul(delegate_to);
  if (delegator == delegate_to) throw Error(Errc::SelfDelegation);
  auto without = gov_.delegations;
  without.erase(delegator);
  if (governance::creates_cycle(without, delegator, delegate_to)) {
    throw Error(Errc::CycleDetected, "soul#" + std::to_string(delegator.value) + " -> soul#" +
                                         std::to_string(delegate_to.value));
  }
  commit("Delegated", {{"from", delegator}, {"to", delegate_to}});
}

void Commons::undelegate(SoulId delegator) {
  require_soul(delegator);
  if (!gov_.delegations.contains(delegator)) throw Error(Errc::NotDelegating);
  commit("Undelegated", {{"from", delegator}});
}

governance::TallyResult Commons::tally_preview(const governance::Proposal& p) const {
  return governance::compute_tally(gov_.arc(p.arc), p, gov_.delegations, member_token_power(p.id));
}

governance::TallyResult Commons::tally(ProposalId proposal) {
  const auto& p = gov_.proposal(proposal);
  if (p.state != ProposalState::Voting) throw Error(Errc::NotVoting);
  auto result = tally_preview(p);
  commit("ProposalTallied", {{"proposal", proposal}, {"result", governance::to_json(result)}});
  return result;
}

double Commons::founder_veto_weight(ArcId arc) const {
  return governance::founder_veto_weight(gov_.arc(arc).config, now());
}

void Commons::council_veto(ProposalId proposal, const std::set<SoulId>& signers) {
  const auto& p = gov_.proposal(proposal);
  if (p.state != ProposalState::Queued) throw Error(Errc::NotQueued);
  const auto& arc = gov_.arc(p.arc);
  const double w = founder_veto_weight(p.arc);
  if (w <= 0) throw Error(Errc::NotAuthorized, "founder veto power has expired");
  for (auto s : signers) {
    if (!arc.founder_council.contains(s)) {
      throw Error(Errc::NotAuthorized, "soul#" + std::to_string(s.value) + " is not on the council");
    }
  }
  if (static_cast<int>(signers.size()) < arc.config.veto_m) {
    throw Error(Errc::InsufficientSigners, std::to_string(signers.size()) + " of " +
                                               std::to_string(arc.config.veto_m) + " required");
  }
  const double share = p.tally ? governance::epistemic_approval_share(*p.tally) : 0.0;
  if (share >= 0.5 + w / 2) {
    throw Error(Errc::VetoOverridden, "epistemic approval " + std::to_string(share) + " overrides weight " +
                                          std::to_string(w));
  }
  commit("ProposalVetoed", {{"proposal", proposal}, {"signers", signers}});
}

ExecutionReceipt Commons::execute(ProposalId proposal) {
  const auto& p = gov_.proposal(proposal);
  if (p.state != ProposalState::Queued) throw Error(Errc::NotQueued);
  if (now() < p.queued_until) {
    throw Error(Errc::TimelockActive, "executable from epoch " + std::to_string(p.queued_until));
  }
  const auto& arc = gov_.arc(p.arc);
  ExecutionReceipt receipt{proposal, p.kind, json::object()};
  switch (p.kind) {
    case ProposalKind::TreasurySpend: {
      const auto amount = p.payload.at("amount").get<Amount>();
      if (ledger_.balance(arc.treasury) < amount) throw Error(Errc::InsufficientTreasury);
      receipt.effect = {{"to", p.payload.at("to")}, {"amount", amount}};
      break;
    }
    case ProposalKind::ParameterChange:
    case ProposalKind::Constitutional: {
      auto changes = config_changes(p);
      if (!changes.is_null()) receipt.effect = {{"config", merged_config(arc.config, changes)}};
      break;
    }
    case ProposalKind::SbtRevocation:
    case ProposalKind::SbtReinstate: {
      const auto sbt = p.payload.at("sbt").get<SbtId>();
      const auto status = sbts_.at(sbt).status;
      if (p.kind == ProposalKind::SbtRevocation && status == reputation::SbtStatus::Revoked) {
        throw Error(Errc::AlreadyRevoked);
      }
      if (p.kind == ProposalKind::SbtReinstate && status != reputation::SbtStatus::Revoked) {
        throw Error(Errc::NotRevoked);
      }
      receipt.effect = {{"sbt", sbt}};
      break;
    }
  }
  commit("ProposalExecuted", {{"proposal", proposal}, {"effect", receipt.effect}});
  if (p.kind == ProposalKind::SbtRevocation) revoke_sbt(p.payload.at("sbt").get<SbtId>(), proposal);
  if (p.kind == ProposalKind::SbtReinstate) reinstate_sbt(p.payload.at("sbt").get<SbtId>(), proposal);
  return receipt;
}

std::string Commons::fork_export(ArcId arc_id) const {
  const auto& arc = gov_.arc(arc_id);
  json history = arc.inherited_history;
  for (const auto& [id, p] : gov_.proposals) {
    if (p.arc == arc_id) history.push_back(to_hex(governance::proposal_digest(p)));
  }
  json sbts = json::array();
  for (auto m : arc.members) {
    for (const auto* s : sbts_.active_of(m)) {
      sbts.push_back({{"sbt", s->id},
                      {"subject", s->subject},
                      {"category", reputation::to_string(s->category)},
                      {"commitment", to_hex(s->blinded)}});
    }
  }
  json body = {{"config", arc.config},
               {"founder_council", arc.founder_council},
               {"members", arc.members},
               {"treasury", ledger_.balance(arc.treasury)},
               {"proposal_history", history},
               {"member_sbts", sbts}};
  json snapshot = {{"arc_id", arc_id}, {"body", body}, {"body_sha256", to_hex(sha256(canonical(body)))}};
  return canonical(snapshot);
}

ArcId Commons::fork_import(std::string_view snapshot) {
  json doc;
  governance::GovernanceConfig config;
  std::set<SoulId> members;
  std::set<SoulId> council;
  Amount treasury = 0;
  json history;
  try {
    doc = json::parse(snapshot);
    if (!doc.is_object() || doc.size() != 3 || !doc.contains("arc_id") || !doc.contains("body") ||
        !doc.contains("body_sha256")) {
      throw Error(Errc::CorruptSnapshot, "unexpected snapshot layout");
    }
    if (canonical(doc) != snapshot) throw Error(Errc::CorruptSnapshot, "snapshot is not canonical");
    const auto& body = doc.at("body");
    if (doc.at("body_sha256").get<std::string>() != to_hex(sha256(canonical(body)))) {
      throw Error(Errc::CorruptSnapshot, "content hash mismatch");
    }
    config = governance::config_from_json(body.at("config"));
    members = soul_set(body.at("members"));
    council = soul_set(body.at("founder_council"));
    treasury = body.at("treasury").get<Amount>();
    history = body.at("proposal_history");
    for (const auto& h : history) {
      if (!digest_from_hex(h.get<std::string>())) throw Error(Errc::CorruptSnapshot, "bad proposal digest");
    }
    if (members.empty() || treasury < 0 || !governance::validate(config).empty()) {
      throw Error(Errc::CorruptSnapshot, "snapshot body violates ARC invariants");
    }
    for (auto s : members) require_soul(s);
    for (auto s : council) require_soul(s);
  } catch (const Error& e) {
    if (e.code() == Errc::CorruptSnapshot) throw;
    throw Error(Errc::CorruptSnapshot, e.what());
  } catch (const std::exception& e) {
    throw Error(Errc::CorruptSnapshot, e.what());
  }
  const ArcId id{gov_.arcs_created + 1};
  commit("ArcCreated", {{"arc", id},
                        {"members", members},
                        {"founder_council", council},
                        {"config", config},
                        {"forked_from", doc.at("arc_id")},
                        {"inherited_history", history}});
  if (treasury > 0) commit("Minted", {{"account", gov_.arc(id).treasury}, {"amount", treasury}});
  return id;
}

void Commons::apply_arc_created(const json& p) {
  governance::Arc arc;
  arc.id = p.at("arc").get<ArcId>();
  if (arc.id.value != gov_.arcs_created + 1) throw Error(Errc::CorruptLog, "arc ids must be sequential");
  arc.treasury = AccountId{AccountKind::Treasury, arc.id.value};
  arc.members = soul_set(p.at("members"));
  arc.founder_council = soul_set(p.at("founder_council"));
  arc.config = governance::config_from_json(p.at("config"));
  if (p.contains("forked_from")) arc.forked_from = p.at("forked_from").get<ArcId>();
  if (p.contains("inherited_history")) arc.inherited_history = p.at("inherited_history").get<std::vector<std::string>>();
  if (arc.members.empty()) throw Error(Errc::BadPayload, "empty ARC");
  ledger_.open(arc.treasury);
  gov_.arcs.emplace(arc.id, std::move(arc));
  gov_.arcs_created = p.at("arc").get<ArcId>().value;
}

void Commons::apply_member_added(const json& p) {
  gov_.arc(p.at("arc").get<ArcId>()).members.insert(p.at("soul").get<SoulId>());
}

void Commons::apply_proposal_drafted(const json& p) {
  governance::Proposal prop;
  prop.id = p.at("proposal").get<ProposalId>();
  if (prop.id.value != gov_.proposals_created + 1) throw Error(Errc::CorruptLog, "proposal ids must be sequential");
  prop.arc = p.at("arc").get<ArcId>();
  gov_.arc(prop.arc);
  prop.proposer = p.at("proposer").get<SoulId>();
  prop.kind = governance::kind_or_throw(p.at("kind").get<std::string>());
  prop.payload = p.at("payload");
  prop.constitutional_class = p.at("constitutional_class").get<bool>();
  gov_.proposals.emplace(prop.id, std::move(prop));
  gov_.proposals_created = p.at("proposal").get<ProposalId>().value;
}

void Commons::apply_voting_opened(const json& j) {
  auto& p = gov_.proposal(j.at("proposal").get<ProposalId>());
  if (p.state != ProposalState::Draft) throw Error(Errc::NotDraft);
  const auto& arc = gov_.arc(p.arc);
  p.state = ProposalState::Voting;
  p.snapshot_epoch = now();
  for (auto m : arc.members) {
    p.rep_snapshot[m] = sbts_.score(m, arc.config.weights);
    if (arc.config.snapshot_voting) {
      p.token_snapshot[m] = ledger_.balance_at_epoch_start(AccountId::of(m), p.snapshot_epoch);
    }
  }
}

void Commons::apply_plural_vote_cast(const json& j) {
  auto& p = gov_.proposal(j.at("proposal").get<ProposalId>());
  if (p.state != ProposalState::Voting) throw Error(Errc::NotVoting);
  const auto voter = j.at("voter").get<SoulId>();
  const auto credits = j.at("credits").get<std::int64_t>();
  auto& spent = gov_.credits_spent[{p.arc, voter, p.snapshot_epoch}];
  auto prior = p.plural.find(voter);
  if (prior != p.plural.end()) spent -= prior->second.credits;
  spent += credits;
  if (spent > gov_.arc(p.arc).config.voice_credits_per_round) throw Error(Errc::InsufficientCredits);
  p.plural[voter] = {j.at("votes").get<std::int64_t>(), credits};
}

void Commons::apply_epistemic_vote_cast(const json& j) {
  auto& p = gov_.proposal(j.at("proposal").get<ProposalId>());
  if (p.state != ProposalState::Voting) throw Error(Errc::NotVoting);
  p.epistemic[j.at("voter").get<SoulId>()] = j.at("support").get<bool>();
}

void Commons::apply_token_vote_cast(const json& j) {
  auto& p = gov_.proposal(j.at("proposal").get<ProposalId>());
  if (p.state != ProposalState::Voting) throw Error(Errc::NotVoting);
  p.token_votes[j.at("voter").get<SoulId>()] = {j.at("support").get<bool>(), j.at("weight").get<Amount>()};
}

void Commons::apply_delegated(const json& j) {
  const auto from = j.at("from").get<SoulId>();
  const auto to = j.at("to").get<SoulId>();
  gov_.delegations[from] = to;
  if (!governance::acyclic(gov_.delegations)) throw Error(Errc::CycleDetected);
}

void Commons::apply_undelegated(const json& j) { gov_.delegations.erase(j.at("from").get<SoulId>()); }

void Commons::apply_proposal_tallied(const json& j) {
  auto& p = gov_.proposal(j.at("proposal").get<ProposalId>());
  if (p.state != ProposalState::Voting) throw Error(Errc::NotVoting);
  // The result is a pure function of state, so it is recomputed rather than trusted.
  auto result = tally_preview(p);
  if (governance::to_json(result) != j.at("result")) throw Error(Errc::CorruptLog, "tally does not recompute");
  p.tally = result;
  if (result.approved) {
    p.state = ProposalState::Queued;
    p.queued_until = now() + gov_.arc(p.arc).config.timelock_epochs;
  } else {
    p.state = ProposalState::Rejected;
  }
}

void Commons::apply_proposal_vetoed(const json& j) {
  auto& p = gov_.proposal(j.at("proposal").get<ProposalId>());
  if (p.state != ProposalState::Queued) throw Error(Errc::NotQueued);
  p.state = ProposalState::Vetoed;
}

void Commons::apply_proposal_executed(const json& j) {
  auto& p = gov_.proposal(j.at("proposal").get<ProposalId>());
  if (p.state != ProposalState::Queued) throw Error(Errc::NotQueued);
  if (now() < p.queued_until) throw Error(Errc::TimelockActive);
  auto& arc = gov_.arc(p.arc);
  if (p.kind == ProposalKind::TreasurySpend) {
    ledger_.move(arc.treasury, AccountId::of(p.payload.at("to").get<SoulId>()), p.payload.at("amount").get<Amount>());
  }
  auto changes = config_changes(p);
  if (!changes.is_null()) arc.config = merged_config(arc.config, changes);
  p.state = ProposalState::Executed;
  p.executed_epoch = now();
}

}  // namespace commons
