#include "commons/commons.hpp"

namespace commons {

using reputation::Category;
using reputation::SbtStatus;

SbtId Commons::issue_sbt(ArcId issuer, SoulId subject, Category category, const reputation::Metadata& metadata) {
  gov_.arc(issuer);
  require_soul(subject);
  Credential cred;
  for (std::size_t i = 0; i < cred.salt.size(); i += 8) {
    const auto word = rng_();
    for (std::size_t b = 0; b < 8; ++b) cred.salt[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
  }
  cred.metadata = metadata;
  const SbtId id{sbts_.sbts_created + 1};
  const auto blinded = reputation::blind_metadata(cred.salt, category, metadata);
  commit("SbtIssued", {{"sbt", id},
                       {"issuer", issuer},
                       {"subject", subject},
                       {"category", reputation::to_string(category)},
                       {"commitment", to_hex(blinded)}});
  vault_.emplace(id, std::move(cred));
  return id;
}

SbtId Commons::issue_sbt(ArcId issuer, SoulId subject, std::string_view category,
                         const reputation::Metadata& metadata) {
  return issue_sbt(issuer, subject, reputation::category_or_throw(category), metadata);
}

void Commons::attempt_transfer_sbt(SbtId sbt, SoulId to) const {
  throw Error(Errc::NonTransferable,
              "sbt#" + std::to_string(sbt.value) + " cannot move to soul#" + std::to_string(to.value));
}

double Commons::reputation(SoulId soul, const reputation::ReputationWeights& weights) const {
  require_soul(soul);
  return sbts_.score(soul, weights);
}

double Commons::reputation(SoulId soul) const { return reputation(soul, reputation::ReputationWeights::defaults()); }

void Commons::check_sbt_authorization(SbtId sbt, ProposalId proposal, governance::ProposalKind expected) const {
  const auto& token = sbts_.at(sbt);
  auto it = gov_.proposals.find(proposal);
  if (it == gov_.proposals.end()) throw Error(Errc::NotAuthorized, "no such proposal");
  const auto& p = it->second;
  if (p.state != governance::ProposalState::Executed) throw Error(Errc::NotAuthorized, "proposal not executed");
  if (p.kind != expected) throw Error(Errc::NotAuthorized, "proposal kind does not authorize this");
  if (p.arc != token.issuer) throw Error(Errc::NotAuthorized, "proposal belongs to another ARC");
  if (!p.payload.contains("sbt") || p.payload.at("sbt").get<SbtId>() != sbt) {
    throw Error(Errc::NotAuthorized, "proposal targets another SBT");
  }
}

void Commons::revoke_sbt(SbtId sbt, ProposalId authorizing_proposal) {
  check_sbt_authorization(sbt, authorizing_proposal, governance::ProposalKind::SbtRevocation);
  if (!sbts_.at(sbt).counts()) throw Error(Errc::AlreadyRevoked, "sbt#" + std::to_string(sbt.value));
  commit("SbtRevoked", {{"sbt", sbt}, {"proposal", authorizing_proposal}});
}

void Commons::reinstate_sbt(SbtId sbt, ProposalId authorizing_proposal) {
  check_sbt_authorization(sbt, authorizing_proposal, governance::ProposalKind::SbtReinstate);
  if (sbts_.at(sbt).status != SbtStatus::Revoked) throw Error(Errc::NotRevoked);
  commit("SbtReinstated", {{"sbt", sbt}, {"proposal", authorizing_proposal}});
}

ProposalId Commons::appeal_sbt(SbtId sbt) {
  const auto& token = sbts_.at(sbt);
  if (token.appealed) throw Error(Errc::AppealExhausted, "one appeal per SBT");
  if (token.status != SbtStatus::Revoked) throw Error(Errc::NotRevoked);
  const auto issuer = token.issuer;
  const auto subject = token.subject;
  commit("SbtAppealed", {{"sbt", sbt}});
  const auto id = create_proposal(issuer, subject, governance::ProposalKind::SbtReinstate, {{"sbt", sbt}}, true);
  open_voting(id);
  return id;
}

Digest Commons::commit_metadata(SoulId soul) const {
  require_soul(soul);
  return sbts_.compute_root(soul);
}

reputation::DisclosureProof Commons::prove_count_at_least(SoulId soul, Category category, std::size_t k) const {
  require_soul(soul);
  return reputation::make_proof(sbts_, soul, category, k);
}

bool Commons::verify_proof(const Digest& root, const reputation::DisclosureProof& proof) noexcept {
  return reputation::verify_proof(root, proof);
}

StakeId Commons::stake_sbt(SoulId soul, SbtId sbt, Epoch until_epoch) {
  require_soul(soul);
  const auto& token = sbts_.at(sbt);
  if (token.subject != soul) throw Error(Errc::NotOwner, "sbt#" + std::to_string(sbt.value));
  if (!token.counts()) throw Error(Errc::AlreadyRevoked, "cannot stake a revoked SBT");
  if (token.stake) throw Error(Errc::AlreadyStaked, "sbt#" + std::to_string(sbt.value));
  if (until_epoch <= now()) throw Error(Errc::BadPayload, "stake must end in the future");
  const StakeId id{sbts_.stakes_created + 1};
  commit("StakeCreated", {{"stake", id}, {"soul", soul}, {"sbt", sbt}, {"until_epoch", until_epoch}});
  return id;
}

void Commons::unstake(StakeId stake) {
  auto it = sbts_.stakes.find(stake);
  if (it == sbts_.stakes.end()) throw Error(Errc::UnknownStake, std::to_string(stake.value));
  if (now() < it->second.until_epoch) {
    throw Error(Errc::NotMature, "locked until epoch " + std::to_string(it->second.until_epoch));
  }
  commit("StakeReleased", {{"stake", stake}});
}

const Credential* Commons::credential(SbtId sbt) const {
  auto it = vault_.find(sbt);
  return it == vault_.end() ? nullptr : &it->second;
}

bool Commons::has_covering_stake(SoulId soul, Category category) const {
  for (const auto& [id, stake] : sbts_.stakes) {
    if (stake.soul != soul || stake.until_epoch <= now()) continue;
    const auto& token = sbts_.at(stake.sbt);
    if (token.category == category && token.counts()) return true;
  }
  return false;
}

void Commons::apply_sbt_issued(const json& p) {
  reputation::Sbt s;
  s.id = p.at("sbt").get<SbtId>();
  if (s.id.value != sbts_.sbts_created + 1) throw Error(Errc::CorruptLog, "sbt ids must be sequential");
  s.issuer = p.at("issuer").get<ArcId>();
  s.subject = p.at("subject").get<SoulId>();
  s.category = reputation::category_or_throw(p.at("category").get<std::string>());
  s.issued_epoch = now();
  s.blinded = p.at("commitment").get<Digest>();
  ledger_.at(AccountId::of(s.subject));
  sbts_.sbts.emplace(s.id, s);
  sbts_.sbts_created = s.id.value;
  ++sbts_.active_counts[s.subject][static_cast<std::size_t>(s.category)];
  sbts_.refresh(s.subject);
}

void Commons::apply_sbt_revoked(const json& p) { sbts_.set_status(p.at("sbt").get<SbtId>(), SbtStatus::Revoked); }

void Commons::apply_sbt_reinstated(const json& p) {
  sbts_.set_status(p.at("sbt").get<SbtId>(), SbtStatus::Reinstated);
}

void Commons::apply_sbt_appealed(const json& p) { sbts_.at(p.at("sbt").get<SbtId>()).appealed = true; }

void Commons::apply_stake_created(const json& p) {
  reputation::Stake s;
  s.id = p.at("stake").get<StakeId>();
  s.soul = p.at("soul").get<SoulId>();
  s.sbt = p.at("sbt").get<SbtId>();
  s.until_epoch = p.at("until_epoch").get<Epoch>();
  auto& token = sbts_.at(s.sbt);
  if (token.stake || token.subject != s.soul) throw Error(Errc::CorruptLog, "invalid stake");
  token.stake = s.id;
  sbts_.stakes.emplace(s.id, s);
  sbts_.stakes_created = s.id.value;
}

void Commons::apply_stake_released(const json& p) {
  const auto id = p.at("stake").get<StakeId>();
  auto it = sbts_.stakes.find(id);
  if (it == sbts_.stakes.end()) throw Error(Errc::UnknownStake);
  sbts_.at(it->second.sbt).stake.reset();
  sbts_.stakes.erase(it);
}

}  // namespace commons
