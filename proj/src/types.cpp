#include "commons/types.hpp"

#include <array>
#include <charconv>
#include <utility>

namespace commons {

namespace {

constexpr std::array<std::pair<AccountKind, std::string_view>, 6> kKindNames{{
    {AccountKind::Commons, "commons"},
    {AccountKind::Soul, "soul"},
    {AccountKind::Treasury, "treasury"},
    {AccountKind::Escrow, "escrow"},
    {AccountKind::Program, "program"},
    {AccountKind::Reserve, "reserve"},
}};

}  // namespace

std::string to_string(AccountId id) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == id.kind) return std::string(name) + ":" + std::to_string(id.number);
  }
  return "?:" + std::to_string(id.number);
}

AccountId parse_account(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(Errc::BadPayload, "account id without kind: " + std::string(text));
  }
  const auto kind_name = text.substr(0, colon);
  const auto digits = text.substr(colon + 1);
  std::uint64_t number = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), number);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
    throw Error(Errc::BadPayload, "bad account number: " + std::string(text));
  }
  for (const auto& [kind, name] : kKindNames) {
    if (name == kind_name) return {kind, number};
  }
  throw Error(Errc::BadPayload, "unknown account kind: " + std::string(text));
}

void to_json(json& j, const AccountId& id) { j = to_string(id); }

void from_json(const json& j, AccountId& id) { id = parse_account(j.get<std::string>()); }

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::UnknownSoul: return "UnknownSoul";
    case Errc::UnknownAccount: return "UnknownAccount";
    case Errc::ZeroAmount: return "ZeroAmount";
    case Errc::InsufficientFree: return "InsufficientFree";
    case Errc::SelfTransfer: return "SelfTransfer";
    case Errc::UnknownSchedule: return "UnknownSchedule";
    case Errc::BadSchedule: return "BadSchedule";
    case Errc::BadEpochStep: return "BadEpochStep";
    case Errc::UnknownArc: return "UnknownArc";
    case Errc::UnknownCategory: return "UnknownCategory";
    case Errc::UnknownSbt: return "UnknownSbt";
    case Errc::NonTransferable: return "NonTransferable";
    case Errc::NotAuthorized: return "NotAuthorized";
    case Errc::AlreadyRevoked: return "AlreadyRevoked";
    case Errc::NotRevoked: return "NotRevoked";
    case Errc::AppealExhausted: return "AppealExhausted";
    case Errc::InsufficientCredentials: return "InsufficientCredentials";
    case Errc::AlreadyStaked: return "AlreadyStaked";
    case Errc::NotMature: return "NotMature";
    case Errc::NotOwner: return "NotOwner";
    case Errc::UnknownStake: return "UnknownStake";
    case Errc::NotMember: return "NotMember";
    case Errc::UnknownProposal: return "UnknownProposal";
    case Errc::InsufficientCredits: return "InsufficientCredits";
    case Errc::NotVoting: return "NotVoting";
    case Errc::NotDraft: return "NotDraft";
    case Errc::BelowThreshold: return "BelowThreshold";
    case Errc::NoVotingPower: return "NoVotingPower";
    case Errc::WrongMode: return "WrongMode";
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::SelfDelegation: return "SelfDelegation";
    case Errc::NotDelegating: return "NotDelegating";
    case Errc::NotQueued: return "NotQueued";
    case Errc::InsufficientSigners: return "InsufficientSigners";
    case Errc::VetoOverridden: return "VetoOverridden";
    case Errc::TimelockActive: return "TimelockActive";
    case Errc::CorruptSnapshot: return "CorruptSnapshot";
    case Errc::BadConfig: return "BadConfig";
    case Errc::BadPayload: return "BadPayload";
    case Errc::EmptyProjects: return "EmptyProjects";
    case Errc::InsufficientTreasury: return "InsufficientTreasury";
    case Errc::UnknownRound: return "UnknownRound";
    case Errc::UnknownProject: return "UnknownProject";
    case Errc::StakeRequired: return "StakeRequired";
    case Errc::RoundClosed: return "RoundClosed";
    case Errc::NoContributions: return "NoContributions";
    case Errc::AlreadySettled: return "AlreadySettled";
    case Errc::UnknownProgram: return "UnknownProgram";
    case Errc::OutOfOrder: return "OutOfOrder";
    case Errc::NotReported: return "NotReported";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::BadMilestone: return "BadMilestone";
    case Errc::BadSplit: return "BadSplit";
    case Errc::UnknownAsset: return "UnknownAsset";
    case Errc::ExclusiveConflict: return "ExclusiveConflict";
    case Errc::OpenAccessPermanent: return "OpenAccessPermanent";
    case Errc::AlreadyFractionalized: return "AlreadyFractionalized";
    case Errc::UnknownPool: return "UnknownPool";
    case Errc::SupplyCapExceeded: return "SupplyCapExceeded";
    case Errc::InsufficientUnits: return "InsufficientUnits";
    case Errc::ReserveUnderflow: return "ReserveUnderflow";
    case Errc::ZeroRevenue: return "ZeroRevenue";
    case Errc::Empty: return "Empty";
    case Errc::AllZero: return "AllZero";
    case Errc::ParseError: return "ParseError";
    case Errc::UnknownAgentRef: return "UnknownAgentRef";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::ScenarioMismatch: return "ScenarioMismatch";
    case Errc::CorruptLog: return "CorruptLog";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

Error::Error(Errc code) : std::runtime_error(std::string(to_string(code))), code_(code) {}

}  // namespace commons
