#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace commons {

using json = nlohmann::json;

// Token base units. Never negative in committed state.
__extension__ typedef __int128 Int128;

using Amount = std::int64_t;
// 1 epoch = 1 day, 30 epochs = 1 month.
using Epoch = std::int64_t;

inline constexpr Epoch kEpochsPerMonth = 30;

template <class Tag>
struct Id {
  std::uint64_t value{0};

  constexpr Id() = default;
  constexpr explicit Id(std::uint64_t v) : value(v) {}

  friend constexpr auto operator<=>(const Id&, const Id&) = default;
};

template <class Tag>
void to_json(json& j, const Id<Tag>& id) {
  j = id.value;
}

template <class Tag>
void from_json(const json& j, Id<Tag>& id) {
  id.value = j.get<std::uint64_t>();
}

using SoulId = Id<struct SoulTag>;
using ArcId = Id<struct ArcTag>;
using SbtId = Id<struct SbtTag>;
using StakeId = Id<struct StakeTag>;
using ScheduleId = Id<struct ScheduleTag>;
using ProposalId = Id<struct ProposalTag>;
using RoundId = Id<struct RoundTag>;
using ProgramId = Id<struct ProgramTag>;
using AssetId = Id<struct AssetTag>;
using PoolId = Id<struct PoolTag>;

enum class AccountKind { Commons, Soul, Treasury, Escrow, Program, Reserve };

// Every token holder: Souls plus system accounts (treasuries, escrows, curve
// reserves, program budgets). Serialized as "kind:number".
struct AccountId {
  AccountKind kind{AccountKind::Soul};
  std::uint64_t number{0};

  friend constexpr auto operator<=>(const AccountId&, const AccountId&) = default;

  static constexpr AccountId of(SoulId s) { return {AccountKind::Soul, s.value}; }
  static constexpr AccountId commons_treasury() { return {AccountKind::Commons, 0}; }
};

std::string to_string(AccountId id);
AccountId parse_account(std::string_view text);
void to_json(json& j, const AccountId& id);
void from_json(const json& j, AccountId& id);

enum class Errc {
  UnknownSoul,
  UnknownAccount,
  ZeroAmount,
  InsufficientFree,
  SelfTransfer,
  UnknownSchedule,
  BadSchedule,
  BadEpochStep,
  UnknownArc,
  UnknownCategory,
  UnknownSbt,
  NonTransferable,
  NotAuthorized,
  AlreadyRevoked,
  NotRevoked,
  AppealExhausted,
  InsufficientCredentials,
  AlreadyStaked,
  NotMature,
  NotOwner,
  UnknownStake,
  NotMember,
  UnknownProposal,
  InsufficientCredits,
  NotVoting,
  NotDraft,
  BelowThreshold,
  NoVotingPower,
  WrongMode,
  CycleDetected,
  SelfDelegation,
  NotDelegating,
  NotQueued,
  InsufficientSigners,
  VetoOverridden,
  TimelockActive,
  CorruptSnapshot,
  BadConfig,
  BadPayload,
  EmptyProjects,
  InsufficientTreasury,
  UnknownRound,
  UnknownProject,
  StakeRequired,
  RoundClosed,
  NoContributions,
  AlreadySettled,
  UnknownProgram,
  OutOfOrder,
  NotReported,
  BudgetExceeded,
  BadMilestone,
  BadSplit,
  UnknownAsset,
  ExclusiveConflict,
  OpenAccessPermanent,
  AlreadyFractionalized,
  UnknownPool,
  SupplyCapExceeded,
  InsufficientUnits,
  ReserveUnderflow,
  ZeroRevenue,
  Empty,
  AllZero,
  ParseError,
  UnknownAgentRef,
  InvariantViolation,
  ScenarioMismatch,
  CorruptLog,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);
  explicit Error(Errc code);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace commons

template <class Tag>
struct std::hash<commons::Id<Tag>> {
  std::size_t operator()(const commons::Id<Tag>& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
