#include "commons/commons.hpp"

namespace commons {

SoulId Commons::create_soul() {
  const SoulId id{ledger_.souls_created + 1};
  commit("SoulCreated", {{"soul", id}});
  return id;
}

Amount Commons::mint(SoulId soul, Amount amount) {
  require_soul(soul);
  if (amount <= 0) throw Error(Errc::ZeroAmount, "mint");
  commit("Minted", {{"account", AccountId::of(soul)}, {"amount", amount}});
  return balance(soul);
}

void Commons::burn(SoulId soul, Amount amount) {
  require_soul(soul);
  if (amount <= 0) throw Error(Errc::ZeroAmount, "burn");
  if (free_balance(soul) < amount) throw Error(Errc::InsufficientFree, "burn");
  commit("Burned", {{"account", AccountId::of(soul)}, {"amount", amount}});
}

void Commons::transfer(SoulId from, SoulId to, Amount amount) {
  require_soul(from);
  require_soul(to);
  if (from == to) throw Error(Errc::SelfTransfer);
  if (amount <= 0) throw Error(Errc::ZeroAmount, "transfer");
  if (free_balance(from) < amount) {
    throw Error(Errc::InsufficientFree, "free " + std::to_string(free_balance(from)) + " < " + std::to_string(amount));
  }
  commit("Transferred", {{"from", AccountId::of(from)}, {"to", AccountId::of(to)}, {"amount", amount}});
}

ScheduleId Commons::create_vesting(SoulId owner, Amount total, Epoch cliff_epochs, Epoch duration_epochs) {
  require_soul(owner);
  if (!ledger::valid_schedule(cliff_epochs, duration_epochs)) {
    throw Error(Errc::BadSchedule, "need 0 < cliff <= duration");
  }
  if (total <= 0) throw Error(Errc::ZeroAmount, "vesting total");
  if (free_balance(owner) < total) throw Error(Errc::InsufficientFree, "vesting total exceeds free balance");
  const ScheduleId id{ledger_.schedules_created + 1};
  commit("VestingCreated", {{"schedule", id},
                            {"owner", owner},
                            {"total", total},
                            {"cliff_epochs", cliff_epochs},
                            {"duration_epochs", duration_epochs},
                            {"start_epoch", now()}});
  return id;
}

Amount Commons::claimable(ScheduleId schedule, Epoch at_epoch) const {
  auto it = ledger_.schedules.find(schedule);
  if (it == ledger_.schedules.end()) throw Error(Errc::UnknownSchedule, std::to_string(schedule.value));
  return ledger::claimable_amount(it->second, at_epoch);
}

Amount Commons::claim_vesting(ScheduleId schedule) {
  const Amount amount = claimable(schedule, now());
  if (amount > 0) commit("VestingClaimed", {{"schedule", schedule}, {"amount", amount}});
  return amount;
}

Epoch Commons::advance_epoch(Epoch n) {
  if (n < 1) throw Error(Errc::BadEpochStep, "advance by at least one epoch");
  commit("EpochAdvanced", {{"n", n}});
  return now();
}

Amount Commons::balance(SoulId soul) const {
  require_soul(soul);
  return ledger_.balance(AccountId::of(soul));
}

Amount Commons::balance(AccountId account) const { return ledger_.balance(account); }

Amount Commons::free_balance(SoulId soul) const {
  require_soul(soul);
  return ledger_.at(AccountId::of(soul)).free();
}

Amount Commons::locked(SoulId soul) const {
  require_soul(soul);
  return ledger_.at(AccountId::of(soul)).locked;
}

Amount Commons::treasury_balance(ArcId arc) const { return ledger_.balance(gov_.arc(arc).treasury); }

void Commons::apply_soul_created(const json& p) {
  const auto id = p.at("soul").get<SoulId>();
  if (id.value != ledger_.souls_created + 1) throw Error(Errc::CorruptLog, "soul ids must be sequential");
  ledger_.open(AccountId::of(id));
  ledger_.souls_created = id.value;
}

void Commons::apply_minted(const json& p) {
  const auto amount = p.at("amount").get<Amount>();
  if (amount <= 0) throw Error(Errc::ZeroAmount, "mint");
  ledger_.credit(p.at("account").get<AccountId>(), amount);
  ledger_.minted += amount;
}

void Commons::apply_burned(const json& p) {
  const auto amount = p.at("amount").get<Amount>();
  if (amount <= 0) throw Error(Errc::ZeroAmount, "burn");
  ledger_.debit(p.at("account").get<AccountId>(), amount);
  ledger_.burned += amount;
}

void Commons::apply_transferred(const json& p) {
  ledger_.move(p.at("from").get<AccountId>(), p.at("to").get<AccountId>(), p.at("amount").get<Amount>());
}

void Commons::apply_vesting_created(const json& p) {
  ledger::VestingSchedule s;
  s.id = p.at("schedule").get<ScheduleId>();
  s.owner = p.at("owner").get<SoulId>();
  s.total = p.at("total").get<Amount>();
  s.cliff_epochs = p.at("cliff_epochs").get<Epoch>();
  s.duration_epochs = p.at("duration_epochs").get<Epoch>();
  s.start_epoch = p.at("start_epoch").get<Epoch>();
  auto& owner = ledger_.at(AccountId::of(s.owner));
  if (owner.free() < s.total) throw Error(Errc::InsufficientFree, "vesting");
  owner.locked += s.total;
  ledger_.schedules.emplace(s.id, s);
  ledger_.schedules_created = s.id.value;
}

void Commons::apply_vesting_claimed(const json& p) {
  auto& s = ledger_.schedules.at(p.at("schedule").get<ScheduleId>());
  const auto amount = p.at("amount").get<Amount>();
  if (amount > ledger::claimable_amount(s, now())) throw Error(Errc::CorruptLog, "claim exceeds vested amount");
  s.claimed += amount;
  ledger_.at(AccountId::of(s.owner)).locked -= amount;
}

void Commons::apply_epoch_advanced(const json& p) {
  const auto n = p.at("n").get<Epoch>();
  if (n < 1) throw Error(Errc::BadEpochStep);
  ledger_.epoch += n;
}

}  // namespace commons
