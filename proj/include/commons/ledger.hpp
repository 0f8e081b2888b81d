#pragma once

#include <map>
#include <utility>
#include <vector>

#include "commons/types.hpp"

namespace commons::ledger {

struct Account {
  AccountId id;
  Amount balance{0};
  // Sub-ledger of balance held by unclaimed vesting schedules.
  Amount locked{0};
  Epoch created_epoch{0};
  // (epoch, balance after last change in that epoch), ascending by epoch.
  std::vector<std::pair<Epoch, Amount>> history;

  Amount free() const noexcept { return balance - locked; }
};

struct VestingSchedule {
  ScheduleId id;
  SoulId owner;
  Amount total{0};
  Epoch cliff_epochs{0};
  Epoch duration_epochs{0};
  Epoch start_epoch{0};
  Amount claimed{0};
};

// Linear release after the cliff; the cliff epoch releases the pro-rata share.
Amount vested_amount(const VestingSchedule& s, Epoch at);
Amount claimable_amount(const VestingSchedule& s, Epoch at);
bool valid_schedule(Epoch cliff_epochs, Epoch duration_epochs);

struct LedgerState {
  Epoch epoch{0};
  std::map<AccountId, Account> accounts;
  std::map<ScheduleId, VestingSchedule> schedules;
  std::uint64_t souls_created{0};
  std::uint64_t schedules_created{0};
  Amount minted{0};
  Amount burned{0};

  const Account* find(AccountId id) const;
  const Account& at(AccountId id) const;
  Account& at(AccountId id);
  bool has_soul(SoulId s) const { return find(AccountId::of(s)) != nullptr; }

  void open(AccountId id);
  void credit(AccountId id, Amount amount);
  void debit(AccountId id, Amount amount);
  void move(AccountId from, AccountId to, Amount amount);

  Amount balance(AccountId id) const { return at(id).balance; }
  // Balance as of the start of `epoch` (after all changes in earlier epochs).
  Amount balance_at_epoch_start(AccountId id, Epoch epoch) const;
  Amount total_balances() const;

  json to_json() const;

 private:
  void record(Account& a);
};

}  // namespace commons::ledger
