#include "commons/ledger.hpp"

#include <algorithm>

namespace commons::ledger {

Amount vested_amount(const VestingSchedule& s, Epoch at) {
  const Epoch elapsed = at - s.start_epoch;
  if (elapsed < s.cliff_epochs) return 0;
  if (elapsed >= s.duration_epochs) return s.total;
  const auto num = static_cast<Int128>(s.total) * elapsed;
  return static_cast<Amount>(num / s.duration_epochs);
}

Amount claimable_amount(const VestingSchedule& s, Epoch at) {
  return vested_amount(s, at) - s.claimed;
}

bool valid_schedule(Epoch cliff_epochs, Epoch duration_epochs) {
  return duration_epochs > 0 && cliff_epochs > 0 && cliff_epochs <= duration_epochs;
}

const Account* LedgerState::find(AccountId id) const {
  auto it = accounts.find(id);
  return it == accounts.end() ? nullptr : &it->second;
}

const Account& LedgerState::at(AccountId id) const {
  const auto* a = find(id);
  if (!a) {
    throw Error(id.kind == AccountKind::Soul ? Errc::UnknownSoul : Errc::UnknownAccount,
                to_string(id));
  }
  return *a;
}

Account& LedgerState::at(AccountId id) {
  return const_cast<Account&>(static_cast<const LedgerState&>(*this).at(id));
}

void LedgerState::open(AccountId id) {
  Account a;
  a.id = id;
  a.created_epoch = epoch;
  accounts.emplace(id, std::move(a));
}

void LedgerState::record(Account& a) {
  if (!a.history.empty() && a.history.back().first == epoch) {
    a.history.back().second = a.balance;
  } else {
    a.history.emplace_back(epoch, a.balance);
  }
}

void LedgerState::credit(AccountId id, Amount amount) {
  auto& a = at(id);
  a.balance += amount;
  record(a);
}

void LedgerState::debit(AccountId id, Amount amount) {
  auto& a = at(id);
  if (a.free() < amount) throw Error(Errc::InsufficientFree, to_string(id));
  a.balance -= amount;
  record(a);
}

void LedgerState::move(AccountId from, AccountId to, Amount amount) {
  if (amount < 0) throw Error(Errc::ZeroAmount, "negative transfer");
  debit(from, amount);
  credit(to, amount);
}

Amount LedgerState::balance_at_epoch_start(AccountId id, Epoch at_epoch) const {
  const auto* a = find(id);
  if (!a) return 0;
  auto it = std::lower_bound(a->history.begin(), a->history.end(), at_epoch,
                             [](const auto& entry, Epoch e) { return entry.first < e; });
  if (it == a->history.begin()) return 0;
  return std::prev(it)->second;
}

Amount LedgerState::total_balances() const {
  Amount sum = 0;
  for (const auto& [id, a] : accounts) sum += a.balance;
  return sum;
}

json LedgerState::to_json() const {
  json accts = json::object();
  for (const auto& [id, a] : accounts) {
    json hist = json::array();
    for (const auto& [e, b] : a.history) hist.push_back({e, b});
    accts[to_string(id)] = {{"balance", a.balance},
                            {"locked", a.locked},
                            {"created_epoch", a.created_epoch},
                            {"history", hist}};
  }
  json sched = json::object();
  for (const auto& [id, s] : schedules) {
    sched[std::to_string(id.value)] = {{"owner", s.owner},
                                       {"total", s.total},
                                       {"cliff_epochs", s.cliff_epochs},
                                       {"duration_epochs", s.duration_epochs},
                                       {"start_epoch", s.start_epoch},
                                       {"claimed", s.claimed}};
  }
  return {{"epoch", epoch},
          {"accounts", accts},
          {"schedules", sched},
          {"souls_created", souls_created},
          {"schedules_created", schedules_created},
          {"minted", minted},
          {"burned", burned}};
}

}  // namespace commons::ledger
