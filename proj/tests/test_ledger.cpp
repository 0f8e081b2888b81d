#include <random>

#include "commons/commons.hpp"
#include "doctest.h"

using namespace commons;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::CorruptLog;
}

}  // namespace

TEST_CASE("mint transfer burn and their refusals") {
  Commons c;
  const auto a = c.create_soul();
  const auto b = c.create_soul();
  CHECK(c.mint(a, 100) == 100);
  c.transfer(a, b, 30);
  CHECK(c.balance(a) == 70);
  CHECK(c.balance(b) == 30);
  CHECK(code_of([&] { c.transfer(a, b, 71); }) == Errc::InsufficientFree);
  CHECK(code_of([&] { c.transfer(a, a, 1); }) == Errc::SelfTransfer);
  CHECK(code_of([&] { c.transfer(a, b, 0); }) == Errc::ZeroAmount);
  CHECK(code_of([&] { c.transfer(a, SoulId{9}, 1); }) == Errc::UnknownSoul);
  CHECK(code_of([&] { c.mint(a, -5); }) == Errc::ZeroAmount);
  c.burn(b, 30);
  CHECK(c.balance(b) == 0);
  CHECK(c.ledger().total_balances() == c.ledger().minted - c.ledger().burned);
}

TEST_CASE("vesting releases linearly after the cliff") {
  Commons c;
  const auto a = c.create_soul();
  const auto b = c.create_soul();
  c.mint(a, 1200);
  const auto s = c.create_vesting(a, 1200, 6, 12);
  // Oracle: 0 before the cliff, total * elapsed / duration after it, capped at total.
  for (Epoch e = 0; e <= 15; ++e) {
    const Amount expected = e < 6 ? 0 : std::min<Amount>(1200, 1200 * e / 12);
    CHECK(c.claimable(s, e) == expected);
  }
  CHECK(c.free_balance(a) == 0);
  CHECK(code_of([&] { c.transfer(a, b, 1); }) == Errc::InsufficientFree);
  c.advance_epoch(6);
  CHECK(c.claim_vesting(s) == 600);
  c.transfer(a, b, 600);
  CHECK(code_of([&] { c.transfer(a, b, 1); }) == Errc::InsufficientFree);
  c.advance_epoch(6);
  CHECK(c.claim_vesting(s) == 600);
  CHECK(c.claim_vesting(s) == 0);
  CHECK(c.locked(a) == 0);
}

TEST_CASE("vesting schedule validation") {
  Commons c;
  const auto a = c.create_soul();
  c.mint(a, 100);
  CHECK(code_of([&] { c.create_vesting(a, 100, 0, 12); }) == Errc::BadSchedule);
  CHECK(code_of([&] { c.create_vesting(a, 100, 13, 12); }) == Errc::BadSchedule);
  CHECK(code_of([&] { c.create_vesting(a, 101, 1, 12); }) == Errc::InsufficientFree);
  CHECK(code_of([&] { c.claimable(ScheduleId{4}, 0); }) == Errc::UnknownSchedule);
  CHECK(code_of([&] { c.advance_epoch(0); }) == Errc::BadEpochStep);
}

TEST_CASE("epoch-start balances ignore same-epoch changes") {
  Commons c;
  const auto a = c.create_soul();
  c.mint(a, 50);
  c.advance_epoch(1);
  c.mint(a, 1000);
  const auto& led = c.ledger();
  CHECK(led.balance_at_epoch_start(AccountId::of(a), 1) == 50);
  CHECK(led.balance_at_epoch_start(AccountId::of(a), 0) == 0);
  c.advance_epoch(1);
  CHECK(led.balance_at_epoch_start(AccountId::of(a), 2) == 1050);
}

TEST_CASE("random operation sequences conserve supply and replay exactly") {
  std::mt19937_64 rng(1234);
  Commons c;
  std::vector<SoulId> souls;
  for (int i = 0; i < 6; ++i) souls.push_back(c.create_soul());
  for (int step = 0; step < 600; ++step) {
    const auto a = souls[rng() % souls.size()];
    const auto b = souls[rng() % souls.size()];
    const Amount amt = static_cast<Amount>(rng() % 200) - 20;
    try {
      switch (rng() % 5) {
        case 0: c.mint(a, amt); break;
        case 1: c.transfer(a, b, amt); break;
        case 2: c.burn(a, amt); break;
        case 3: c.create_vesting(a, amt, 1 + static_cast<Epoch>(rng() % 3), 4); break;
        default:
          if (c.ledger().schedules_created > 0) c.claim_vesting(ScheduleId{1 + rng() % c.ledger().schedules_created});
          c.advance_epoch(1);
      }
    } catch (const Error&) {
    }
    const auto& led = c.ledger();
    REQUIRE(led.total_balances() == led.minted - led.burned);
    for (const auto& [id, acct] : led.accounts) REQUIRE((acct.balance >= 0 && acct.locked <= acct.balance));
  }
  CHECK(Commons::replay(c.log().records()).state_hash() == c.state_hash());
}
