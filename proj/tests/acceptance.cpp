// One line per acceptance criterion; exit status is the number of failures.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "commons/commons.hpp"
#include "commons/sim/flashloan.hpp"
#include "commons/sim/harness.hpp"
#include "commons/sim/report.hpp"
#include "commons/sim/scenario.hpp"

using namespace commons;
using governance::ProposalKind;
using reputation::Category;

namespace {

// Pinned tolerances.
constexpr Amount kQfTolerance = 0;
constexpr Amount kRoundTripAllowance = 2;
constexpr int kTransferAttempts = 1000;
constexpr int kRoyaltyCases = 10000;
constexpr int kCurveCases = 1000;
constexpr int kProofCases = 1000;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] C%02d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  if (!ok) ++failures;
}

template <class F>
std::optional<Errc> error_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

sim::Scenario bundled(const std::string& name) {
  return sim::load_scenario(slurp(std::string(COMMONS_SCENARIO_DIR) + "/" + name + ".json"));
}

void qf_headline() {
  Commons c;
  const auto funder = c.create_soul();
  const auto arc = c.create_arc({funder}, {}, {});
  c.fund_treasury(arc, 1010);
  const auto a = c.create_soul();
  const auto b = c.create_soul();
  const auto round = c.open_round(arc, 1010, {a, b});
  for (int i = 0; i < 100; ++i) {
    const auto d = c.create_soul();
    c.mint(d, 1);
    c.contribute(round, d, a, 1);
  }
  const auto whale = c.create_soul();
  c.mint(whale, 100);
  c.contribute(round, whale, b, 100);
  const auto m = c.compute_matching(round);
  const Amount ma = m.projects[0].match;
  const Amount mb = m.projects[1].match;
  const bool ok = std::llabs(ma - 1000) <= kQfTolerance && std::llabs(mb - 10) <= kQfTolerance && ma + mb == 1010 &&
                  ma == 100 * mb;
  report(1, "QF headline example", ok,
         "M_A=" + std::to_string(ma) + " M_B=" + std::to_string(mb) + " sum=" + std::to_string(ma + mb));
}

void qv_tables() {
  bool ok = true;
  std::string got;
  const std::int64_t cumulative[] = {1, 4, 9, 16};
  const std::int64_t marginal[] = {1, 5, 14, 30};
  for (int v = 1; v <= 4; ++v) {
    const auto c = governance::qv_cost(v, governance::QvCostMode::CumulativeSquare);
    const auto m = governance::qv_cost(v, governance::QvCostMode::MarginalSquare);
    ok = ok && c == cumulative[v - 1] && m == marginal[v - 1];
    got += std::to_string(c) + "/" + std::to_string(m) + " ";
  }
  report(2, "QV cost tables", ok, "cumulative/marginal for v=1..4: " + got);
}

void flash_loan_matrix() {
  bool ok = true;
  std::string cells;
  for (bool timelock : {true, false}) {
    for (bool snapshot : {true, false}) {
      sim::FlashLoanParams p;
      p.timelock = timelock;
      p.snapshot = snapshot;
      const auto o = sim::run_attack_flashloan(p);
      const bool expect_success = !timelock && !snapshot;
      ok = ok && o.succeeded == expect_success && o.treasury_delta() == (expect_success ? -182'000'000 : 0);
      cells += std::string("tl=") + (timelock ? "on" : "off") + ",snap=" + (snapshot ? "on" : "off") + "->" +
               o.result() + "(" + std::to_string(o.treasury_delta()) + ") ";
    }
  }
  report(3, "flash-loan defense matrix", ok, cells);
}

void non_transferability() {
  Commons c(CommonsOptions{17});
  std::vector<SoulId> souls;
  for (int i = 0; i < 20; ++i) souls.push_back(c.create_soul());
  const auto arc = c.create_arc(souls, {}, {});
  std::vector<SbtId> sbts;
  std::mt19937_64 rng(17);
  for (int i = 0; i < 60; ++i) sbts.push_back(c.issue_sbt(arc, souls[rng() % souls.size()], reputation::kCategories[rng() % 6]));
  const auto before = c.state_hash();
  const auto events = c.log().size();
  int refused = 0;
  for (int i = 0; i < kTransferAttempts; ++i) {
    const auto sbt = sbts[rng() % sbts.size()];
    const auto to = souls[rng() % souls.size()];
    if (error_of([&] { c.attempt_transfer_sbt(sbt, to); }) == Errc::NonTransferable) ++refused;
  }
  const bool ok = refused == kTransferAttempts && c.state_hash() == before && c.log().size() == events;
  report(4, "SBT non-transferability", ok,
         std::to_string(refused) + "/" + std::to_string(kTransferAttempts) + " NonTransferable, state hash " +
             (c.state_hash() == before ? "unchanged" : "CHANGED"));
}

void plutocracy() {
  const auto s = bundled("whale_capture");
  Amount whale = 0;
  Amount total = 0;
  for (const auto& a : s.agents) {
    total += a.tokens * a.count;
    if (a.role == sim::Role::Whale) whale += a.tokens * a.count;
  }
  const auto bicameral = sim::run(s, {.seed = std::nullopt, .mode = governance::Mode::Bicameral}).report;
  const auto token = sim::run(s, {.seed = std::nullopt, .mode = governance::Mode::TokenWeighted}).report;
  const bool token_approved = token["proposals"]["grab"]["tally"]["approved"].get<bool>();
  const bool bicameral_approved = bicameral["proposals"]["grab"]["tally"]["approved"].get<bool>();
  const auto diff = sim::compare(token, bicameral);
  double gb = 0;
  double gt = 0;
  for (const auto& row : bicameral["series"]) gb += row["gini"].get<double>();
  for (const auto& row : token["series"]) gt += row["gini"].get<double>();
  gb /= static_cast<double>(bicameral["series"].size());
  gt /= static_cast<double>(token["series"].size());
  const bool ok = 2 * whale >= total && token_approved && !bicameral_approved && gb < gt;
  char buf[256];
  std::snprintf(buf, sizeof buf, "whale share %.3f; token-only %s, bicameral %s; mean gini %.4f (bicameral) vs %.4f",
                static_cast<double>(whale) / static_cast<double>(total), token_approved ? "Approved" : "Rejected",
                bicameral["proposals"]["grab"]["outcome"].get<std::string>().c_str(), gb, gt);
  report(5, "plutocracy comparison", ok, buf);
}

void royalty_conservation() {
  std::mt19937_64 rng(606);
  int exact = 0;
  for (int i = 0; i < kRoyaltyCases; ++i) {
    std::vector<ip::RoyaltyShare> split;
    std::int64_t left = ip::kBasisPoints;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int k = 0; k < n - 1; ++k) {
      const auto bp = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(left + 1));
      split.push_back({SoulId(k + 1), bp});
      left -= bp;
    }
    split.push_back({SoulId(n), left});
    const Amount revenue = 1 + static_cast<Amount>(rng() % 10'000'000'000LL);
    const auto r = ip::split_revenue(AssetId(1), revenue, ip::kDefaultProtocolFeeBp, split);
    Amount sum = r.protocol_fee;
    for (const auto& [who, amt] : r.payouts) sum += amt;
    if (sum == revenue) ++exact;
  }
  report(6, "royalty conservation", exact == kRoyaltyCases,
         std::to_string(exact) + "/" + std::to_string(kRoyaltyCases) + " exact");
}

void anti_speculation() {
  std::mt19937_64 rng(707);
  int held = 0;
  long double worst_margin = 1e30L;
  for (int i = 0; i < kCurveCases; ++i) {
    Commons c;
    const auto owner = c.create_soul();
    const auto trader = c.create_soul();
    const auto arc = c.create_arc({owner}, {}, {});
    c.mint(trader, 1'000'000'000'000LL);
    const auto asset = c.mint_ipnft(arc, owner, sha256(std::to_string(i)), false, {{owner, 10000}});
    const ip::LinearCurve curve{static_cast<std::int64_t>(rng() % 100000), static_cast<std::int64_t>(rng() % 1000)};
    const ip::SellPenalty pen{1 + static_cast<std::int64_t>(rng() % 5000), 1 + static_cast<Epoch>(rng() % 365)};
    const auto pool = c.fractionalize(asset, owner, 1'000'000, curve, pen);
    const Amount pre = static_cast<Amount>(rng() % 5000);
    if (pre > 0) c.curve_buy(pool, trader, pre);
    const Amount units = 1 + static_cast<Amount>(rng() % 5000);
    const auto before = c.balance(trader);
    c.curve_buy(pool, trader, units);
    const auto gross = ip::sell_gross(curve, pre + units, units);
    c.curve_sell(pool, trader, units);
    const Amount loss = before - c.balance(trader);
    const long double phi = static_cast<long double>(pen.max_bp) / 10000.0L;
    const long double margin = static_cast<long double>(loss) - (phi * static_cast<long double>(gross) - kRoundTripAllowance);
    worst_margin = std::min(worst_margin, margin);
    if (loss > 0 && margin >= 0) ++held;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d/%d round trips lost >= phi0*gross - %lld (min slack %.3Lf)", held, kCurveCases,
                static_cast<long long>(kRoundTripAllowance), worst_margin);
  report(7, "anti-speculation round trip", held == kCurveCases, buf);
}

void founder_schedule() {
  const governance::GovernanceConfig cfg;
  const std::pair<Epoch, double> table[] = {{0, 0.51}, {360, 0.40}, {720, 0.20}, {1080, 0.0}};
  bool ok = true;
  std::string got;
  for (auto [e, w] : table) {
    const double v = governance::founder_veto_weight(cfg, e);
    ok = ok && v == w;
    got += std::to_string(e) + "->" + std::to_string(v).substr(0, 4) + " ";
  }
  Commons c;
  std::vector<SoulId> souls;
  for (int i = 0; i < 6; ++i) souls.push_back(c.create_soul());
  const auto arc = c.create_arc(souls, {souls[0], souls[1], souls[2], souls[3], souls[4]}, cfg);
  for (int i = 0; i < 6; ++i) c.issue_sbt(arc, souls[5], Category::PeerReview);
  c.fund_treasury(arc, 100);
  c.advance_epoch(1080);
  const auto p = c.submit_proposal(arc, souls[5], ProposalKind::TreasurySpend, {{"to", souls[5]}, {"amount", 10}});
  c.cast_plural_vote(p, souls[5], 1);
  c.cast_epistemic_vote(p, souls[5], true);
  c.tally(p);
  const auto veto = error_of([&] { c.council_veto(p, {souls[0], souls[1], souls[2]}); });
  ok = ok && veto == Errc::NotAuthorized;
  report(8, "founder veto schedule", ok,
         got + "; council_veto at 1080 -> " + (veto ? std::string(to_string(*veto)) : std::string("accepted")));
}

void vesting() {
  Commons c;
  const auto a = c.create_soul();
  const auto b = c.create_soul();
  c.mint(a, 1200);
  const auto s = c.create_vesting(a, 1200, 6, 12);
  const auto c3 = c.claimable(s, 3);
  const auto c6 = c.claimable(s, 6);
  const auto c12 = c.claimable(s, 12);
  const auto locked = error_of([&] { c.transfer(a, b, 1); });
  const bool ok = c3 == 0 && c6 == 600 && c12 == 1200 && locked == Errc::InsufficientFree;
  report(9, "vesting schedule", ok,
         "claimable " + std::to_string(c3) + "/" + std::to_string(c6) + "/" + std::to_string(c12) +
             ", locked transfer -> " + (locked ? std::string(to_string(*locked)) : std::string("accepted")));
}

void disclosure_proofs() {
  std::mt19937_64 rng(1010);
  Commons c(CommonsOptions{1010});
  const auto issuer = c.create_soul();
  const auto arc = c.create_arc({issuer}, {}, {});
  int complete = 0;
  int tamper_rejected = 0;
  int dup_rejected = 0;
  for (int i = 0; i < kProofCases; ++i) {
    const auto soul = c.create_soul();
    const auto cat = reputation::kCategories[rng() % 6];
    const auto count = 1 + static_cast<std::size_t>(rng() % 12);
    for (std::size_t k = 0; k < count; ++k) c.issue_sbt(arc, soul, cat);
    for (int k = static_cast<int>(rng() % 6); k > 0; --k) c.issue_sbt(arc, soul, reputation::kCategories[rng() % 6]);
    const auto root = c.commit_metadata(soul);
    const auto k = 1 + static_cast<std::size_t>(rng() % count);
    const auto proof = c.prove_count_at_least(soul, cat, k);
    if (Commons::verify_proof(root, proof)) ++complete;

    // Flip one byte somewhere in the proof's digests.
    auto bad = proof;
    std::vector<std::uint8_t*> bytes;
    for (auto& x : bad.root) bytes.push_back(&x);
    for (auto& br : bad.branches) {
      for (auto& x : br.leaf_digest) bytes.push_back(&x);
      for (auto& step : br.path)
        for (auto& x : step.sibling) bytes.push_back(&x);
    }
    *bytes[rng() % bytes.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    if (!Commons::verify_proof(root, bad)) ++tamper_rejected;

    auto dup = proof;
    dup.branches.push_back(dup.branches[rng() % dup.branches.size()]);
    dup.k = dup.branches.size();
    if (!Commons::verify_proof(root, dup)) ++dup_rejected;
  }
  const bool ok = complete == kProofCases && tamper_rejected == kProofCases && dup_rejected == kProofCases;
  report(10, "disclosure proofs", ok,
         "complete " + std::to_string(complete) + ", tamper rejected " + std::to_string(tamper_rejected) +
             ", duplication rejected " + std::to_string(dup_rejected) + " of " + std::to_string(kProofCases));
}

void determinism() {
  bool ok = true;
  std::string detail;
  for (const auto* name : {"whale_capture", "apathy", "flashloan", "speculation"}) {
    const auto s = bundled(name);
    const auto a = sim::run(s);
    const auto b = sim::run(s);
    const auto replayed = Commons::replay(parse_jsonl(a.world.log().to_jsonl()));
    const bool same = a.report["content_hash"] == b.report["content_hash"];
    const bool replay = to_hex(replayed.state_hash()) == a.report["final_state_hash"].get<std::string>();
    ok = ok && same && replay;
    detail += std::string(name) + (same ? " same" : " DIFFERENT") + (replay ? "/replay-ok " : "/replay-MISMATCH ");
  }
  report(11, "determinism and replay", ok, detail);
}

void timelock_boundary() {
  Commons c;
  std::vector<SoulId> souls;
  for (int i = 0; i < 3; ++i) souls.push_back(c.create_soul());
  governance::GovernanceConfig cfg;
  cfg.timelock_epochs = 3;
  const auto arc = c.create_arc(souls, {}, cfg);
  for (int i = 0; i < 6; ++i) c.issue_sbt(arc, souls[0], Category::PeerReview);
  c.fund_treasury(arc, 100);
  c.advance_epoch(10);
  const auto p = c.submit_proposal(arc, souls[0], ProposalKind::TreasurySpend, {{"to", souls[1]}, {"amount", 10}});
  c.cast_plural_vote(p, souls[0], 1);
  c.cast_epistemic_vote(p, souls[0], true);
  c.tally(p);
  const Epoch e = c.now();
  c.advance_epoch(2);
  const auto early = error_of([&] { c.execute(p); });
  c.advance_epoch(1);
  const auto on_time = error_of([&] { c.execute(p); });
  const bool ok = early == Errc::TimelockActive && !on_time &&
                  c.governance().proposal(p).state == governance::ProposalState::Executed;
  report(12, "timelock boundary", ok,
         "queued at " + std::to_string(e) + "; e+2 -> " + (early ? std::string(to_string(*early)) : "executed") +
             ", e+3 -> " + (on_time ? std::string(to_string(*on_time)) : "executed"));
}

}  // namespace

int main() {
  const std::pair<const char*, void (*)()> criteria[] = {
      {"C01", qf_headline},        {"C02", qv_tables},         {"C03", flash_loan_matrix},
      {"C04", non_transferability}, {"C05", plutocracy},        {"C06", royalty_conservation},
      {"C07", anti_speculation},   {"C08", founder_schedule},  {"C09", vesting},
      {"C10", disclosure_proofs},  {"C11", determinism},       {"C12", timelock_boundary},
  };
  for (const auto& [id, fn] : criteria) {
    try {
      fn();
    } catch (const std::exception& e) {
      std::printf("[FAIL] %s raised: %s\n", id, e.what());
      ++failures;
    }
  }
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
