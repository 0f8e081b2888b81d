#include "commons/sim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "commons/sim/flashloan.hpp"
#include "commons/sim/report.hpp"

namespace commons::sim {

using governance::Mode;
using governance::ProposalKind;
using governance::ProposalState;

std::vector<std::string> check_invariants(const Commons& c) {
  std::vector<std::string> bad;
  auto flag = [&](const char* name) {
    if (std::find(bad.begin(), bad.end(), name) == bad.end()) bad.emplace_back(name);
  };
  const auto& led = c.ledger();
  if (led.total_balances() != led.minted - led.burned) flag("ledger.conservation");
  std::map<SoulId, Amount> unvested;
  for (const auto& [id, s] : led.schedules) {
    if (s.claimed < 0 || s.claimed > s.total) flag("ledger.vesting");
    unvested[s.owner] += s.total - s.claimed;
  }
  for (const auto& [id, a] : led.accounts) {
    if (a.balance < 0 || a.locked < 0 || a.locked > a.balance) flag("ledger.non_negative");
    const Amount expected_lock = id.kind == AccountKind::Soul ? unvested[SoulId{id.number}] : 0;
    if (a.locked != expected_lock) flag("ledger.vesting");
  }

  const auto& reg = c.sbts();
  std::map<SoulId, std::array<std::int64_t, 6>> counts;
  for (const auto& [id, s] : reg.sbts) {
    auto& row = counts[s.subject];
    if (s.counts()) ++row[static_cast<std::size_t>(s.category)];
  }
  for (const auto& [soul, row] : counts) {
    for (auto cat : reputation::kCategories) {
      if (reg.count(soul, cat) != row[static_cast<std::size_t>(cat)]) flag("reputation.counts");
    }
    auto root = reg.roots.find(soul);
    if (root == reg.roots.end() || root->second != reg.compute_root(soul)) flag("reputation.commitment_root");
    const auto w = reputation::ReputationWeights::defaults();
    if (reg.score(soul, w) != reg.recount(soul, w)) flag("reputation.score");
  }
  for (const auto& [id, st] : reg.stakes) {
    if (reg.at(st.sbt).stake != id) flag("reputation.stakes");
  }

  const auto& gov = c.governance();
  if (!governance::acyclic(gov.delegations)) flag("governance.acyclic");
  for (const auto& [key, spent] : gov.credits_spent) {
    if (spent < 0 || spent > gov.arc(std::get<0>(key)).config.voice_credits_per_round) flag("governance.qv_budget");
  }
  for (const auto& [id, p] : gov.proposals) {
    if (p.executed_epoch && *p.executed_epoch < p.queued_until) flag("governance.timelock");
    if (p.state != ProposalState::Draft && p.snapshot_epoch > c.now()) flag("governance.snapshot");
    const bool tallied = p.state != ProposalState::Draft && p.state != ProposalState::Voting;
    if (tallied != p.tally.has_value()) flag("governance.state_machine");
    for (const auto& [voter, ballot] : p.plural) {
      const auto& cfg = gov.arc(p.arc).config;
      if (ballot.credits != governance::qv_cost(std::llabs(ballot.votes), cfg.qv_cost_mode)) flag("governance.qv_cost");
    }
  }
  for (const auto& [id, arc] : gov.arcs) {
    if (arc.members.empty()) flag("governance.members");
    if (!governance::validate(arc.config).empty()) flag("governance.config");
  }

  const auto& fund = c.funding();
  for (const auto& [id, r] : fund.rounds) {
    Amount expected = 0;
    if (!r.settled) {
      expected = r.pool;
      for (const auto& k : r.contributions) expected += k.amount;
    }
    if (led.balance(r.escrow) != expected) flag("funding.escrow");
  }
  for (const auto& [id, p] : fund.programs) {
    if (p.released > p.budget) flag("funding.budget");
    const Amount expected = p.cancelled ? 0 : p.budget - p.released;
    if (led.balance(p.account) != expected) flag("funding.budget");
    bool gap = false;
    for (const auto& m : p.milestones) {
      if (m.status != funding::MilestoneStatus::Released) gap = true;
      else if (gap) flag("funding.order");
    }
  }

  const auto& ipst = c.ip();
  for (const auto& [id, a] : ipst.assets) {
    if (!ip::valid_split(a.royalty_split)) flag("ip.split");
    if (a.open_access && !a.noncommercial_license) flag("ip.open_access");
    if (a.has_exclusive() && a.licenses.size() != 1) flag("ip.exclusive");
  }
  for (const auto& [id, p] : ipst.pools) {
    Amount held = 0;
    for (const auto& [soul, lots] : p.holdings) {
      for (const auto& lot : lots) held += lot.units;
    }
    if (held != p.supply || p.supply < 0 || p.supply > p.supply_cap) flag("ip.supply");
    const auto reserve = led.balance(p.reserve);
    const long double drift = std::fabs(static_cast<long double>(reserve) - ip::reserve_integral(p.curve, p.supply));
    if (reserve < 0 || drift > static_cast<long double>(p.trades)) flag("ip.reserve");
  }
  return bad;
}

namespace {

struct World {
  const Scenario& s;
  Commons c;
  std::mt19937_64 rng;
  std::map<std::string, SoulId> souls;
  std::map<SoulId, Role> roles;
  std::map<SoulId, std::string> names;
  ArcId arc;
  std::map<std::string, ProposalId> proposals;
  std::map<std::string, RoundId> rounds;
  std::map<std::string, AssetId> assets;
  std::map<std::string, PoolId> pools;
  std::set<SoulId> voted;
  json captures = json::array();
  json step_errors = json::array();
  json series = json::array();
  std::int64_t refused_ballots{0};

  World(const Scenario& sc, std::uint64_t seed) : s(sc), c(CommonsOptions{seed}), rng(seed) {}

  SoulId one(const json& v) const { return souls.at(select_agents(s, v.get<std::string>()).front()); }
  std::vector<SoulId> many(const json& v) const {
    std::vector<SoulId> out;
    for (const auto& n : select_agents(s, v.get<std::string>())) out.push_back(souls.at(n));
    return out;
  }

  void verify() const {
    auto bad = check_invariants(c);
    if (!bad.empty()) throw Error(Errc::InvariantViolation, bad.front());
  }

  void record_metrics() {
    const auto& a = c.governance().arc(arc);
    std::vector<double> power;
    for (auto m : a.members) {
      if (a.config.mode == Mode::TokenWeighted) {
        power.push_back(static_cast<double>(c.balance(m)));
      } else {
        power.push_back(c.sbts().score(m, a.config.weights) +
                        static_cast<double>(governance::max_affordable_votes(a.config.voice_credits_per_round,
                                                                             a.config.qv_cost_mode)));
      }
    }
    double g = 0;
    try {
      g = gini(power);
    } catch (const Error&) {
    }
    series.push_back({{"epoch", c.now()},
                      {"gini", g},
                      {"participation", static_cast<double>(voted.size()) / static_cast<double>(a.members.size())},
                      {"treasury", c.treasury_balance(arc)}});
    voted.clear();
  }

  void setup(std::optional<Mode> mode) {
    for (const auto& name : agent_names(s)) {
      const auto id = c.create_soul();
      souls[name] = id;
      names[id] = name;
    }
    for (const auto& spec : s.agents) {
      for (const auto& name : select_agents(s, spec.name)) {
        roles[souls.at(name)] = spec.role;
        if (spec.tokens > 0) c.mint(souls.at(name), spec.tokens);
      }
    }
    auto cfg = s.governance;
    if (mode) cfg.mode = *mode;
    std::vector<SoulId> members;
    for (const auto& [id, name] : names) members.push_back(id);
    std::vector<SoulId> council;
    if (!s.council.empty()) council = many(json(s.council));
    arc = c.create_arc(members, council, cfg);
    if (s.treasury > 0) c.fund_treasury(arc, s.treasury);
    for (const auto& spec : s.agents) {
      for (const auto& name : select_agents(s, spec.name)) {
        for (const auto& [cat, range] : spec.sbts) {
          const auto span = static_cast<std::uint64_t>(range.hi - range.lo + 1);
          const auto n = range.lo + static_cast<std::int64_t>(rng() % span);
          for (std::int64_t k = 0; k < n; ++k) {
            c.issue_sbt(arc, souls.at(name), cat, {{"agent", name}, {"index", std::to_string(k)}});
          }
        }
      }
    }
    verify();
    record_metrics();
    c.advance_epoch(1);
  }

  void cast(ProposalId p, SoulId voter, bool support, std::int64_t votes) {
    const auto& a = c.governance().arc(c.governance().proposal(p).arc);
    bool any = false;
    auto attempt = [&](auto&& fn) {
      try {
        fn();
        any = true;
      } catch (const Error& e) {
        if (e.code() != Errc::BelowThreshold && e.code() != Errc::NoVotingPower &&
            e.code() != Errc::InsufficientCredits) {
          throw;
        }
        ++refused_ballots;
      }
    };
    if (a.config.mode == Mode::TokenWeighted) {
      attempt([&] { c.cast_token_vote(p, voter, support); });
    } else {
      attempt([&] { c.cast_plural_vote(p, voter, support ? votes : -votes); });
      attempt([&] { c.cast_epistemic_vote(p, voter, support); });
    }
    if (any) voted.insert(voter);
  }

  void execute_step(const Step& st) {
    const auto& a = st.args;
    const auto& cmd = st.command;
    auto amount = [&](const char* k) { return a.at(k).get<Amount>(); };
    if (cmd == "propose") {
      const auto kind = governance::kind_or_throw(a.at("kind").get<std::string>());
      json payload = json::object();
      if (kind == ProposalKind::TreasurySpend) payload = {{"to", one(a.at("to"))}, {"amount", amount("amount")}};
      if (kind == ProposalKind::ParameterChange) payload = {{"key", a.at("key")}, {"value", a.at("value")}};
      if (kind == ProposalKind::Constitutional && a.contains("changes")) payload = {{"changes", a.at("changes")}};
      if (kind == ProposalKind::SbtRevocation || kind == ProposalKind::SbtReinstate) {
        throw Error(Errc::BadPayload, "SBT proposals are not scriptable");
      }
      proposals[a.at("id").get<std::string>()] = c.submit_proposal(arc, one(a.at("by")), kind, payload);
    } else if (cmd == "vote") {
      const auto p = proposals.at(a.at("proposal").get<std::string>());
      const auto votes = a.value("votes", std::int64_t{1});
      for (auto v : many(a.at("voters"))) cast(p, v, a.at("support").get<bool>(), votes);
    } else if (cmd == "turnout") {
      const auto p = proposals.at(a.at("proposal").get<std::string>());
      auto pool = many(a.at("voters"));
      const auto k = static_cast<std::size_t>(std::llround(a.at("rate").get<double>() * static_cast<double>(pool.size())));
      // Seeded partial Fisher-Yates; the engine's raw output keeps it portable.
      for (std::size_t i = 0; i < k && i < pool.size(); ++i) {
        const auto j = i + static_cast<std::size_t>(rng() % (pool.size() - i));
        std::swap(pool[i], pool[j]);
        cast(p, pool[i], a.at("support").get<bool>(), a.value("votes", std::int64_t{1}));
      }
    } else if (cmd == "tally") {
      c.tally(proposals.at(a.at("proposal").get<std::string>()));
    } else if (cmd == "execute") {
      const auto label = a.at("proposal").get<std::string>();
      const auto id = proposals.at(label);
      const auto receipt = c.execute(id);
      const auto& p = c.governance().proposal(id);
      const auto role = roles.at(p.proposer);
      if (p.kind == ProposalKind::TreasurySpend && (role == Role::Whale || role == Role::Attacker)) {
        captures.push_back({{"proposal", label},
                            {"epoch", c.now()},
                            {"by", names.at(p.proposer)},
                            {"amount", receipt.effect.at("amount")}});
      }
    } else if (cmd == "veto") {
      const auto signers = many(a.at("signers"));
      c.council_veto(proposals.at(a.at("proposal").get<std::string>()), {signers.begin(), signers.end()});
    } else if (cmd == "delegate") {
      for (auto from : many(a.at("from"))) c.delegate(from, one(a.at("to")));
    } else if (cmd == "undelegate") {
      for (auto from : many(a.at("from"))) c.undelegate(from);
    } else if (cmd == "transfer") {
      c.transfer(one(a.at("from")), one(a.at("to")), amount("amount"));
    } else if (cmd == "mint") {
      for (auto to : many(a.at("to"))) c.mint(to, amount("amount"));
    } else if (cmd == "issue_sbt") {
      const auto count = a.value("count", std::int64_t{1});
      for (auto to : many(a.at("to"))) {
        for (std::int64_t k = 0; k < count; ++k) {
          c.issue_sbt(arc, to, a.at("category").get<std::string>(), {{"agent", names.at(to)}, {"epoch", std::to_string(c.now())}});
        }
      }
    } else if (cmd == "open_round") {
      const auto mode = funding::mode_or_throw(a.value("mode", std::string("ProportionalSquares")));
      std::optional<reputation::Category> stake;
      if (a.contains("require_stake")) stake = reputation::category_or_throw(a.at("require_stake").get<std::string>());
      rounds[a.at("id").get<std::string>()] = c.open_round(arc, amount("pool"), many(a.at("projects")), mode, stake);
    } else if (cmd == "contribute") {
      const auto r = rounds.at(a.at("round").get<std::string>());
      for (auto from : many(a.at("from"))) c.contribute(r, from, one(a.at("project")), amount("amount"));
    } else if (cmd == "settle") {
      c.settle_round(rounds.at(a.at("round").get<std::string>()));
    } else if (cmd == "ip_mint") {
      std::vector<ip::RoyaltyShare> split;
      for (const auto& share : a.at("split")) split.push_back({one(share[0]), share[1].get<std::int64_t>()});
      const auto name = a.at("id").get<std::string>();
      assets[name] = c.mint_ipnft(arc, one(a.at("owner")), sha256(s.name + "/" + name), a.value("open_access", false), split);
    } else if (cmd == "fractionalize") {
      pools[a.at("id").get<std::string>()] =
          c.fractionalize(assets.at(a.at("asset").get<std::string>()), one(a.at("by")), amount("cap"),
                          {amount("base_milli"), amount("slope_milli")}, {amount("penalty_bp"), amount("horizon")});
    } else if (cmd == "buy") {
      c.curve_buy(pools.at(a.at("pool").get<std::string>()), one(a.at("by")), amount("units"));
    } else if (cmd == "sell") {
      c.curve_sell(pools.at(a.at("pool").get<std::string>()), one(a.at("by")), amount("units"));
    } else if (cmd == "royalties") {
      c.distribute_royalties(assets.at(a.at("asset").get<std::string>()), one(a.at("payer")), amount("revenue"));
    } else if (cmd == "license") {
      c.grant_commercial_license(assets.at(a.at("asset").get<std::string>()), one(a.at("by")), one(a.at("licensee")),
                                 amount("price"), a.value("exclusive", false));
    } else {
      throw Error(Errc::ParseError, "unknown command " + cmd);
    }
  }

  void step(const Step& st) {
    try {
      execute_step(st);
    } catch (const Error& e) {
      if (e.code() == Errc::InvariantViolation) throw;
      // Protocol refusals are outcomes worth reporting, not run failures.
      step_errors.push_back({{"epoch", c.now()}, {"do", st.command}, {"error", to_string(e.code())}});
    }
    verify();
  }

  json proposal_report() const {
    json out = json::object();
    for (const auto& [label, id] : proposals) {
      const auto& p = c.governance().proposal(id);
      std::string outcome(governance::to_string(p.state));
      if (p.state == ProposalState::Rejected) outcome += "(" + std::string(governance::to_string(p.tally->reason)) + ")";
      out[label] = {{"id", id},
                    {"kind", governance::to_string(p.kind)},
                    {"outcome", outcome},
                    {"tally", p.tally ? governance::to_json(*p.tally) : json(nullptr)}};
    }
    return out;
  }
};

}  // namespace

RunResult run(const Scenario& s, const RunOptions& options) {
  const auto seed = options.seed.value_or(s.seed);
  World w(s, seed);
  w.setup(options.mode);

  std::size_t i = 0;
  while (i < s.script.size()) {
    const Epoch at = s.script[i].at;
    if (at > w.c.now()) w.c.advance_epoch(at - w.c.now());
    for (; i < s.script.size() && s.script[i].at == at; ++i) w.step(s.script[i]);
    w.record_metrics();
  }

  json attack = nullptr;
  if (s.attack) {
    w.c.advance_epoch(1);
    auto outcome = attack_flashloan(w.c, w.arc, w.souls.at(select_agents(s, s.attack->attacker).front()), s.attack->loan);
    w.verify();
    attack = to_json(outcome);
    if (outcome.succeeded) {
      w.captures.push_back({{"proposal", "flashloan"},
                            {"epoch", w.c.now()},
                            {"by", s.attack->attacker},
                            {"amount", -outcome.treasury_delta()}});
    }
    w.record_metrics();
  }

  json counts = json::object();
  for (const auto& r : w.c.log().records()) {
    counts[r.kind] = counts.value(r.kind, std::int64_t{0}) + 1;
  }
  const auto& cfg = w.c.governance().arc(w.arc).config;
  json report = {{"scenario", s.name},
                 {"seed", seed},
                 {"mode", governance::to_string(cfg.mode)},
                 {"series", w.series},
                 {"event_counts", counts},
                 {"proposals", w.proposal_report()},
                 {"captures", w.captures},
                 {"attack", attack},
                 {"step_errors", w.step_errors},
                 {"refused_ballots", w.refused_ballots},
                 {"final_state_hash", to_hex(w.c.state_hash())}};
  return {seal_report(std::move(report)), std::move(w.c)};
}

}  // namespace commons::sim
