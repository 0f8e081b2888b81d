#include <algorithm>

#include "commons/commons.hpp"

namespace commons {

using funding::MilestoneStatus;

RoundId Commons::open_round(ArcId funder, Amount pool, const std::vector<SoulId>& projects, funding::MatchingMode mode,
                            std::optional<reputation::Category> require_stake) {
  const auto& arc = gov_.arc(funder);
  if (pool <= 0) throw Error(Errc::ZeroAmount, "matching pool");
  if (projects.empty()) throw Error(Errc::EmptyProjects);
  std::set<SoulId> unique(projects.begin(), projects.end());
  if (unique.size() != projects.size()) throw Error(Errc::BadPayload, "duplicate project");
  for (auto p : unique) require_soul(p);
  if (ledger_.balance(arc.treasury) < pool) {
    throw Error(Errc::InsufficientTreasury, "treasury " + std::to_string(ledger_.balance(arc.treasury)) + " < pool " +
                                                std::to_string(pool));
  }
  const RoundId id{funding_.rounds_created + 1};
  commit("RoundOpened", {{"round", id},
                         {"arc", funder},
                         {"pool", pool},
                         {"projects", unique},
                         {"mode", funding::to_string(mode)},
                         {"require_stake", require_stake ? json(reputation::to_string(*require_stake)) : json(nullptr)}});
  return id;
}

void Commons::contribute(RoundId round, SoulId contributor, SoulId project, Amount amount) {
  const auto& r = funding_.round(round);
  require_soul(contributor);
  if (r.settled) throw Error(Errc::RoundClosed);
  if (std::find(r.projects.begin(), r.projects.end(), project) == r.projects.end()) {
    throw Error(Errc::UnknownProject, "soul#" + std::to_string(project.value));
  }
  if (amount <= 0) throw Error(Errc::ZeroAmount, "contribution");
  if (r.require_stake && !has_covering_stake(contributor, *r.require_stake)) {
    throw Error(Errc::StakeRequired, std::string(reputation::to_string(*r.require_stake)));
  }
  if (free_balance(contributor) < amount) throw Error(Errc::InsufficientFree, "contribution");
  commit("Contributed", {{"round", round}, {"contributor", contributor}, {"project", project}, {"amount", amount}});
}

void Commons::import_contributions_csv(RoundId round, std::string_view csv) {
  const auto rows = funding::parse_contributions_csv(csv);
  // All-or-nothing: rehearse on a copy first.
  Commons rehearsal = *this;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      rehearsal.contribute(round, rows[i].contributor, rows[i].project, rows[i].amount);
    } catch (const Error& e) {
      throw Error(e.code(), "csv row " + std::to_string(i + 2) + ": " + e.what());
    }
  }
  for (const auto& c : rows) contribute(round, c.contributor, c.project, c.amount);
}

funding::MatchResult Commons::compute_matching(RoundId round) const {
  const auto& r = funding_.round(round);
  if (r.settled) throw Error(Errc::RoundClosed);
  return funding::compute_matching(funding::aggregate(r.projects, r.contributions), r.pool, r.mode);
}

std::vector<Payout> Commons::settle_round(RoundId round) {
  const auto& r = funding_.round(round);
  if (r.settled) throw Error(Errc::AlreadySettled);
  std::vector<Payout> payouts;
  json out = json::array();
  if (!r.contributions.empty()) {
    for (const auto& pm : compute_matching(round).projects) {
      payouts.push_back({pm.project, pm.contributed, pm.match});
      out.push_back({{"project", pm.project}, {"contributed", pm.contributed}, {"match", pm.match}});
    }
  }
  commit("RoundSettled", {{"round", round}, {"payouts", out}});
  return payouts;
}

ProgramId Commons::create_mission_program(ArcId funder, SoulId director, Amount budget,
                                          const std::vector<MilestoneSpec>& milestones) {
  const auto& arc = gov_.arc(funder);
  require_soul(director);
  if (budget <= 0) throw Error(Errc::ZeroAmount, "program budget");
  if (milestones.empty()) throw Error(Errc::BadMilestone, "a program needs milestones");
  Amount planned = 0;
  json ms = json::array();
  for (const auto& m : milestones) {
    if (m.tranche <= 0) throw Error(Errc::BadMilestone, "tranche must be positive");
    planned += m.tranche;
    ms.push_back({{"description", to_hex(sha256(m.description))}, {"tranche", m.tranche}});
  }
  if (planned > budget) {
    throw Error(Errc::BudgetExceeded, "tranches " + std::to_string(planned) + " > budget " + std::to_string(budget));
  }
  if (ledger_.balance(arc.treasury) < budget) throw Error(Errc::InsufficientTreasury);
  const ProgramId id{funding_.programs_created + 1};
  commit("ProgramCreated", {{"program", id}, {"arc", funder}, {"director", director}, {"budget", budget}, {"milestones", ms}});
  return id;
}

void Commons::report_milestone(ProgramId program, std::size_t index, SoulId caller) {
  const auto& prog = funding_.program(program);
  if (caller != prog.director) throw Error(Errc::NotAuthorized, "only the director reports milestones");
  if (index >= prog.milestones.size()) throw Error(Errc::BadMilestone, "no milestone #" + std::to_string(index));
  if (prog.milestones[index].status != MilestoneStatus::Pending) {
    throw Error(Errc::BadMilestone, "milestone is " + std::string(funding::to_string(prog.milestones[index].status)));
  }
  commit("MilestoneReported", {{"program", program}, {"index", index}});
}

void Commons::release_tranche(ProgramId program, std::size_t index, SoulId caller, SoulId recipient) {
  const auto& prog = funding_.program(program);
  if (caller != prog.director) throw Error(Errc::NotAuthorized, "only the director releases tranches");
  require_soul(recipient);
  if (index >= prog.milestones.size()) throw Error(Errc::BadMilestone, "no milestone #" + std::to_string(index));
  for (std::size_t i = 0; i < index; ++i) {
    if (prog.milestones[i].status != MilestoneStatus::Released) {
      throw Error(Errc::OutOfOrder, "milestone #" + std::to_string(i) + " not yet released");
    }
  }
  const auto& m = prog.milestones[index];
  if (m.status != MilestoneStatus::Reported) throw Error(Errc::NotReported);
  if (prog.released + m.tranche > prog.budget) throw Error(Errc::BudgetExceeded);
  commit("TrancheReleased", {{"program", program}, {"index", index}, {"recipient", recipient}});
}

Amount Commons::cancel_program(ProgramId program, SoulId caller) {
  const auto& prog = funding_.program(program);
  if (caller != prog.director) throw Error(Errc::NotAuthorized, "only the director cancels");
  if (prog.cancelled) throw Error(Errc::BadMilestone, "program already cancelled");
  const Amount refund = ledger_.balance(prog.account);
  commit("ProgramCancelled", {{"program", program}, {"refund", refund}});
  return refund;
}

void Commons::apply_round_opened(const json& p) {
  funding::Round r;
  r.id = p.at("round").get<RoundId>();
  if (r.id.value != funding_.rounds_created + 1) throw Error(Errc::CorruptLog, "round ids must be sequential");
  r.arc = p.at("arc").get<ArcId>();
  r.escrow = AccountId{AccountKind::Escrow, r.id.value};
  r.pool = p.at("pool").get<Amount>();
  r.projects = p.at("projects").get<std::vector<SoulId>>();
  std::sort(r.projects.begin(), r.projects.end());
  r.mode = funding::mode_or_throw(p.at("mode").get<std::string>());
  if (!p.at("require_stake").is_null()) {
    r.require_stake = reputation::category_or_throw(p.at("require_stake").get<std::string>());
  }
  ledger_.open(r.escrow);
  ledger_.move(gov_.arc(r.arc).treasury, r.escrow, r.pool);
  funding_.rounds.emplace(r.id, std::move(r));
  funding_.rounds_created = p.at("round").get<RoundId>().value;
}

void Commons::apply_contributed(const json& p) {
  auto& r = funding_.round(p.at("round").get<RoundId>());
  if (r.settled) throw Error(Errc::RoundClosed);
  funding::Contribution c{p.at("contributor").get<SoulId>(), p.at("project").get<SoulId>(), p.at("amount").get<Amount>()};
  ledger_.move(AccountId::of(c.contributor), r.escrow, c.amount);
  r.contributions.push_back(c);
}

void Commons::apply_round_settled(const json& p) {
  auto& r = funding_.round(p.at("round").get<RoundId>());
  if (r.settled) throw Error(Errc::AlreadySettled);
  json expected = json::array();
  if (!r.contributions.empty()) {
    for (const auto& pm : funding::compute_matching(funding::aggregate(r.projects, r.contributions), r.pool, r.mode).projects) {
      expected.push_back({{"project", pm.project}, {"contributed", pm.contributed}, {"match", pm.match}});
      ledger_.move(r.escrow, AccountId::of(pm.project), pm.contributed + pm.match);
    }
  } else {
    ledger_.move(r.escrow, gov_.arc(r.arc).treasury, r.pool);
  }
  if (expected != p.at("payouts")) throw Error(Errc::CorruptLog, "payouts do not recompute");
  r.settled = true;
}

void Commons::apply_program_created(const json& p) {
  funding::MissionProgram prog;
  prog.id = p.at("program").get<ProgramId>();
  if (prog.id.value != funding_.programs_created + 1) throw Error(Errc::CorruptLog, "program ids must be sequential");
  prog.arc = p.at("arc").get<ArcId>();
  prog.director = p.at("director").get<SoulId>();
  prog.account = AccountId{AccountKind::Program, prog.id.value};
  prog.budget = p.at("budget").get<Amount>();
  for (const auto& m : p.at("milestones")) {
    funding::Milestone ms;
    ms.description = m.at("description").get<Digest>();
    ms.tranche = m.at("tranche").get<Amount>();
    prog.milestones.push_back(ms);
  }
  ledger_.open(prog.account);
  ledger_.move(gov_.arc(prog.arc).treasury, prog.account, prog.budget);
  funding_.programs.emplace(prog.id, std::move(prog));
  funding_.programs_created = p.at("program").get<ProgramId>().value;
}

void Commons::apply_milestone_reported(const json& p) {
  auto& prog = funding_.program(p.at("program").get<ProgramId>());
  auto& m = prog.milestones.at(p.at("index").get<std::size_t>());
  if (m.status != MilestoneStatus::Pending) throw Error(Errc::BadMilestone);
  m.status = MilestoneStatus::Reported;
}

void Commons::apply_tranche_released(const json& p) {
  auto& prog = funding_.program(p.at("program").get<ProgramId>());
  const auto index = p.at("index").get<std::size_t>();
  auto& m = prog.milestones.at(index);
  if (m.status != MilestoneStatus::Reported) throw Error(Errc::NotReported);
  for (std::size_t i = 0; i < index; ++i) {
    if (prog.milestones[i].status != MilestoneStatus::Released) throw Error(Errc::OutOfOrder);
  }
  const auto recipient = p.at("recipient").get<SoulId>();
  ledger_.move(prog.account, AccountId::of(recipient), m.tranche);
  prog.released += m.tranche;
  m.status = MilestoneStatus::Released;
  m.recipient = recipient;
}

void Commons::apply_program_cancelled(const json& p) {
  auto& prog = funding_.program(p.at("program").get<ProgramId>());
  const auto refund = p.at("refund").get<Amount>();
  if (refund != ledger_.balance(prog.account)) throw Error(Errc::CorruptLog, "refund must empty the program");
  if (refund > 0) ledger_.move(prog.account, gov_.arc(prog.arc).treasury, refund);
  for (auto& m : prog.milestones) {
    if (m.status != MilestoneStatus::Released) m.status = MilestoneStatus::Cancelled;
  }
  prog.cancelled = true;
}

}  // namespace commons
