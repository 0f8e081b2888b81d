#include "commons/governance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace commons::governance {

std::vector<FounderStep> default_founder_schedule() {
  // Month 0 / 12 / 24 / 36 at 30 epochs per month.
  return {{0, 0.51}, {12 * kEpochsPerMonth, 0.40}, {24 * kEpochsPerMonth, 0.20},
          {36 * kEpochsPerMonth, 0.0}};
}

std::vector<std::string> validate(const GovernanceConfig& c) {
  std::vector<std::string> out;
  if (c.voice_credits_per_round <= 0) out.push_back("voice_credits_per_round must be positive");
  if (!(c.plural_quorum >= 0 && c.plural_quorum <= 1)) out.push_back("plural_quorum must be within [0, 1]");
  if (!(c.epistemic_min_reputation >= 0)) out.push_back("epistemic_min_reputation must be non-negative");
  if (c.timelock_epochs != 0 && (c.timelock_epochs < 2 || c.timelock_epochs > 7)) {
    out.push_back("timelock_epochs must be 0 (disabled) or within 2-7 epochs, got " +
                  std::to_string(c.timelock_epochs));
  }
  if (c.veto_m < 1 || c.veto_m > c.veto_n) out.push_back("veto council needs 1 <= m <= n");
  if (!(c.minority_veto_threshold >= 0.10 && c.minority_veto_threshold <= 0.30)) {
    out.push_back("minority_veto_threshold must be within [0.10, 0.30]");
  }
  const auto& fs = c.founder_schedule;
  if (fs.empty() || fs.front().from != 0) {
    out.push_back("founder_schedule must start at epoch 0");
  } else {
    for (std::size_t i = 1; i < fs.size(); ++i) {
      if (fs[i].from <= fs[i - 1].from) out.push_back("founder_schedule epochs must strictly increase");
      if (fs[i].weight > fs[i - 1].weight) out.push_back("founder_schedule weights must be non-increasing");
    }
    for (const auto& step : fs) {
      if (!(step.weight >= 0 && step.weight <= 1)) out.push_back("founder_schedule weights must be within [0, 1]");
    }
    if (fs.back().weight != 0) out.push_back("founder_schedule must end at weight 0");
  }
  if (!c.weights.valid()) {
    out.push_back("reputation weights must be non-negative with Replication the heaviest");
  }
  return out;
}

std::string_view to_string(QvCostMode m) {
  return m == QvCostMode::CumulativeSquare ? "CumulativeSquare" : "MarginalSquare";
}

std::string_view to_string(Mode m) { return m == Mode::Bicameral ? "bicameral" : "token_weighted"; }

void to_json(json& j, const GovernanceConfig& c) {
  json schedule = json::array();
  for (const auto& s : c.founder_schedule) schedule.push_back({s.from, s.weight});
  j = {{"mode", to_string(c.mode)},
       {"voice_credits_per_round", c.voice_credits_per_round},
       {"qv_cost_mode", to_string(c.qv_cost_mode)},
       {"plural_quorum", c.plural_quorum},
       {"epistemic_min_reputation", c.epistemic_min_reputation},
       {"timelock_epochs", c.timelock_epochs},
       {"veto_council", {c.veto_m, c.veto_n}},
       {"minority_veto_threshold", c.minority_veto_threshold},
       {"snapshot_voting", c.snapshot_voting},
       {"founder_schedule", schedule},
       {"reputation_weights", c.weights}};
}

namespace {

void overlay(GovernanceConfig& c, const std::string& key, const json& v) {
  auto number = [&] {
    if (!v.is_number()) throw Error(Errc::BadConfig, key + " must be a number");
    return v.get<double>();
  };
  auto integer = [&] {
    if (!v.is_number_integer()) throw Error(Errc::BadConfig, key + " must be an integer");
    return v.get<std::int64_t>();
  };
  if (key == "mode") {
    if (v == "bicameral") c.mode = Mode::Bicameral;
    else if (v == "token_weighted") c.mode = Mode::TokenWeighted;
    else throw Error(Errc::BadConfig, "mode must be bicameral or token_weighted");
  } else if (key == "voice_credits_per_round") {
    c.voice_credits_per_round = integer();
  } else if (key == "qv_cost_mode") {
    if (v == "CumulativeSquare") c.qv_cost_mode = QvCostMode::CumulativeSquare;
    else if (v == "MarginalSquare") c.qv_cost_mode = QvCostMode::MarginalSquare;
    else throw Error(Errc::BadConfig, "qv_cost_mode must be CumulativeSquare or MarginalSquare");
  } else if (key == "plural_quorum") {
    c.plural_quorum = number();
  } else if (key == "epistemic_min_reputation") {
    c.epistemic_min_reputation = number();
  } else if (key == "timelock_epochs") {
    c.timelock_epochs = integer();
  } else if (key == "veto_council") {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
      throw Error(Errc::BadConfig, "veto_council must be [m, n]");
    }
    c.veto_m = v[0].get<int>();
    c.veto_n = v[1].get<int>();
  } else if (key == "minority_veto_threshold") {
    c.minority_veto_threshold = number();
  } else if (key == "snapshot_voting") {
    if (!v.is_boolean()) throw Error(Errc::BadConfig, "snapshot_voting must be a boolean");
    c.snapshot_voting = v.get<bool>();
  } else if (key == "founder_schedule") {
    if (!v.is_array()) throw Error(Errc::BadConfig, "founder_schedule must be a list of [epoch, weight]");
    c.founder_schedule.clear();
    for (const auto& step : v) {
      if (!step.is_array() || step.size() != 2 || !step[0].is_number_integer() || !step[1].is_number()) {
        throw Error(Errc::BadConfig, "founder_schedule entries must be [epoch, weight]");
      }
      c.founder_schedule.push_back({step[0].get<Epoch>(), step[1].get<double>()});
    }
  } else if (key == "reputation_weights") {
    if (!v.is_object()) throw Error(Errc::BadConfig, "reputation_weights must be an object");
    try {
      c.weights = v.get<reputation::ReputationWeights>();
    } catch (const Error& e) {
      throw Error(Errc::BadConfig, e.what());
    } catch (const json::exception& e) {
      throw Error(Errc::BadConfig, std::string("reputation_weights: ") + e.what());
    }
  } else {
    throw Error(Errc::BadConfig, "unknown governance key " + key);
  }
}

}  // namespace

GovernanceConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::BadConfig, "governance config must be an object");
  GovernanceConfig c;
  for (const auto& [key, value] : j.items()) overlay(c, key, value);
  return c;
}

GovernanceConfig with_parameter(GovernanceConfig c, const std::string& key, const json& value) {
  overlay(c, key, value);
  auto problems = validate(c);
  if (!problems.empty()) throw Error(Errc::BadConfig, problems.front());
  return c;
}

std::int64_t qv_cost(std::int64_t votes, QvCostMode mode) {
  if (votes < 0) throw Error(Errc::BadPayload, "negative vote count");
  if (mode == QvCostMode::CumulativeSquare) return votes * votes;
  return votes * (votes + 1) * (2 * votes + 1) / 6;
}

std::int64_t max_affordable_votes(std::int64_t credits, QvCostMode mode) {
  std::int64_t v = 0;
  while (qv_cost(v + 1, mode) <= credits) ++v;
  return v;
}

double founder_veto_weight(const GovernanceConfig& c, Epoch at) {
  double w = c.founder_schedule.empty() ? 0.0 : c.founder_schedule.front().weight;
  for (const auto& step : c.founder_schedule) {
    if (step.from <= at) w = step.weight;
  }
  return w;
}

std::string_view to_string(ProposalKind k) {
  switch (k) {
    case ProposalKind::TreasurySpend: return "TreasurySpend";
    case ProposalKind::ParameterChange: return "ParameterChange";
    case ProposalKind::SbtRevocation: return "SbtRevocation";
    case ProposalKind::SbtReinstate: return "SbtReinstate";
    case ProposalKind::Constitutional: return "Constitutional";
  }
  return "?";
}

ProposalKind kind_or_throw(std::string_view name) {
  for (auto k : {ProposalKind::TreasurySpend, ProposalKind::ParameterChange, ProposalKind::SbtRevocation,
                 ProposalKind::SbtReinstate, ProposalKind::Constitutional}) {
    if (to_string(k) == name) return k;
  }
  throw Error(Errc::BadPayload, "unknown proposal kind " + std::string(name));
}

std::string_view to_string(ProposalState s) {
  switch (s) {
    case ProposalState::Draft: return "Draft";
    case ProposalState::Voting: return "Voting";
    case ProposalState::Queued: return "Queued";
    case ProposalState::Executed: return "Executed";
    case ProposalState::Rejected: return "Rejected";
    case ProposalState::Vetoed: return "Vetoed";
  }
  return "?";
}

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::None: return "None";
    case RejectReason::QuorumFail: return "QuorumFail";
    case RejectReason::PluralOpposed: return "PluralOpposed";
    case RejectReason::EpistemicOpposed: return "EpistemicOpposed";
    case RejectReason::MinorityVeto: return "MinorityVeto";
    case RejectReason::TokenOpposed: return "TokenOpposed";
  }
  return "?";
}

json to_json(const TallyResult& t) {
  return {{"approved", t.approved},
          {"reason", to_string(t.reason)},
          {"plural_net", t.plural_net},
          {"voters", t.voters},
          {"turnout", t.turnout},
          {"participation", t.participation},
          {"epistemic_yes", t.epistemic_yes},
          {"epistemic_no", t.epistemic_no},
          {"total_reputation", t.total_reputation},
          {"token_yes", t.token_yes},
          {"token_no", t.token_no},
          {"token_total", t.token_total}};
}

std::size_t Proposal::voter_count() const {
  std::set<SoulId> voters;
  for (const auto& [s, b] : plural) voters.insert(s);
  for (const auto& [s, b] : epistemic) voters.insert(s);
  for (const auto& [s, b] : token_votes) voters.insert(s);
  return voters.size();
}

json to_json(const Proposal& p) {
  json tokens = json::object();
  for (const auto& [s, a] : p.token_snapshot) tokens[std::to_string(s.value)] = a;
  json reps = json::object();
  for (const auto& [s, r] : p.rep_snapshot) reps[std::to_string(s.value)] = r;
  json plural = json::object();
  for (const auto& [s, b] : p.plural) plural[std::to_string(s.value)] = {b.votes, b.credits};
  json epistemic = json::object();
  for (const auto& [s, yes] : p.epistemic) epistemic[std::to_string(s.value)] = yes;
  json token_votes = json::object();
  for (const auto& [s, b] : p.token_votes) token_votes[std::to_string(s.value)] = {b.support, b.weight};
  return {{"id", p.id},
          {"arc", p.arc},
          {"proposer", p.proposer},
          {"kind", to_string(p.kind)},
          {"payload", p.payload},
          {"constitutional_class", p.constitutional_class},
          {"state", to_string(p.state)},
          {"snapshot_epoch", p.snapshot_epoch},
          {"queued_until", p.queued_until},
          {"executed_epoch", p.executed_epoch ? json(*p.executed_epoch) : json(nullptr)},
          {"token_snapshot", tokens},
          {"rep_snapshot", reps},
          {"plural", plural},
          {"epistemic", epistemic},
          {"token_votes", token_votes},
          {"tally", p.tally ? to_json(*p.tally) : json(nullptr)}};
}

Digest proposal_digest(const Proposal& p) { return sha256(canonical(to_json(p))); }

const Arc& GovernanceState::arc(ArcId id) const {
  auto it = arcs.find(id);
  if (it == arcs.end()) throw Error(Errc::UnknownArc, std::to_string(id.value));
  return it->second;
}

Arc& GovernanceState::arc(ArcId id) { return const_cast<Arc&>(static_cast<const GovernanceState&>(*this).arc(id)); }

const Proposal& GovernanceState::proposal(ProposalId id) const {
  auto it = proposals.find(id);
  if (it == proposals.end()) throw Error(Errc::UnknownProposal, std::to_string(id.value));
  return it->second;
}

Proposal& GovernanceState::proposal(ProposalId id) {
  return const_cast<Proposal&>(static_cast<const GovernanceState&>(*this).proposal(id));
}

json GovernanceState::to_json() const {
  json a = json::object();
  for (const auto& [id, arc] : arcs) {
    a[std::to_string(id.value)] = {{"treasury", arc.treasury},
                                   {"members", arc.members},
                                   {"founder_council", arc.founder_council},
                                   {"config", arc.config},
                                   {"forked_from", arc.forked_from ? json(arc.forked_from->value) : json(nullptr)},
                                   {"inherited_history", arc.inherited_history}};
  }
  json p = json::object();
  for (const auto& [id, prop] : proposals) p[std::to_string(id.value)] = governance::to_json(prop);
  json d = json::object();
  for (const auto& [from, to] : delegations) d[std::to_string(from.value)] = to;
  json credits = json::array();
  for (const auto& [key, spent] : credits_spent) {
    const auto& [arc, voter, round] = key;
    credits.push_back({arc, voter, round, spent});
  }
  return {{"arcs", a},
          {"proposals", p},
          {"delegations", d},
          {"credits_spent", credits},
          {"arcs_created", arcs_created},
          {"proposals_created", proposals_created}};
}

bool creates_cycle(const Delegations& d, SoulId from, SoulId to) {
  // Adding from->to closes a cycle iff `from` is reachable from `to`.
  SoulId cur = to;
  for (std::size_t steps = 0; steps <= d.size(); ++steps) {
    if (cur == from) return true;
    auto it = d.find(cur);
    if (it == d.end()) return false;
    cur = it->second;
  }
  return true;
}

bool acyclic(const Delegations& d) {
  // Out-degree <= 1, so DFS reduces to following chains with colouring.
  std::map<SoulId, int> colour;  // 1 = on current path, 2 = done
  for (const auto& [start, unused] : d) {
    std::vector<SoulId> path;
    SoulId cur = start;
    while (true) {
      auto c = colour[cur];
      if (c == 1) return false;
      if (c == 2) break;
      colour[cur] = 1;
      path.push_back(cur);
      auto it = d.find(cur);
      if (it == d.end()) break;
      cur = it->second;
    }
    for (auto s : path) colour[s] = 2;
  }
  return true;
}

double delegated_weight(SoulId voter, const std::map<SoulId, double>& reps, const Delegations& d) {
  double total = 0;
  for (const auto& [soul, rep] : reps) {
    SoulId cur = soul;
    while (true) {
      if (cur == voter) {
        total += rep;
        break;
      }
      auto it = d.find(cur);
      if (it == d.end()) break;
      cur = it->second;
    }
  }
  return total;
}

std::map<SoulId, double> resolve_epistemic_weights(const std::map<SoulId, bool>& votes,
                                                   const std::map<SoulId, double>& reps,
                                                   const Delegations& d) {
  std::map<SoulId, double> weight;
  for (const auto& [voter, unused] : votes) weight[voter] = 0;
  for (const auto& [soul, rep] : reps) {
    SoulId cur = soul;
    while (!votes.contains(cur)) {
      auto it = d.find(cur);
      if (it == d.end()) break;
      cur = it->second;
    }
    if (votes.contains(cur)) weight[cur] += rep;
  }
  return weight;
}

TallyResult compute_tally(const Arc& arc, const Proposal& p, const Delegations& d,
                          const std::map<SoulId, Amount>& token_power) {
  const auto& cfg = arc.config;
  TallyResult t;
  t.voters = p.voter_count();
  t.turnout = arc.members.empty() ? 0.0 : static_cast<double>(t.voters) / static_cast<double>(arc.members.size());
  for (const auto& [s, rep] : p.rep_snapshot) t.total_reputation += rep;
  for (const auto& [s, power] : token_power) t.token_total += power;

  if (cfg.mode == Mode::TokenWeighted) {
    for (const auto& [s, b] : p.token_votes) (b.support ? t.token_yes : t.token_no) += b.weight;
    t.participation = t.token_total == 0 ? 0.0
                                         : static_cast<double>(t.token_yes + t.token_no) /
                                               static_cast<double>(t.token_total);
    if (t.participation < cfg.plural_quorum) {
      t.reason = RejectReason::QuorumFail;
    } else if (t.token_yes <= t.token_no) {
      t.reason = RejectReason::TokenOpposed;
    } else {
      t.approved = true;
    }
    return t;
  }

  for (const auto& [s, b] : p.plural) t.plural_net += b.votes;
  t.participation = arc.members.empty()
                        ? 0.0
                        : static_cast<double>(p.plural.size()) / static_cast<double>(arc.members.size());
  for (const auto& [voter, w] : resolve_epistemic_weights(p.epistemic, p.rep_snapshot, d)) {
    (p.epistemic.at(voter) ? t.epistemic_yes : t.epistemic_no) += w;
  }
  if (t.participation < cfg.plural_quorum) {
    t.reason = RejectReason::QuorumFail;
  } else if (t.plural_net <= 0) {
    t.reason = RejectReason::PluralOpposed;
  } else if (t.epistemic_yes <= t.epistemic_no) {
    t.reason = RejectReason::EpistemicOpposed;
  } else if (p.constitutional_class && t.epistemic_no > 0 &&
             t.epistemic_no >= cfg.minority_veto_threshold * t.total_reputation) {
    t.reason = RejectReason::MinorityVeto;
  } else {
    t.approved = true;
  }
  return t;
}

double epistemic_approval_share(const TallyResult& t) {
  const double cast = t.epistemic_yes + t.epistemic_no;
  return cast > 0 ? t.epistemic_yes / cast : 0.0;
}

}  // namespace commons::governance
