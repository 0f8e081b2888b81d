#include "commons/funding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "commons/kernels.hpp"

namespace commons::funding {

std::string_view to_string(MatchingMode m) {
  return m == MatchingMode::ProportionalSquares ? "ProportionalSquares" : "ClrSurplus";
}

MatchingMode mode_or_throw(std::string_view name) {
  if (name == "ProportionalSquares") return MatchingMode::ProportionalSquares;
  if (name == "ClrSurplus") return MatchingMode::ClrSurplus;
  throw Error(Errc::BadPayload, "unknown matching mode " + std::string(name));
}

std::string_view to_string(MilestoneStatus s) {
  switch (s) {
    case MilestoneStatus::Pending: return "Pending";
    case MilestoneStatus::Reported: return "Reported";
    case MilestoneStatus::Released: return "Released";
    case MilestoneStatus::Cancelled: return "Cancelled";
  }
  return "?";
}

ContributionMatrix aggregate(std::span<const SoulId> projects, std::span<const Contribution> contributions) {
  ContributionMatrix m;
  m.projects.assign(projects.begin(), projects.end());
  std::sort(m.projects.begin(), m.projects.end());
  m.rows.resize(m.projects.size());
  m.contributed.assign(m.projects.size(), 0);
  std::vector<std::map<SoulId, Amount>> per(m.projects.size());
  for (const auto& c : contributions) {
    auto it = std::lower_bound(m.projects.begin(), m.projects.end(), c.project);
    if (it == m.projects.end() || *it != c.project) throw Error(Errc::UnknownProject, std::to_string(c.project.value));
    const auto p = static_cast<std::size_t>(it - m.projects.begin());
    per[p][c.contributor] += c.amount;
    m.contributed[p] += c.amount;
  }
  for (std::size_t p = 0; p < per.size(); ++p) {
    for (const auto& [who, amount] : per[p]) m.rows[p].push_back(amount);
  }
  return m;
}

json to_json(const MatchResult& r) {
  json projects = json::array();
  for (const auto& p : r.projects) {
    projects.push_back(
        {{"project", p.project}, {"score", p.score}, {"contributed", p.contributed}, {"match", p.match}});
  }
  return {{"pool", r.pool}, {"mode", to_string(r.mode)}, {"projects", projects}};
}

namespace {

template <class Fraction>
void hand_out(std::vector<Amount>& shares, Amount leftover, const std::vector<Fraction>& frac) {
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t i = 0; leftover > 0; i = (i + 1) % order.size(), --leftover) ++shares[order[i]];
}

}  // namespace

std::vector<Amount> largest_remainder(Amount total, std::span<const double> weights) {
  std::vector<Amount> shares(weights.size(), 0);
  if (weights.empty()) return shares;
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(sum > 0)) throw Error(Errc::AllZero, "apportionment weights sum to zero");
  std::vector<double> frac(weights.size());
  Amount assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * (weights[i] / sum);
    const double fl = std::floor(exact);
    shares[i] = static_cast<Amount>(fl);
    frac[i] = exact - fl;
    assigned += shares[i];
  }
  // Rounding in the division can overshoot by a unit; take it back from the
  // smallest fractional parts.
  while (assigned > total) {
    std::size_t pick = shares.size();
    for (std::size_t i = 0; i < shares.size(); ++i) {
      if (shares[i] > 0 && (pick == shares.size() || frac[i] < frac[pick])) pick = i;
    }
    --shares[pick];
    frac[pick] += 1.0;
    --assigned;
  }
  hand_out(shares, total - assigned, frac);
  return shares;
}

std::vector<Amount> apportion_exact(Amount total, std::span<const std::int64_t> weights) {
  std::vector<Amount> shares(weights.size(), 0);
  if (weights.empty()) return shares;
  Int128 den = 0;
  for (auto w : weights) den += w;
  if (den <= 0) throw Error(Errc::AllZero, "apportionment weights sum to zero");
  std::vector<Int128> rem(weights.size());
  Amount assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const Int128 num = static_cast<Int128>(total) * weights[i];
    shares[i] = static_cast<Amount>(num / den);
    rem[i] = num % den;
    assigned += shares[i];
  }
  hand_out(shares, total - assigned, rem);
  return shares;
}

MatchResult compute_matching(const ContributionMatrix& m, Amount pool, MatchingMode mode) {
  if (m.projects.empty()) throw Error(Errc::EmptyProjects);
  const bool any = std::any_of(m.contributed.begin(), m.contributed.end(), [](Amount a) { return a > 0; });
  if (!any) throw Error(Errc::NoContributions);

  const auto scores = kernels::qf_scores_parallel(m.rows);
  std::vector<double> weights(scores.size());
  if (mode == MatchingMode::ProportionalSquares) {
    weights = scores;
  } else {
    for (std::size_t p = 0; p < scores.size(); ++p) {
      weights[p] = std::max(0.0, scores[p] - static_cast<double>(m.contributed[p]));
    }
    if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0; })) {
      std::fill(weights.begin(), weights.end(), 1.0);
    }
  }
  const auto matches = largest_remainder(pool, weights);

  MatchResult r;
  r.pool = pool;
  r.mode = mode;
  for (std::size_t p = 0; p < m.projects.size(); ++p) {
    r.projects.push_back({m.projects[p], scores[p], m.contributed[p], matches[p]});
  }
  return r;
}

const Round& FundingState::round(RoundId id) const {
  auto it = rounds.find(id);
  if (it == rounds.end()) throw Error(Errc::UnknownRound, std::to_string(id.value));
  return it->second;
}

Round& FundingState::round(RoundId id) {
  return const_cast<Round&>(static_cast<const FundingState&>(*this).round(id));
}

const MissionProgram& FundingState::program(ProgramId id) const {
  auto it = programs.find(id);
  if (it == programs.end()) throw Error(Errc::UnknownProgram, std::to_string(id.value));
  return it->second;
}

MissionProgram& FundingState::program(ProgramId id) {
  return const_cast<MissionProgram&>(static_cast<const FundingState&>(*this).program(id));
}

json FundingState::to_json() const {
  json r = json::object();
  for (const auto& [id, round] : rounds) {
    json contributions = json::array();
    for (const auto& c : round.contributions) contributions.push_back({c.contributor, c.project, c.amount});
    r[std::to_string(id.value)] = {
        {"arc", round.arc},
        {"escrow", round.escrow},
        {"pool", round.pool},
        {"projects", round.projects},
        {"contributions", contributions},
        {"mode", to_string(round.mode)},
        {"require_stake", round.require_stake ? json(reputation::to_string(*round.require_stake)) : json(nullptr)},
        {"settled", round.settled}};
  }
  json p = json::object();
  for (const auto& [id, prog] : programs) {
    json milestones = json::array();
    for (const auto& m : prog.milestones) {
      milestones.push_back({{"description", to_hex(m.description)},
                            {"tranche", m.tranche},
                            {"status", to_string(m.status)},
                            {"recipient", m.recipient ? json(m.recipient->value) : json(nullptr)}});
    }
    p[std::to_string(id.value)] = {{"arc", prog.arc},
                                   {"director", prog.director},
                                   {"account", prog.account},
                                   {"budget", prog.budget},
                                   {"released", prog.released},
                                   {"cancelled", prog.cancelled},
                                   {"milestones", milestones}};
  }
  return {{"rounds", r},
          {"programs", p},
          {"rounds_created", rounds_created},
          {"programs_created", programs_created}};
}

std::vector<Contribution> parse_contributions_csv(std::string_view text) {
  std::vector<Contribution> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": " + why);
  };
  auto parse_int = [&](std::string_view field, const char* name) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
      fail(std::string("bad integer in ") + name);
    }
    return v;
  };
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != "contributor,project,amount") fail("expected header contributor,project,amount");
      continue;
    }
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      fail("expected three fields");
    }
    const auto who = parse_int(line.substr(0, c1), "contributor");
    const auto project = parse_int(line.substr(c1 + 1, c2 - c1 - 1), "project");
    const auto amount = parse_int(line.substr(c2 + 1), "amount");
    if (who <= 0 || project <= 0) fail("soul ids are positive");
    if (amount <= 0) fail("amount must be positive");
    out.push_back({SoulId{static_cast<std::uint64_t>(who)}, SoulId{static_cast<std::uint64_t>(project)}, amount});
  }
  if (line_no == 0) fail("empty input");
  return out;
}

}  // namespace commons::funding
