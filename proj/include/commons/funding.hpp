#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "commons/digest.hpp"
#include "commons/reputation.hpp"
#include "commons/types.hpp"

namespace commons::funding {

enum class MatchingMode { ProportionalSquares, ClrSurplus };

std::string_view to_string(MatchingMode m);
MatchingMode mode_or_throw(std::string_view name);

struct Contribution {
  SoulId contributor;
  SoulId project;
  Amount amount{0};
};

// Per-contributor totals per project; projects ascending by id, contributors
// ascending by id inside each row.
struct ContributionMatrix {
  std::vector<SoulId> projects;
  std::vector<std::vector<Amount>> rows;
  std::vector<Amount> contributed;
};

ContributionMatrix aggregate(std::span<const SoulId> projects, std::span<const Contribution> contributions);

struct ProjectMatch {
  SoulId project;
  double score{0};
  Amount contributed{0};
  Amount match{0};
};

struct MatchResult {
  Amount pool{0};
  MatchingMode mode{MatchingMode::ProportionalSquares};
  std::vector<ProjectMatch> projects;
};

json to_json(const MatchResult& r);

// Largest-remainder apportionment of `total` by real weights; remainder
// units go to the largest fractional parts, ties to the lowest index.
std::vector<Amount> largest_remainder(Amount total, std::span<const double> weights);
// Integer-exact variant for integral weights (basis points, counts).
std::vector<Amount> apportion_exact(Amount total, std::span<const std::int64_t> weights);

MatchResult compute_matching(const ContributionMatrix& m, Amount pool, MatchingMode mode);

struct Round {
  RoundId id;
  ArcId arc;
  AccountId escrow;
  Amount pool{0};
  std::vector<SoulId> projects;
  std::vector<Contribution> contributions;
  MatchingMode mode{MatchingMode::ProportionalSquares};
  std::optional<reputation::Category> require_stake;
  bool settled{false};
};

enum class MilestoneStatus { Pending, Reported, Released, Cancelled };
std::string_view to_string(MilestoneStatus s);

struct Milestone {
  Digest description{};
  Amount tranche{0};
  MilestoneStatus status{MilestoneStatus::Pending};
  std::optional<SoulId> recipient;
};

struct MissionProgram {
  ProgramId id;
  ArcId arc;
  SoulId director;
  AccountId account;
  Amount budget{0};
  Amount released{0};
  bool cancelled{false};
  std::vector<Milestone> milestones;
};

struct FundingState {
  std::map<RoundId, Round> rounds;
  std::map<ProgramId, MissionProgram> programs;
  std::uint64_t rounds_created{0};
  std::uint64_t programs_created{0};

  const Round& round(RoundId id) const;
  Round& round(RoundId id);
  const MissionProgram& program(ProgramId id) const;
  MissionProgram& program(ProgramId id);

  json to_json() const;
};

// Parses `contributor,project,amount` CSV (header required, soul ids as
// integers, integer amounts). Throws Error(ParseError) with the line number.
std::vector<Contribution> parse_contributions_csv(std::string_view text);

}  // namespace commons::funding
