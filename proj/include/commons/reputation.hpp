#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "commons/digest.hpp"
#include "commons/merkle.hpp"
#include "commons/types.hpp"

namespace commons::reputation {

enum class Category { Publication, PeerReview, Replication, DataSharing, Mentoring, Credential };

inline constexpr std::array<Category, 6> kCategories{
    Category::Publication, Category::PeerReview, Category::Replication,
    Category::DataSharing, Category::Mentoring,  Category::Credential};

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view name);
Category category_or_throw(std::string_view name);

struct ReputationWeights {
  std::array<double, 6> values{2, 1, 3, 1, 1, 1};

  static ReputationWeights defaults() { return {}; }
  double of(Category c) const { return values[static_cast<std::size_t>(c)]; }
  double& of(Category c) { return values[static_cast<std::size_t>(c)]; }
  // Non-negative, and Replication at least as heavy as every other category.
  bool valid() const;

  friend bool operator==(const ReputationWeights&, const ReputationWeights&) = default;
};

void to_json(json& j, const ReputationWeights& w);
void from_json(const json& j, ReputationWeights& w);

enum class SbtStatus { Active, Revoked, Reinstated };
std::string_view to_string(SbtStatus s);

using Metadata = std::map<std::string, std::string>;
using Salt = std::array<std::uint8_t, 16>;

// Salted digest of an SBT's detail fields: H(salt || category || details).
// This is what a disclosure branch publishes as `leaf_digest`.
Digest blind_metadata(const Salt& salt, Category c, const Metadata& details);
// Tree leaf: binds the category in the clear to the blinded digest.
Digest tree_leaf(Category c, const Digest& blinded);

struct Sbt {
  SbtId id;
  SoulId subject;
  ArcId issuer;
  Category category{Category::Publication};
  Epoch issued_epoch{0};
  SbtStatus status{SbtStatus::Active};
  Digest blinded{};
  bool appealed{false};
  std::optional<StakeId> stake;

  bool counts() const { return status != SbtStatus::Revoked; }
};

struct Stake {
  StakeId id;
  SoulId soul;
  SbtId sbt;
  Epoch until_epoch{0};
};

struct SbtRegistry {
  std::map<SbtId, Sbt> sbts;
  std::map<StakeId, Stake> stakes;
  // Maintained on every status change; cross-checked against recount().
  std::map<SoulId, std::array<std::int64_t, 6>> active_counts;
  std::map<SoulId, Digest> roots;
  std::uint64_t sbts_created{0};
  std::uint64_t stakes_created{0};

  const Sbt& at(SbtId id) const;
  Sbt& at(SbtId id);

  // Active/Reinstated SBTs of a soul, ascending by id.
  std::vector<const Sbt*> active_of(SoulId soul) const;
  Digest compute_root(SoulId soul) const;
  void refresh(SoulId soul);
  void set_status(SbtId id, SbtStatus status);

  double score(SoulId soul, const ReputationWeights& w) const;
  double recount(SoulId soul, const ReputationWeights& w) const;
  std::int64_t count(SoulId soul, Category c) const;

  json to_json() const;
};

struct Branch {
  Digest leaf_digest{};
  std::vector<merkle::PathStep> path;
};

struct DisclosureProof {
  Digest root{};
  Category category{Category::PeerReview};
  std::size_t k{0};
  std::vector<Branch> branches;
};

json to_json(const DisclosureProof& p);
// Strict decoding; throws Error(BadPayload) on any deviation from the format.
DisclosureProof proof_from_json(const json& j);

// Proof over the first k counting SBTs of `category` (ascending id).
DisclosureProof make_proof(const SbtRegistry& reg, SoulId soul, Category category, std::size_t k);

bool verify_proof(const Digest& root, const DisclosureProof& proof) noexcept;
bool verify_proof_json(const Digest& root, std::string_view text) noexcept;

}  // namespace commons::reputation
