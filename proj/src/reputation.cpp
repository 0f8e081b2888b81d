#include "commons/reputation.hpp"

#include <set>

namespace commons::reputation {

namespace {

constexpr std::array<std::string_view, 6> kCategoryNames{
    "Publication", "PeerReview", "Replication", "DataSharing", "Mentoring", "Credential"};

std::size_t idx(Category c) { return static_cast<std::size_t>(c); }

}  // namespace

std::string_view to_string(Category c) { return kCategoryNames[idx(c)]; }

std::optional<Category> parse_category(std::string_view name) {
  for (auto c : kCategories) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

Category category_or_throw(std::string_view name) {
  auto c = parse_category(name);
  if (!c) throw Error(Errc::UnknownCategory, std::string(name));
  return *c;
}

bool ReputationWeights::valid() const {
  const double repl = of(Category::Replication);
  for (double w : values) {
    if (!(w >= 0) || w > repl) return false;
  }
  return true;
}

void to_json(json& j, const ReputationWeights& w) {
  j = json::object();
  for (auto c : kCategories) j[std::string(to_string(c))] = w.of(c);
}

void from_json(const json& j, ReputationWeights& w) {
  w = ReputationWeights::defaults();
  for (const auto& [key, value] : j.items()) w.of(category_or_throw(key)) = value.get<double>();
}

std::string_view to_string(SbtStatus s) {
  switch (s) {
    case SbtStatus::Active: return "Active";
    case SbtStatus::Revoked: return "Revoked";
    case SbtStatus::Reinstated: return "Reinstated";
  }
  return "?";
}

Digest blind_metadata(const Salt& salt, Category c, const Metadata& details) {
  json fields = json::object();
  for (const auto& [k, v] : details) fields[k] = v;
  return Sha256{}
      .update(std::span<const std::uint8_t>(salt))
      .update(to_string(c))
      .update_byte(0x00)
      .update(canonical(fields))
      .finish();
}

Digest tree_leaf(Category c, const Digest& blinded) {
  return Sha256{}.update_byte(0x00).update(to_string(c)).update_byte(0x00).update(blinded).finish();
}

const Sbt& SbtRegistry::at(SbtId id) const {
  auto it = sbts.find(id);
  if (it == sbts.end()) throw Error(Errc::UnknownSbt, std::to_string(id.value));
  return it->second;
}

Sbt& SbtRegistry::at(SbtId id) {
  return const_cast<Sbt&>(static_cast<const SbtRegistry&>(*this).at(id));
}

std::vector<const Sbt*> SbtRegistry::active_of(SoulId soul) const {
  std::vector<const Sbt*> out;
  for (const auto& [id, s] : sbts) {
    if (s.subject == soul && s.counts()) out.push_back(&s);
  }
  return out;
}

Digest SbtRegistry::compute_root(SoulId soul) const {
  std::vector<Digest> leaves;
  for (const auto* s : active_of(soul)) leaves.push_back(tree_leaf(s->category, s->blinded));
  return merkle::Tree(std::move(leaves)).root();
}

void SbtRegistry::refresh(SoulId soul) { roots[soul] = compute_root(soul); }

void SbtRegistry::set_status(SbtId id, SbtStatus status) {
  auto& s = at(id);
  const bool before = s.counts();
  s.status = status;
  const bool after = s.counts();
  auto& counts = active_counts[s.subject];
  counts[idx(s.category)] += static_cast<std::int64_t>(after) - static_cast<std::int64_t>(before);
  refresh(s.subject);
}

double SbtRegistry::score(SoulId soul, const ReputationWeights& w) const {
  auto it = active_counts.find(soul);
  if (it == active_counts.end()) return 0.0;
  double total = 0.0;
  for (auto c : kCategories) total += static_cast<double>(it->second[idx(c)]) * w.of(c);
  return total;
}

double SbtRegistry::recount(SoulId soul, const ReputationWeights& w) const {
  std::array<std::int64_t, 6> counts{};
  for (const auto& [id, s] : sbts) {
    if (s.subject == soul && s.counts()) ++counts[idx(s.category)];
  }
  double total = 0.0;
  for (auto c : kCategories) total += static_cast<double>(counts[idx(c)]) * w.of(c);
  return total;
}

std::int64_t SbtRegistry::count(SoulId soul, Category c) const {
  auto it = active_counts.find(soul);
  return it == active_counts.end() ? 0 : it->second[idx(c)];
}

json SbtRegistry::to_json() const {
  json tokens = json::object();
  for (const auto& [id, s] : sbts) {
    tokens[std::to_string(id.value)] = {
        {"subject", s.subject},
        {"issuer", s.issuer},
        {"category", to_string(s.category)},
        {"issued_epoch", s.issued_epoch},
        {"status", to_string(s.status)},
        {"commitment", to_hex(s.blinded)},
        {"appealed", s.appealed},
        {"stake", s.stake ? json(s.stake->value) : json(nullptr)}};
  }
  json st = json::object();
  for (const auto& [id, s] : stakes) {
    st[std::to_string(id.value)] = {{"soul", s.soul}, {"sbt", s.sbt}, {"until_epoch", s.until_epoch}};
  }
  json rt = json::object();
  for (const auto& [soul, root] : roots) rt[std::to_string(soul.value)] = to_hex(root);
  json counts = json::object();
  for (const auto& [soul, c] : active_counts) counts[std::to_string(soul.value)] = c;
  return {{"sbts", tokens},
          {"stakes", st},
          {"roots", rt},
          {"active_counts", counts},
          {"sbts_created", sbts_created},
          {"stakes_created", stakes_created}};
}

json to_json(const DisclosureProof& p) {
  json branches = json::array();
  for (const auto& b : p.branches) {
    json path = json::array();
    for (const auto& step : b.path) {
      path.push_back({{"side", step.side == merkle::Side::Left ? "L" : "R"},
                      {"digest", to_hex(step.sibling)}});
    }
    branches.push_back({{"leaf_digest", to_hex(b.leaf_digest)}, {"path", path}});
  }
  return {{"root", to_hex(p.root)},
          {"category", to_string(p.category)},
          {"k", p.k},
          {"branches", branches}};
}

DisclosureProof proof_from_json(const json& j) {
  auto bad = [](const char* why) { return Error(Errc::BadPayload, std::string("proof: ") + why); };
  auto digest = [&](const json& v) {
    if (!v.is_string()) throw bad("digest is not a string");
    auto d = digest_from_hex(v.get<std::string>());
    if (!d) throw bad("malformed digest");
    return *d;
  };
  if (!j.is_object() || j.size() != 4) throw bad("expected {root, category, k, branches}");
  DisclosureProof p;
  try {
    p.root = digest(j.at("root"));
    const auto& cat = j.at("category");
    if (!cat.is_string()) throw bad("category is not a string");
    auto c = parse_category(cat.get<std::string>());
    if (!c) throw bad("unknown category");
    p.category = *c;
    const auto& k = j.at("k");
    if (!k.is_number_unsigned()) throw bad("k is not a non-negative integer");
    p.k = k.get<std::size_t>();
    const auto& branches = j.at("branches");
    if (!branches.is_array()) throw bad("branches is not an array");
    for (const auto& b : branches) {
      if (!b.is_object() || b.size() != 2) throw bad("branch shape");
      Branch branch;
      branch.leaf_digest = digest(b.at("leaf_digest"));
      const auto& path = b.at("path");
      if (!path.is_array()) throw bad("path is not an array");
      for (const auto& step : path) {
        if (!step.is_object() || step.size() != 2) throw bad("path step shape");
        const auto& side = step.at("side");
        if (side != "L" && side != "R") throw bad("side must be L or R");
        branch.path.push_back(
            {side == "L" ? merkle::Side::Left : merkle::Side::Right, digest(step.at("digest"))});
      }
      p.branches.push_back(std::move(branch));
    }
  } catch (const json::exception& e) {
    throw bad(e.what());
  }
  return p;
}

DisclosureProof make_proof(const SbtRegistry& reg, SoulId soul, Category category, std::size_t k) {
  const auto active = reg.active_of(soul);
  std::vector<Digest> leaves;
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < active.size(); ++i) {
    leaves.push_back(tree_leaf(active[i]->category, active[i]->blinded));
    if (active[i]->category == category) positions.push_back(i);
  }
  if (positions.size() < k) {
    throw Error(Errc::InsufficientCredentials,
                "have " + std::to_string(positions.size()) + ", need " + std::to_string(k));
  }
  merkle::Tree tree(std::move(leaves));
  DisclosureProof proof;
  proof.root = tree.root();
  proof.category = category;
  proof.k = k;
  for (std::size_t i = 0; i < k; ++i) {
    const auto pos = positions[i];
    proof.branches.push_back({active[pos]->blinded, tree.path(pos)});
  }
  return proof;
}

bool verify_proof(const Digest& root, const DisclosureProof& proof) noexcept {
  if (proof.root != root || proof.branches.size() < proof.k) return false;
  std::set<Digest> seen;
  for (const auto& b : proof.branches) {
    if (!seen.insert(b.leaf_digest).second) return false;
    auto top = merkle::climb(tree_leaf(proof.category, b.leaf_digest), b.path);
    if (!top || *top != root) return false;
  }
  return true;
}

bool verify_proof_json(const Digest& root, std::string_view text) noexcept {
  try {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) return false;
    return verify_proof(root, proof_from_json(j));
  } catch (...) {
    return false;
  }
}

}  // namespace commons::reputation
