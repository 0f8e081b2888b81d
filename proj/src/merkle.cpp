#include "commons/merkle.hpp"

namespace commons::merkle {

Digest hash_node(const Digest& left, const Digest& right) {
  return Sha256{}.update_byte(0x01).update(left).update(right).finish();
}

Digest empty_root() { return Sha256{}.update_byte(0x02).update("commons.merkle.empty").finish(); }

Tree::Tree(std::vector<Digest> leaves) : leaf_count_(leaves.size()) {
  if (leaves.empty()) return;
  std::size_t width = 1;
  while (width < leaves.size()) width <<= 1;
  leaves.resize(width, leaves.back());
  levels_.push_back(std::move(leaves));
  while (levels_.back().size() > 1) {
    const auto& below = levels_.back();
    std::vector<Digest> above;
    above.reserve(below.size() / 2);
    for (std::size_t i = 0; i < below.size(); i += 2) above.push_back(hash_node(below[i], below[i + 1]));
    levels_.push_back(std::move(above));
  }
}

Digest Tree::root() const { return levels_.empty() ? empty_root() : levels_.back().front(); }

std::vector<PathStep> Tree::path(std::size_t index) const {
  std::vector<PathStep> out;
  for (std::size_t level = 0; level + 1 < levels_.size(); ++level) {
    const bool is_left = index % 2 == 0;
    const auto sibling = is_left ? index + 1 : index - 1;
    out.push_back({is_left ? Side::Right : Side::Left, levels_[level][sibling]});
    index /= 2;
  }
  return out;
}

std::optional<Digest> climb(const Digest& leaf, std::span<const PathStep> path) {
  Digest cur = leaf;
  for (const auto& step : path) {
    if (step.sibling == cur && step.side == Side::Left) return std::nullopt;
    cur = step.side == Side::Left ? hash_node(step.sibling, cur) : hash_node(cur, step.sibling);
  }
  return cur;
}

}  // namespace commons::merkle
