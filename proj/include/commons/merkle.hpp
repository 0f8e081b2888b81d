#pragma once

#include <span>
#include <vector>

#include "commons/digest.hpp"

namespace commons::merkle {

// Side on which the sibling sits relative to the running hash.
enum class Side { Left, Right };

struct PathStep {
  Side side{Side::Right};
  Digest sibling{};

  friend bool operator==(const PathStep&, const PathStep&) = default;
};

Digest hash_node(const Digest& left, const Digest& right);
Digest empty_root();

// Binary SHA-256 tree. Leaves are padded to a power of two by repeating the
// last leaf, so padding siblings always sit on the right.
class Tree {
 public:
  explicit Tree(std::vector<Digest> leaves);

  Digest root() const;
  std::size_t leaf_count() const noexcept { return leaf_count_; }
  std::vector<PathStep> path(std::size_t index) const;

 private:
  std::size_t leaf_count_;
  std::vector<std::vector<Digest>> levels_;
};

// Climbs from `leaf` along `path`. Returns nullopt for a non-canonical path
// (a sibling equal to the running hash must be on the right).
std::optional<Digest> climb(const Digest& leaf, std::span<const PathStep> path);

}  // namespace commons::merkle
