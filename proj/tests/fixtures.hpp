#pragma once

#include <vector>

#include "commons/commons.hpp"
#include "doctest.h"

namespace fixtures {

using namespace commons;

struct World {
  Commons c;
  std::vector<SoulId> souls;
  ArcId arc;
};

// n souls, all members, the first `council` on the founder council.
inline World make_world(int n, governance::GovernanceConfig cfg = {}, int council = 5) {
  World w;
  for (int i = 0; i < n; ++i) w.souls.push_back(w.c.create_soul());
  std::vector<SoulId> founders(w.souls.begin(), w.souls.begin() + std::min(n, council));
  w.arc = w.c.create_arc(w.souls, founders, cfg);
  return w;
}

// PeerReview weighs 1 under the defaults, so `n` reviews give reputation n.
inline void give_reviews(World& w, SoulId s, int n) {
  for (int i = 0; i < n; ++i) w.c.issue_sbt(w.arc, s, reputation::Category::PeerReview);
}

template <class F>
Errc code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::CorruptLog;
}

}  // namespace fixtures
