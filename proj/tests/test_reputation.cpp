#include <random>

#include "fixtures.hpp"

using namespace commons;
using namespace fixtures;
using reputation::Category;

namespace {

ProposalId pass_proposal(World& w, governance::ProposalKind kind, json payload) {
  // souls[0] carries enough reputation to clear the epistemic chamber alone.
  const auto p = w.c.submit_proposal(w.arc, w.souls[0], kind, std::move(payload));
  w.c.cast_plural_vote(p, w.souls[0], 1);
  w.c.cast_epistemic_vote(p, w.souls[0], true);
  REQUIRE(w.c.tally(p).approved);
  w.c.advance_epoch(w.c.governance().arc(w.arc).config.timelock_epochs);
  w.c.execute(p);
  return p;
}

}  // namespace

TEST_CASE("score follows weighted category counts") {
  auto w = make_world(3);
  const auto s = w.souls[1];
  CHECK(w.c.reputation(s) == 0);
  for (int i = 0; i < 7; ++i) w.c.issue_sbt(w.arc, s, Category::PeerReview);
  reputation::ReputationWeights reviews_only;
  reviews_only.values = {0, 1, 0, 0, 0, 0};
  CHECK(w.c.reputation(s, reviews_only) == 7);

  const auto t = w.souls[2];
  w.c.issue_sbt(w.arc, t, Category::Publication);
  w.c.issue_sbt(w.arc, t, "Publication");
  w.c.issue_sbt(w.arc, t, Category::Replication);
  CHECK(w.c.reputation(t) == 2 * 2 + 3);
  CHECK(code_of([&] { w.c.issue_sbt(w.arc, t, "Poetry"); }) == Errc::UnknownCategory);
}

TEST_CASE("SBTs never move, even to their own subject") {
  auto w = make_world(4);
  const auto sbt = w.c.issue_sbt(w.arc, w.souls[1], Category::Mentoring);
  const auto before = w.c.state_hash();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    CHECK(code_of([&] { w.c.attempt_transfer_sbt(sbt, w.souls[rng() % 4]); }) == Errc::NonTransferable);
  }
  CHECK(w.c.state_hash() == before);
}

TEST_CASE("revocation needs an executed proposal and appeal restores the score") {
  auto w = make_world(5);
  give_reviews(w, w.souls[0], 10);
  const auto t = w.souls[2];
  w.c.issue_sbt(w.arc, t, Category::Publication);
  w.c.issue_sbt(w.arc, t, Category::Publication);
  const auto repl = w.c.issue_sbt(w.arc, t, Category::Replication);
  CHECK(w.c.reputation(t) == 7);

  CHECK(code_of([&] { w.c.revoke_sbt(repl, ProposalId{99}); }) == Errc::NotAuthorized);
  const auto pending = w.c.submit_proposal(w.arc, w.souls[0], governance::ProposalKind::SbtRevocation, {{"sbt", repl}});
  CHECK(code_of([&] { w.c.revoke_sbt(repl, pending); }) == Errc::NotAuthorized);
  CHECK(code_of([&] { w.c.appeal_sbt(repl); }) == Errc::NotRevoked);
  w.c.tally(pending);

  const auto root_before = w.c.commit_metadata(t);
  pass_proposal(w, governance::ProposalKind::SbtRevocation, {{"sbt", repl}});
  CHECK(w.c.sbts().at(repl).status == reputation::SbtStatus::Revoked);
  CHECK(w.c.reputation(t) == 4);
  CHECK(w.c.commit_metadata(t) != root_before);

  const auto appeal = w.c.appeal_sbt(repl);
  CHECK(w.c.governance().proposal(appeal).proposer == t);
  CHECK(w.c.governance().proposal(appeal).constitutional_class);
  CHECK(code_of([&] { w.c.appeal_sbt(repl); }) == Errc::AppealExhausted);
  w.c.cast_plural_vote(appeal, w.souls[0], 1);
  w.c.cast_epistemic_vote(appeal, w.souls[0], true);
  REQUIRE(w.c.tally(appeal).approved);
  w.c.advance_epoch(3);
  w.c.execute(appeal);
  CHECK(w.c.sbts().at(repl).status == reputation::SbtStatus::Reinstated);
  CHECK(w.c.reputation(t) == 7);
  CHECK(w.c.commit_metadata(t) == root_before);
  CHECK(Commons::replay(w.c.log().records()).state_hash() == w.c.state_hash());
}

TEST_CASE("commitment roots for the empty and single-leaf cases") {
  auto w = make_world(2);
  const auto s = w.souls[1];
  const auto empty = Sha256{}.update_byte(0x02).update("commons.merkle.empty").finish();
  CHECK(w.c.commit_metadata(s) == empty);
  const auto sbt = w.c.issue_sbt(w.arc, s, Category::DataSharing, {{"dataset", "x"}});
  const auto* cred = w.c.credential(sbt);
  REQUIRE(cred);
  // Independent reconstruction of the blinded digest and leaf.
  const auto blinded = Sha256{}
                           .update(std::span<const std::uint8_t>(cred->salt))
                           .update("DataSharing")
                           .update_byte(0)
                           .update(R"({"dataset":"x"})")
                           .finish();
  CHECK(w.c.sbts().at(sbt).blinded == blinded);
  const auto leaf = Sha256{}.update_byte(0).update("DataSharing").update_byte(0).update(blinded).finish();
  CHECK(w.c.commit_metadata(s) == leaf);
}

TEST_CASE("count proofs") {
  auto w = make_world(3);
  const auto s = w.souls[1];
  for (int i = 0; i < 23; ++i) w.c.issue_sbt(w.arc, s, Category::PeerReview);
  for (int i = 0; i < 5; ++i) w.c.issue_sbt(w.arc, s, Category::Publication);
  const auto root = w.c.commit_metadata(s);

  const auto p23 = w.c.prove_count_at_least(s, Category::PeerReview, 23);
  CHECK(p23.branches.size() == 23);
  CHECK(Commons::verify_proof(root, p23));
  const auto p0 = w.c.prove_count_at_least(s, Category::PeerReview, 0);
  CHECK(p0.branches.empty());
  CHECK(Commons::verify_proof(root, p0));
  CHECK(code_of([&] { w.c.prove_count_at_least(s, Category::Publication, 7); }) == Errc::InsufficientCredentials);

  SUBCASE("another soul's root rejects") {
    w.c.issue_sbt(w.arc, w.souls[2], Category::PeerReview);
    CHECK_FALSE(Commons::verify_proof(w.c.commit_metadata(w.souls[2]), p23));
  }
  SUBCASE("duplicated branch cannot inflate the count") {
    auto fake = w.c.prove_count_at_least(s, Category::Publication, 5);
    fake.branches.push_back(fake.branches.front());
    fake.k = 6;
    CHECK_FALSE(Commons::verify_proof(root, fake));
  }
  SUBCASE("category relabel rejects") {
    auto fake = w.c.prove_count_at_least(s, Category::Publication, 5);
    fake.category = Category::Replication;
    CHECK_FALSE(Commons::verify_proof(root, fake));
  }
  SUBCASE("k larger than the branch count rejects") {
    auto fake = p23;
    fake.k = 24;
    CHECK_FALSE(Commons::verify_proof(root, fake));
  }
  SUBCASE("json round trip and strict decoding") {
    const auto text = reputation::to_json(p23).dump();
    CHECK(reputation::verify_proof_json(root, text));
    auto j = reputation::to_json(p23);
    j["extra"] = 1;
    CHECK_FALSE(reputation::verify_proof_json(root, j.dump()));
    CHECK_FALSE(reputation::verify_proof_json(root, "{"));
  }
}

TEST_CASE("revoked SBTs drop out of proofs") {
  auto w = make_world(3);
  give_reviews(w, w.souls[0], 10);
  const auto s = w.souls[1];
  const auto a = w.c.issue_sbt(w.arc, s, Category::Replication);
  w.c.issue_sbt(w.arc, s, Category::Replication);
  pass_proposal(w, governance::ProposalKind::SbtRevocation, {{"sbt", a}});
  CHECK(code_of([&] { w.c.prove_count_at_least(s, Category::Replication, 2); }) == Errc::InsufficientCredentials);
  CHECK(Commons::verify_proof(w.c.commit_metadata(s), w.c.prove_count_at_least(s, Category::Replication, 1)));
}

TEST_CASE("stakes lock until maturity") {
  auto w = make_world(3);
  const auto s = w.souls[1];
  const auto sbt = w.c.issue_sbt(w.arc, s, Category::PeerReview);
  CHECK(code_of([&] { w.c.stake_sbt(w.souls[2], sbt, 10); }) == Errc::NotOwner);
  CHECK(code_of([&] { w.c.stake_sbt(s, sbt, 0); }) == Errc::BadPayload);
  const auto st = w.c.stake_sbt(s, sbt, 10);
  CHECK(code_of([&] { w.c.stake_sbt(s, sbt, 12); }) == Errc::AlreadyStaked);
  w.c.advance_epoch(5);
  CHECK(code_of([&] { w.c.unstake(st); }) == Errc::NotMature);
  w.c.advance_epoch(5);
  w.c.unstake(st);
  CHECK(code_of([&] { w.c.unstake(st); }) == Errc::UnknownStake);
  w.c.stake_sbt(s, sbt, 20);
}
