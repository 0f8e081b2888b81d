#include <cmath>
#include <random>

#include "commons/kernels.hpp"
#include "commons/sim/report.hpp"
#include "fixtures.hpp"

using namespace commons;
using namespace fixtures;

namespace {

double pairwise_gini(const std::vector<double>& x) {
  double diff = 0;
  double sum = 0;
  for (double a : x) {
    sum += a;
    for (double b : x) diff += std::fabs(a - b);
  }
  const double n = static_cast<double>(x.size());
  return diff / (2 * n * n * (sum / n));
}

}  // namespace

TEST_CASE("gini examples") {
  CHECK(sim::gini({1, 1, 1, 1}) == 0);
  CHECK(sim::gini({0, 0, 0, 1}) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(sim::gini({5}) == 0);
  CHECK(code_of([] { sim::gini({}); }) == Errc::Empty);
  CHECK(code_of([] { sim::gini({0, 0}); }) == Errc::AllZero);
}

TEST_CASE("gini kernels agree with the pairwise formula and each other") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(1 + rng() % 300);
    for (auto& v : x) v = static_cast<double>(rng() % 10000);
    x[0] += 1;
    const double s = kernels::gini_serial(x);
    CHECK(kernels::gini_parallel(x) == s);
    CHECK(s == doctest::Approx(pairwise_gini(x)).epsilon(1e-9));
  }
}

TEST_CASE("qf score kernels are bit-identical") {
  std::mt19937_64 rng(6);
  std::vector<std::vector<Amount>> rows(300);
  for (auto& row : rows) {
    row.resize(rng() % 200);
    for (auto& c : row) c = 1 + static_cast<Amount>(rng() % 100000);
  }
  const auto a = kernels::qf_scores_serial(rows);
  const auto b = kernels::qf_scores_parallel(rows);
  CHECK(a == b);
  for (std::size_t p = 0; p < rows.size(); ++p) {
    double s = 0;
    for (auto c : rows[p]) s += std::sqrt(static_cast<double>(c));
    CHECK(a[p] == doctest::Approx(s * s).epsilon(1e-12));
  }
}

TEST_CASE("batch proof verification matches single verification") {
  auto w = make_world(12);
  std::mt19937_64 rng(10);
  for (auto s : w.souls) {
    const auto n = rng() % 9;
    for (std::uint64_t i = 0; i < n; ++i) w.c.issue_sbt(w.arc, s, reputation::kCategories[rng() % 6]);
  }
  std::vector<reputation::DisclosureProof> proofs;
  std::vector<Digest> roots;
  for (auto s : w.souls) {
    for (auto cat : reputation::kCategories) {
      const auto have = static_cast<std::size_t>(w.c.sbts().count(s, cat));
      proofs.push_back(w.c.prove_count_at_least(s, cat, have));
      // Every third proof is checked against the wrong root.
      roots.push_back(proofs.size() % 3 == 0 ? w.c.commit_metadata(w.souls[(s.value) % w.souls.size()])
                                             : w.c.commit_metadata(s));
    }
  }
  std::vector<kernels::ProofCheck> checks;
  for (std::size_t i = 0; i < proofs.size(); ++i) checks.push_back({roots[i], &proofs[i]});
  const auto serial = kernels::verify_batch_serial(checks);
  const auto parallel = kernels::verify_batch_parallel(checks);
  CHECK(serial == parallel);
  for (std::size_t i = 0; i < checks.size(); ++i) {
    CHECK(static_cast<bool>(serial[i]) == reputation::verify_proof(roots[i], proofs[i]));
  }
}
