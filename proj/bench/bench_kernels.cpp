#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>

#include "commons/commons.hpp"
#include "commons/kernels.hpp"

using namespace commons;

namespace {

template <typename F>
double best_ms(F&& fn, int reps = 5) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void line(const char* name, double serial, double parallel, bool same) {
  std::printf("%-14s serial %9.3f ms  omp %9.3f ms  speedup %5.2fx  identical=%s\n", name, serial, parallel,
              serial / parallel, same ? "yes" : "NO");
}

}  // namespace

int main() {
  std::mt19937_64 rng(42);
  std::printf("threads=%d\n", omp_get_max_threads());

  std::vector<std::vector<Amount>> rows(2000, std::vector<Amount>(500));
  for (auto& row : rows) {
    for (auto& v : row) v = static_cast<Amount>(rng() % 1000);
  }
  std::vector<double> a, b;
  const double qs = best_ms([&] { a = kernels::qf_scores_serial(rows); });
  const double qp = best_ms([&] { b = kernels::qf_scores_parallel(rows); });
  line("qf_scores", qs, qp, a == b);

  std::vector<double> power(6000);
  for (auto& p : power) p = static_cast<double>(rng() % 100000);
  double gs = 0, gp = 0;
  const double ts = best_ms([&] { gs = kernels::gini_serial(power); });
  const double tp = best_ms([&] { gp = kernels::gini_parallel(power); });
  line("gini", ts, tp, gs == gp);

  Commons c;
  const auto founder = c.create_soul();
  const auto arc = c.create_arc({founder}, {}, {});
  std::vector<reputation::DisclosureProof> proofs;
  std::vector<Digest> roots;
  for (int i = 0; i < 400; ++i) {
    const auto s = c.create_soul();
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int k = 0; k < n; ++k) c.issue_sbt(arc, s, reputation::Category::PeerReview);
    proofs.push_back(c.prove_count_at_least(s, reputation::Category::PeerReview, static_cast<std::size_t>(n)));
    roots.push_back(c.commit_metadata(s));
  }
  std::vector<kernels::ProofCheck> checks;
  for (std::size_t i = 0; i < proofs.size(); ++i) checks.push_back({roots[i], &proofs[i]});
  std::vector<char> vs, vp;
  const double bs = best_ms([&] { vs = kernels::verify_batch_serial(checks); });
  const double bp = best_ms([&] { vp = kernels::verify_batch_parallel(checks); });
  line("verify_batch", bs, bp, vs == vp);
  return 0;
}
