#pragma once

#include <span>
#include <vector>

#include "commons/reputation.hpp"
#include "commons/types.hpp"

// Data-parallel kernels. Each has a serial reference kept for tests and the
// benchmark; the OpenMP variant parallelises only across independent rows and
// folds partial results in index order, so both return bit-identical values.
namespace commons::kernels {

// (sum_i sqrt(c_i))^2 per project; rows are per-contributor totals.
std::vector<double> qf_scores_serial(const std::vector<std::vector<Amount>>& rows);
std::vector<double> qf_scores_parallel(const std::vector<std::vector<Amount>>& rows);

// G = sum_i sum_j |x_i - x_j| / (2 n^2 mean). Throws Error(Empty) or
// Error(AllZero).
double gini_serial(std::span<const double> values);
double gini_parallel(std::span<const double> values);

struct ProofCheck {
  Digest root;
  const reputation::DisclosureProof* proof;
};

std::vector<char> verify_batch_serial(std::span<const ProofCheck> checks);
std::vector<char> verify_batch_parallel(std::span<const ProofCheck> checks);

}  // namespace commons::kernels
