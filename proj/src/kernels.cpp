#include "commons/kernels.hpp"

#include <cmath>

namespace commons::kernels {

namespace {

double root_sum_squared(const std::vector<Amount>& row) {
  double s = 0;
  for (Amount c : row) s += std::sqrt(static_cast<double>(c));
  return s * s;
}

void check_gini_input(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::Empty, "gini of no values");
  for (double v : values) {
    if (v < 0) throw Error(Errc::BadPayload, "gini input must be non-negative");
  }
  for (double v : values) {
    if (v > 0) return;
  }
  throw Error(Errc::AllZero, "gini of all-zero values");
}

double row_abs_diff(std::span<const double> values, std::size_t i) {
  double row = 0;
  for (double y : values) row += std::abs(values[i] - y);
  return row;
}

double finish_gini(std::span<const double> values, const std::vector<double>& rows) {
  double total = 0;
  double sum = 0;
  for (double r : rows) total += r;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  // 2 n^2 mean = 2 n sum
  return total / (2.0 * n * sum);
}

}  // namespace

std::vector<double> qf_scores_serial(const std::vector<std::vector<Amount>>& rows) {
  std::vector<double> out(rows.size());
  for (std::size_t p = 0; p < rows.size(); ++p) out[p] = root_sum_squared(rows[p]);
  return out;
}

std::vector<double> qf_scores_parallel(const std::vector<std::vector<Amount>>& rows) {
  std::vector<double> out(rows.size());
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t p = 0; p < n; ++p) out[p] = root_sum_squared(rows[p]);
  return out;
}

double gini_serial(std::span<const double> values) {
  check_gini_input(values);
  std::vector<double> rows(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) rows[i] = row_abs_diff(values, i);
  return finish_gini(values, rows);
}

double gini_parallel(std::span<const double> values) {
  check_gini_input(values);
  std::vector<double> rows(values.size());
  const auto n = static_cast<std::ptrdiff_t>(values.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) rows[i] = row_abs_diff(values, static_cast<std::size_t>(i));
  return finish_gini(values, rows);
}

std::vector<char> verify_batch_serial(std::span<const ProofCheck> checks) {
  std::vector<char> out(checks.size());
  for (std::size_t i = 0; i < checks.size(); ++i) {
    out[i] = reputation::verify_proof(checks[i].root, *checks[i].proof) ? 1 : 0;
  }
  return out;
}

std::vector<char> verify_batch_parallel(std::span<const ProofCheck> checks) {
  std::vector<char> out(checks.size());
  const auto n = static_cast<std::ptrdiff_t>(checks.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = reputation::verify_proof(checks[i].root, *checks[i].proof) ? 1 : 0;
  }
  return out;
}

}  // namespace commons::kernels
