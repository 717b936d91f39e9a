#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace tsph {

using Rng = std::mt19937_64;

/// Seed of stream `stream` under `master`. Counter based, so a sample's
/// random numbers depend only on its index, never on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

struct Estimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

double pairwise_sum(const double* data, std::size_t n);
double pairwise_sum(const std::vector<double>& xs);

/// Sample mean and its standard error.
Estimate mean_estimate(const std::vector<double>& xs);

/// Sample covariance with a delta-method standard error.
Estimate covariance_estimate(const std::vector<double>& xs, const std::vector<double>& ys);

/// Runs body(i) for i in [0, n) on `threads` workers. Bodies must write
/// only to slot i of their output so results are independent of `threads`.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

/// Pearson goodness of fit of integer-valued samples (counts[k] = number of
/// samples equal to k) against probabilities pmf(k). Cells with expected
/// count below `min_expected` are pooled into the tail.
struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 0.0;
};
ChiSquareResult chi_square_gof(const std::vector<std::size_t>& counts,
                               const std::function<double(std::size_t)>& pmf,
                               double min_expected = 5.0);
/// Pearson test over explicit cells; probabilities must sum to one.
ChiSquareResult chi_square_cells(const std::vector<std::size_t>& counts,
                                 const std::vector<double>& probabilities);
ChiSquareResult chi_square_uniform(const std::vector<std::size_t>& counts);

/// Homogeneity test of two histograms over the same cells.
ChiSquareResult chi_square_two_sample(const std::vector<std::size_t>& a,
                                      const std::vector<std::size_t>& b,
                                      double min_expected = 5.0);

}  // namespace tsph
