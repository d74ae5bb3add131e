#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace emg::analysis {

/// Alternative hypothesis. Greater: after - before tends to be positive.
enum class Tail { Greater, Less, TwoSided };

struct TestResult {
  double statistic = 0.0;  // W+ for Wilcoxon, H for Kruskal-Wallis
  double p_value = 1.0;
  std::size_t n = 0;       // nonzero differences / total observations
  std::vector<std::size_t> group_sizes;
  int df = 0;
  Tail tail = Tail::TwoSided;
  bool exact = false;
  std::optional<double> z;        // normal approximation only
  std::optional<double> exact_p;  // Kruskal-Wallis permutation p, small samples
};

inline constexpr std::size_t kWilcoxonExactMaxN = 25;

/// Ranks 1..n, ties receive the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Signed-rank test on differences after - before. Zero differences are
/// dropped; W is the sum of ranks of positive differences. Exact null
/// distribution for n <= 25, tie-corrected normal approximation above.
/// Throws ParameterError when fewer than 5 nonzero differences remain.
TestResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs, Tail tail = Tail::TwoSided);

/// Tie-corrected H with a chi-squared (k - 1 df) p-value. For up to
/// `exact_max_n` observations the permutation p-value over all distinct
/// group assignments is reported as well.
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups, std::size_t exact_max_n = 12);

/// H statistic alone, for the given ranks split into consecutive groups.
double kruskal_h(std::span<const double> ranks, std::span<const std::size_t> group_sizes);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(std::span<const double> values);
double median(std::vector<double> values);

}  // namespace emg::analysis
