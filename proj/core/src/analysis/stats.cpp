#include "emg/analysis/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "emg/error.hpp"

namespace emg::analysis {

namespace {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Sum over tie groups of t^3 - t.
double tie_term(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const double t = static_cast<double>(j - i);
    acc += t * t * t - t;
    i = j;
  }
  return acc;
}

double two_sided(double greater, double less) { return std::min(1.0, 2.0 * std::min(greater, less)); }

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

TestResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs, Tail tail) {
  std::vector<double> diff;
  diff.reserve(pairs.size());
  for (const auto& [before, after] : pairs) {
    if (!std::isfinite(before) || !std::isfinite(after)) throw ParameterError("non-finite observation");
    const double d = after - before;
    if (d != 0.0) diff.push_back(d);
  }
  if (diff.empty()) throw ParameterError("all differences are zero");
  const std::size_t n = diff.size();
  if (n < 5) throw ParameterError("fewer than 5 nonzero differences");

  std::vector<double> mags(n);
  for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(diff[i]);
  const auto ranks = average_ranks(mags);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (diff[i] > 0.0) w_plus += ranks[i];
  }

  TestResult r;
  r.statistic = w_plus;
  r.n = n;
  r.tail = tail;
  const double nd = static_cast<double>(n);

  double p_greater = 0.0;
  double p_less = 0.0;
  if (n <= kWilcoxonExactMaxN) {
    // Average ranks are multiples of 1/2, so doubled ranks are integers.
    std::vector<int> doubled(n);
    int total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      doubled[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
      total += doubled[i];
    }
    std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
    count[0] = 1.0;
    int reach = 0;
    for (int d : doubled) {
      for (int s = reach; s >= 0; --s) count[static_cast<std::size_t>(s + d)] += count[static_cast<std::size_t>(s)];
      reach += d;
    }
    const int observed = static_cast<int>(std::lround(2.0 * w_plus));
    const double all = std::ldexp(1.0, static_cast<int>(n));
    double ge = 0.0;
    double le = 0.0;
    for (int s = 0; s <= total; ++s) {
      if (s >= observed) ge += count[static_cast<std::size_t>(s)];
      if (s <= observed) le += count[static_cast<std::size_t>(s)];
    }
    p_greater = ge / all;
    p_less = le / all;
    r.exact = true;
  } else {
    const double mean = nd * (nd + 1.0) / 4.0;
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term(mags) / 48.0;
    if (!(var > 0.0)) throw ParameterError("degenerate signed-rank variance");
    const double z = (w_plus - mean) / std::sqrt(var);
    r.z = z;
    p_greater = normal_sf(z);
    p_less = normal_sf(-z);
  }
  switch (tail) {
    case Tail::Greater: r.p_value = p_greater; break;
    case Tail::Less: r.p_value = p_less; break;
    case Tail::TwoSided: r.p_value = two_sided(p_greater, p_less); break;
  }
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  return r;
}

double kruskal_h(std::span<const double> ranks, std::span<const std::size_t> group_sizes) {
  const double n = static_cast<double>(ranks.size());
  double acc = 0.0;
  std::size_t pos = 0;
  for (std::size_t size : group_sizes) {
    double sum = 0.0;
    for (std::size_t i = 0; i < size; ++i) sum += ranks[pos + i];
    pos += size;
    acc += sum * sum / static_cast<double>(size);
  }
  return 12.0 / (n * (n + 1.0)) * acc - 3.0 * (n + 1.0);
}

namespace {

// Visits every distinct assignment of `ranks` to groups of the given sizes
// and counts those whose (uncorrected) H reaches `threshold`.
struct PermutationCounter {
  std::span<const double> ranks;
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> filled;
  std::vector<double> sums;
  double threshold;
  double n;
  double hits = 0.0;
  double total = 0.0;

  void visit(std::size_t i) {
    if (i == ranks.size()) {
      double acc = 0.0;
      for (std::size_t g = 0; g < sizes.size(); ++g) acc += sums[g] * sums[g] / static_cast<double>(sizes[g]);
      const double h = 12.0 / (n * (n + 1.0)) * acc - 3.0 * (n + 1.0);
      total += 1.0;
      if (h >= threshold) hits += 1.0;
      return;
    }
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      if (filled[g] == sizes[g]) continue;
      ++filled[g];
      sums[g] += ranks[i];
      visit(i + 1);
      sums[g] -= ranks[i];
      --filled[g];
    }
  }
};

}  // namespace

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups, std::size_t exact_max_n) {
  if (groups.size() < 2) throw ParameterError("Kruskal-Wallis needs at least 2 groups");
  std::vector<double> pooled;
  std::vector<std::size_t> sizes;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw ParameterError("group " + std::to_string(g) + " is empty");
    for (double v : groups[g]) {
      if (!std::isfinite(v)) throw ParameterError("non-finite observation");
      pooled.push_back(v);
    }
    sizes.push_back(groups[g].size());
  }
  const double n = static_cast<double>(pooled.size());
  const auto ranks = average_ranks(pooled);
  const double correction = 1.0 - tie_term(pooled) / (n * n * n - n);

  TestResult r;
  r.n = pooled.size();
  r.group_sizes = sizes;
  r.df = static_cast<int>(groups.size()) - 1;
  if (!(correction > 0.0)) {
    // every observation equal: no evidence of any difference
    r.statistic = 0.0;
    r.p_value = 1.0;
    if (pooled.size() <= exact_max_n) r.exact_p = 1.0;
    return r;
  }
  const double h_raw = kruskal_h(ranks, sizes);
  r.statistic = std::max(0.0, h_raw / correction);
  r.p_value = r.statistic > 0.0 ? boost::math::gamma_q(r.df / 2.0, r.statistic / 2.0) : 1.0;

  if (pooled.size() <= exact_max_n) {
    // The correction factor is the same for every assignment, so ranking by
    // the uncorrected H is equivalent. The tolerance absorbs summation order.
    PermutationCounter pc{ranks, sizes, std::vector<std::size_t>(sizes.size(), 0),
                          std::vector<double>(sizes.size(), 0.0), h_raw - 1e-9 * std::max(1.0, std::abs(h_raw)), n};
    pc.visit(0);
    r.exact_p = pc.hits / pc.total;
  }
  return r;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ParameterError("x and y differ in length");
  if (x.size() < 2) throw ParameterError("need at least 2 points for a line");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ParameterError("x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

double median(std::vector<double> v) {
  if (v.empty()) throw ParameterError("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw ParameterError("summary of an empty set");
  Summary s;
  s.n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : 0.0;
  s.median = median({values.begin(), values.end()});
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

}  // namespace emg::analysis
