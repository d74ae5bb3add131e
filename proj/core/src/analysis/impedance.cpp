#include "emg/analysis/impedance.hpp"

#include <algorithm>
#include <cmath>

#include "emg/error.hpp"

namespace emg::analysis {

ImpedanceSummary summarize_impedances(std::span<const double> ohms, double threshold_ohm) {
  ImpedanceSummary s;
  s.ohms = summarize(ohms);
  s.threshold_ohm = threshold_ohm;
  s.rejected = static_cast<std::size_t>(std::count_if(ohms.begin(), ohms.end(), [&](double z) { return z > threshold_ohm; }));
  return s;
}

ImpedanceDrift impedance_drift(std::span<const double> before, std::span<const double> after) {
  if (before.size() != after.size()) throw ParameterError("before and after impedances differ in length");
  std::vector<double> pct;
  std::vector<std::pair<double, double>> pairs;
  pct.reserve(before.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (!(before[i] > 0.0)) throw ParameterError("impedance must be positive");
    pct.push_back(100.0 * (after[i] - before[i]) / before[i]);
    pairs.emplace_back(before[i], after[i]);
  }
  ImpedanceDrift d;
  const Summary s = summarize(pct);
  d.mean_percent_change = s.mean;
  d.sd_percent_change = s.sd;
  d.test = wilcoxon_signed_rank(pairs, Tail::Greater);
  return d;
}

}  // namespace emg::analysis
