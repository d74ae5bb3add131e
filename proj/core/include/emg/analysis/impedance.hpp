#pragma once

#include <span>
#include <vector>

#include "emg/analysis/stats.hpp"
#include "emg/dsp/channel_mask.hpp"

namespace emg::analysis {

struct ImpedanceSummary {
  Summary ohms;
  std::size_t rejected = 0;  // above the threshold
  double threshold_ohm = dsp::kDefaultImpedanceThresholdOhm;
};

ImpedanceSummary summarize_impedances(std::span<const double> ohms,
                                      double threshold_ohm = dsp::kDefaultImpedanceThresholdOhm);

struct ImpedanceDrift {
  double mean_percent_change = 0.0;  // mean of 100 (after - before) / before
  double sd_percent_change = 0.0;
  TestResult test;                   // one-tailed signed-rank, after > before
};

/// Paired before/after impedances of the same electrodes.
ImpedanceDrift impedance_drift(std::span<const double> before, std::span<const double> after);

}  // namespace emg::analysis
