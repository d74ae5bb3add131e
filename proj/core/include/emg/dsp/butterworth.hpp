#pragma once

#include <complex>
#include <vector>

namespace emg::dsp {

/// Normalized biquad, a0 == 1. First-order sections have b2 == a2 == 0.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(double omega) const;
  friend bool operator==(const Biquad&, const Biquad&) = default;
};

enum class FilterKind { HighPass, LowPass };

/// Digital Butterworth filter as cascaded second-order sections.
struct FilterSpec {
  FilterKind kind = FilterKind::HighPass;
  int order = 4;
  double cutoff_hz = 120.0;
  double sample_rate_hz = 4000.0;
  std::vector<Biquad> sections;

  /// |H(e^{jw})| at a physical frequency.
  double magnitude(double freq_hz) const;
  double magnitude_db(double freq_hz) const;
  /// Pole radii of every section; all < 1 for a stable design.
  std::vector<double> pole_radii() const;

  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

/// Bilinear transform of the analog Butterworth prototype, cutoff prewarped,
/// realized as ceil(order/2) sections.
FilterSpec design_highpass(int order, double cutoff_hz, double sample_rate_hz);
FilterSpec design_lowpass(int order, double cutoff_hz, double sample_rate_hz);

/// Analog Butterworth high-pass magnitude w^n / sqrt(1 + w^{2n}), w = f / fc.
double butterworth_highpass_gain(int order, double normalized_freq);

}  // namespace emg::dsp
