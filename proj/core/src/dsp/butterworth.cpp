#include "emg/dsp/butterworth.hpp"

#include <cmath>
#include <numbers>

#include "emg/error.hpp"

namespace emg::dsp {

std::complex<double> Biquad::response(double omega) const {
  const std::complex<double> z1 = std::polar(1.0, -omega);
  const std::complex<double> z2 = z1 * z1;
  return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
}

double FilterSpec::magnitude(double freq_hz) const {
  const double omega = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  std::complex<double> h{1.0, 0.0};
  for (const auto& s : sections) h *= s.response(omega);
  return std::abs(h);
}

double FilterSpec::magnitude_db(double freq_hz) const { return 20.0 * std::log10(magnitude(freq_hz)); }

std::vector<double> FilterSpec::pole_radii() const {
  std::vector<double> radii;
  for (const auto& s : sections) {
    if (s.a2 == 0.0) {
      radii.push_back(std::abs(s.a1));
      continue;
    }
    const double disc = s.a1 * s.a1 - 4.0 * s.a2;
    if (disc < 0.0) {
      radii.push_back(std::sqrt(s.a2));
      radii.push_back(std::sqrt(s.a2));
    } else {
      const double r = std::sqrt(disc);
      radii.push_back(std::abs((-s.a1 + r) / 2.0));
      radii.push_back(std::abs((-s.a1 - r) / 2.0));
    }
  }
  return radii;
}

namespace {

FilterSpec design(FilterKind kind, int order, double cutoff_hz, double sample_rate_hz) {
  if (order < 1) throw ParameterError("filter order must be >= 1");
  if (!(sample_rate_hz > 0.0)) throw ParameterError("sample rate must be positive");
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0)) {
    throw ParameterError("cutoff must lie strictly between 0 and the Nyquist frequency");
  }

  FilterSpec spec{kind, order, cutoff_hz, sample_rate_hz, {}};
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
  const double k2 = k * k;

  for (int i = 1; i <= order / 2; ++i) {
    const double theta = (2.0 * i - 1.0) * std::numbers::pi / (2.0 * order);
    const double q = 1.0 / (2.0 * std::sin(theta));
    const double norm = 1.0 / (1.0 + k / q + k2);
    Biquad s;
    if (kind == FilterKind::HighPass) {
      s.b0 = norm;
      s.b1 = -2.0 * norm;
      s.b2 = norm;
    } else {
      s.b0 = k2 * norm;
      s.b1 = 2.0 * k2 * norm;
      s.b2 = k2 * norm;
    }
    s.a1 = 2.0 * (k2 - 1.0) * norm;
    s.a2 = (1.0 - k / q + k2) * norm;
    spec.sections.push_back(s);
  }
  if (order % 2 == 1) {
    const double norm = 1.0 / (1.0 + k);
    Biquad s;
    if (kind == FilterKind::HighPass) {
      s.b0 = norm;
      s.b1 = -norm;
    } else {
      s.b0 = k * norm;
      s.b1 = k * norm;
    }
    s.a1 = (k - 1.0) * norm;
    spec.sections.push_back(s);
  }
  return spec;
}

}  // namespace

FilterSpec design_highpass(int order, double cutoff_hz, double sample_rate_hz) {
  return design(FilterKind::HighPass, order, cutoff_hz, sample_rate_hz);
}

FilterSpec design_lowpass(int order, double cutoff_hz, double sample_rate_hz) {
  return design(FilterKind::LowPass, order, cutoff_hz, sample_rate_hz);
}

double butterworth_highpass_gain(int order, double normalized_freq) {
  const double wn = std::pow(normalized_freq, order);
  return wn / std::sqrt(1.0 + wn * wn);
}

}  // namespace emg::dsp
