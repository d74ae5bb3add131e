#pragma once

// Reference implementations used only to check the library. Each one is
// written from the textbook definition, independent of the code under test.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "emg/dsp/butterworth.hpp"
#include "emg/gesture.hpp"

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// Analog Butterworth high-pass magnitude at f for cutoff fc.
inline double analog_highpass_gain(int order, double f, double fc) {
  const double w = f / fc;
  return std::pow(w, order) / std::sqrt(1.0 + std::pow(w, 2 * order));
}

/// Steady-state gain of a section cascade, measured by running a sinusoid
/// through a direct-form I loop and comparing output and input RMS over
/// whole periods after the transient has died out.
inline double measured_gain(const std::vector<emg::dsp::Biquad>& sections, double f, double fs) {
  const int settle = static_cast<int>(fs);  // 1 s
  const double period = fs / f;
  const int cycles = std::max(20, static_cast<int>(std::ceil(fs / period)));
  const int measure = static_cast<int>(std::llround(period * cycles));
  std::vector<std::array<double, 4>> hist(sections.size(), {0, 0, 0, 0});  // x1 x2 y1 y2
  double in2 = 0.0, out2 = 0.0;
  for (int n = 0; n < settle + measure; ++n) {
    const double x0 = std::sin(2.0 * kPi * f * n / fs);
    double x = x0;
    for (std::size_t s = 0; s < sections.size(); ++s) {
      const auto& q = sections[s];
      auto& h = hist[s];
      const double y = q.b0 * x + q.b1 * h[0] + q.b2 * h[1] - q.a1 * h[2] - q.a2 * h[3];
      h[1] = h[0];
      h[0] = x;
      h[3] = h[2];
      h[2] = y;
      x = y;
    }
    if (n >= settle) {
      in2 += x0 * x0;
      out2 += x * x;
    }
  }
  return std::sqrt(out2 / in2);
}

/// Direct-form I cascade over one channel, zero initial state.
inline std::vector<double> filter_df1(const std::vector<emg::dsp::Biquad>& sections, const std::vector<double>& x) {
  std::vector<double> y = x;
  for (const auto& q : sections) {
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    for (auto& v : y) {
      const double in = v;
      const double out = q.b0 * in + q.b1 * x1 + q.b2 * x2 - q.a1 * y1 - q.a2 * y2;
      x2 = x1;
      x1 = in;
      y2 = y1;
      y1 = out;
      v = out;
    }
  }
  return y;
}

/// The label holding a strict majority of a full buffer, else Rest.
inline emg::Gesture majority(std::span<const emg::Gesture> buffer, std::size_t m) {
  std::map<emg::Gesture, std::size_t> count;
  for (auto g : buffer) ++count[g];
  for (const auto& [g, c] : count) {
    if (2 * c > m) return g;
  }
  return emg::Gesture::Rest;
}

/// Straight-line simulation of exponential confidence, thresholding and
/// voting: tick t votes on the confidence carried in, then folds in p(t).
struct DecoderSim {
  Eigen::VectorXd p_prime = Eigen::VectorXd::Constant(10, 0.1);
  std::vector<emg::Gesture> buffer;
  double alpha = 0.5, r = 0.5;
  std::size_t m = 3;

  emg::Gesture tick(const Eigen::VectorXd& p) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < p_prime.size(); ++i) {
      if (p_prime[i] > p_prime[best]) best = i;
    }
    buffer.push_back(p_prime[best] > r ? static_cast<emg::Gesture>(best) : emg::Gesture::Rest);
    if (buffer.size() > m) buffer.erase(buffer.begin());
    const auto out = majority(buffer, m);
    p_prime = (1.0 - alpha) * p_prime + alpha * p;
    return out;
  }
};

/// Average ranks (1-based), ties share the mean rank.
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) ++less;
      if (w == v[i]) ++equal;
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

struct WilcoxonExact {
  double w_plus = 0.0;
  double p_greater = 1.0;  // P(W+ >= observed)
  double p_less = 1.0;     // P(W+ <= observed)
  double p_two = 1.0;
  std::size_t n = 0;
};

/// Enumerates all 2^n sign assignments of the ranks of |d| (zeros dropped).
inline WilcoxonExact wilcoxon_enumerate(const std::vector<double>& diffs) {
  std::vector<double> d;
  for (double x : diffs) {
    if (x != 0.0) d.push_back(x);
  }
  std::vector<double> mag(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) mag[i] = std::abs(d[i]);
  const auto r = ranks(mag);
  WilcoxonExact out;
  out.n = d.size();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > 0) out.w_plus += r[i];
  }
  const std::uint64_t total = 1ull << d.size();
  std::uint64_t ge = 0, le = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (mask & (1ull << i)) w += r[i];
    }
    if (w >= out.w_plus - 1e-9) ++ge;
    if (w <= out.w_plus + 1e-9) ++le;
  }
  out.p_greater = static_cast<double>(ge) / static_cast<double>(total);
  out.p_less = static_cast<double>(le) / static_cast<double>(total);
  out.p_two = std::min(1.0, 2.0 * std::min(out.p_greater, out.p_less));
  return out;
}

/// Tie-corrected Kruskal-Wallis H from the definition.
inline double kruskal_h(const std::vector<std::vector<double>>& groups) {
  std::vector<double> all;
  for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
  const double n = static_cast<double>(all.size());
  const auto r = ranks(all);
  double h = 0.0;
  std::size_t k = 0;
  for (const auto& g : groups) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) sum += r[k + i];
    k += g.size();
    h += sum * sum / static_cast<double>(g.size());
  }
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
  std::map<double, double> ties;
  for (double x : all) ties[x] += 1.0;
  double t = 0.0;
  for (const auto& [v, c] : ties) t += c * c * c - c;
  const double correction = 1.0 - t / (n * n * n - n);
  return correction > 0.0 ? h / correction : 0.0;
}

struct KruskalExact {
  double h = 0.0;
  double p = 1.0;  // fraction of distinct group assignments with H >= observed
};

/// Permutes group labels over the pooled observations (every distinct
/// labeling exactly once via next_permutation on a sorted label multiset).
inline KruskalExact kruskal_enumerate(const std::vector<std::vector<double>>& groups) {
  std::vector<double> all;
  std::vector<int> labels;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (double x : groups[g]) {
      all.push_back(x);
      labels.push_back(static_cast<int>(g));
    }
  }
  KruskalExact out;
  out.h = kruskal_h(groups);
  std::sort(labels.begin(), labels.end());
  std::uint64_t total = 0, extreme = 0;
  do {
    std::vector<std::vector<double>> perm(groups.size());
    for (std::size_t i = 0; i < all.size(); ++i) perm[static_cast<std::size_t>(labels[i])].push_back(all[i]);
    ++total;
    if (kruskal_h(perm) >= out.h - 1e-9) ++extreme;
  } while (std::next_permutation(labels.begin(), labels.end()));
  out.p = static_cast<double>(extreme) / static_cast<double>(total);
  return out;
}

/// Chi-squared survival function for even degrees of freedom (closed form).
inline double chi2_sf_even_df(double x, int df) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < df / 2; ++k) {
    term *= (x / 2.0) / k;
    sum += term;
  }
  return std::exp(-x / 2.0) * sum;
}

}  // namespace oracle
