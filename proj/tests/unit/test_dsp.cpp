#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "emg/dsp/butterworth.hpp"
#include "emg/dsp/channel_mask.hpp"
#include "emg/dsp/feature_pipeline.hpp"
#include "emg/dsp/features.hpp"
#include "emg/dsp/filter_bank.hpp"
#include "emg/error.hpp"
#include "oracles.hpp"

using namespace emg;
using namespace emg::dsp;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

}  // namespace

TEST(Butterworth, SectionCountAndStability) {
  for (int order : {1, 2, 3, 4, 5, 8}) {
    const auto spec = design_highpass(order, 120.0, 4000.0);
    EXPECT_EQ(spec.sections.size(), static_cast<std::size_t>((order + 1) / 2));
    for (double r : spec.pole_radii()) EXPECT_LT(r, 1.0);
  }
}

TEST(Butterworth, CutoffIsHalfPower) {
  for (int order : {2, 4, 6}) {
    const auto spec = design_highpass(order, 120.0, 4000.0);
    EXPECT_NEAR(spec.magnitude_db(120.0), -3.0103, 1e-3);
  }
}

TEST(Butterworth, DcBlockedNyquistPassed) {
  const auto spec = design_highpass(4, 120.0, 4000.0);
  EXPECT_LT(spec.magnitude(1e-3), 1e-12);
  EXPECT_NEAR(spec.magnitude(2000.0), 1.0, 1e-9);
}

TEST(Butterworth, MatchesAnalogPrototypeWellBelowNyquist) {
  const auto spec = design_highpass(4, 120.0, 4000.0);
  for (double f : {40.0, 80.0, 120.0, 200.0, 400.0}) {
    EXPECT_NEAR(spec.magnitude_db(f), 20 * std::log10(oracle::analog_highpass_gain(4, f, 120.0)), 0.1) << f;
  }
}

TEST(Butterworth, LibraryAnalogGainMatchesOracle) {
  for (double w : {0.1, 0.5, 1.0, 2.0, 7.0}) {
    EXPECT_NEAR(butterworth_highpass_gain(4, w), oracle::analog_highpass_gain(4, w, 1.0), 1e-14);
  }
}

TEST(Butterworth, FrequencyResponseMatchesMeasuredSinusoid) {
  const auto spec = design_highpass(4, 120.0, 4000.0);
  for (double f : {60.0, 120.0, 500.0}) {
    EXPECT_NEAR(spec.magnitude(f), oracle::measured_gain(spec.sections, f, 4000.0), 2e-3) << f;
  }
}

TEST(Butterworth, LowPassMirrors) {
  const auto lp = design_lowpass(4, 450.0, 4000.0);
  EXPECT_NEAR(lp.magnitude_db(450.0), -3.0103, 1e-3);
  EXPECT_NEAR(lp.magnitude(1e-3), 1.0, 1e-9);
  EXPECT_LT(lp.magnitude(1990.0), 1e-3);
}

TEST(Butterworth, RejectsBadParameters) {
  EXPECT_THROW(design_highpass(0, 120.0, 4000.0), ParameterError);
  EXPECT_THROW(design_highpass(4, 0.0, 4000.0), ParameterError);
  EXPECT_THROW(design_highpass(4, 2000.0, 4000.0), ParameterError);
  EXPECT_THROW(design_highpass(4, 120.0, -1.0), ParameterError);
}

TEST(FilterBank, MatchesDirectFormReference) {
  const auto spec = design_highpass(4, 120.0, 4000.0);
  const auto x = noise(5000, 3);
  auto y = x;
  FilterBank bank(spec, 1);
  bank.process_channel(0, y);
  const auto ref = oracle::filter_df1(spec.sections, x);
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(y[i], ref[i], 1e-12) << i;
}

TEST(FilterBank, ChunkingDoesNotChangeOutput) {
  const auto spec = design_highpass(4, 120.0, 4000.0);
  const auto x = noise(3001, 4);
  const auto whole = filter_signal(spec, x);
  FilterBank bank(spec, 1);
  std::vector<double> pieces;
  std::size_t at = 0;
  std::mt19937 rng(1);
  while (at < x.size()) {
    const std::size_t n = std::min<std::size_t>(1 + rng() % 97, x.size() - at);
    std::vector<double> chunk(x.begin() + static_cast<long>(at), x.begin() + static_cast<long>(at + n));
    bank.process_channel(0, chunk);
    pieces.insert(pieces.end(), chunk.begin(), chunk.end());
    at += n;
  }
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_EQ(pieces[i], whole[i]);
}

TEST(FilterBank, ChannelsAreIndependent) {
  const auto spec = design_highpass(4, 120.0, 4000.0);
  const auto a = noise(800, 5), b = noise(800, 6);
  FilterBank bank(spec, 2);
  std::vector<double> out(2);
  std::vector<double> ya, yb;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double frame[2] = {a[t], b[t]};
    bank.step(frame, out);
    ya.push_back(out[0]);
    yb.push_back(out[1]);
  }
  EXPECT_EQ(ya, filter_signal(spec, a));
  EXPECT_EQ(yb, filter_signal(spec, b));
}

TEST(FilterBank, NonFiniteInputLeavesStateUntouched) {
  const auto spec = design_highpass(4, 120.0, 4000.0);
  FilterBank bank(spec, 2);
  std::vector<double> out(2);
  const double good[2] = {1.0, -1.0};
  bank.step(good, out);
  const std::vector<double> before(bank.state().begin(), bank.state().end());
  const double bad[2] = {0.5, std::nan("")};
  EXPECT_THROW(bank.step(bad, out), DataError);
  EXPECT_EQ(std::vector<double>(bank.state().begin(), bank.state().end()), before);
}

TEST(FilterBank, ResetClearsState) {
  FilterBank bank(design_highpass(4, 120.0, 4000.0), 1);
  std::vector<double> x = {1.0, 2.0, 3.0};
  bank.process_channel(0, x);
  bank.reset();
  for (double s : bank.state()) EXPECT_EQ(s, 0.0);
}

TEST(ChannelMask, RejectsAboveThresholdInclusiveAtThreshold) {
  const std::vector<double> z = {100e3, 500e3, 500.001e3, 2e6};
  const auto m = reject_channels(z, 500e3);
  EXPECT_EQ(m.accepted, (std::vector<bool>{true, true, false, false}));
  EXPECT_EQ(m.accepted_count(), 2u);
  EXPECT_EQ(m.accepted_indices(), (std::vector<std::size_t>{0, 1}));
}

TEST(ChannelMask, AllRejectedIsAnError) {
  const std::vector<double> z = {1e6, 2e6};
  EXPECT_THROW(reject_channels(z, 500e3), DataError);
}

TEST(Features, WindowRms) {
  Eigen::MatrixXd w(4, 2);
  w << 1, 0, -1, 2, 1, 0, -1, 2;
  const auto r = window_rms(w);
  EXPECT_DOUBLE_EQ(r[0], 1.0);
  EXPECT_DOUBLE_EQ(r[1], std::sqrt(2.0));
}

TEST(Features, NormalizerUsesPopulationSdAndFloorsDeadChannels) {
  Eigen::MatrixXd x(4, 2);
  x << 1, 5, 2, 5, 3, 5, 4, 5;
  const auto n = fit_normalizer(x);
  EXPECT_DOUBLE_EQ(n.mu[0], 2.5);
  EXPECT_DOUBLE_EQ(n.sigma[0], std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(n.sigma[1], kSigmaFloor);
  Eigen::VectorXd v(2);
  v << 2.5, 5.0;
  const auto z = normalize(n, v);
  EXPECT_DOUBLE_EQ(z[0], 0.0);
  EXPECT_DOUBLE_EQ(z[1], 0.0);
}

TEST(Features, PcaMatchesEigenDecompositionOfGram) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> d;
  Eigen::MatrixXd z(6, 40);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = d(rng);
  z.row(2) *= 4.0;
  const auto basis = fit_pca(z, 3);
  ASSERT_EQ(basis.output_dim(), 3);
  // orthonormal
  EXPECT_TRUE((basis.components.transpose() * basis.components).isIdentity(1e-10));
  // columns are eigenvectors of Z Z^T with the largest eigenvalues
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z * z.transpose());
  for (int k = 0; k < 3; ++k) {
    const double lambda = es.eigenvalues()[5 - k];
    EXPECT_NEAR(basis.singular_values[k] * basis.singular_values[k], lambda, 1e-8 * lambda);
    const Eigen::VectorXd v = basis.components.col(k);
    EXPECT_NEAR(std::abs(v.dot(es.eigenvectors().col(5 - k))), 1.0, 1e-8);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(v[arg], 0.0);
  }
  const auto ratio = basis.explained_variance_ratio();
  EXPECT_NEAR(ratio.sum(), es.eigenvalues().tail(3).sum() / es.eigenvalues().sum(), 1e-10);
}

TEST(Features, PcaRejectsTooManyComponents) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Random(4, 10);
  EXPECT_THROW(fit_pca(z, 5), ParameterError);
}

TEST(StreamingFeatureExtractor, WindowRmsMatchesOfflineComputation) {
  const std::size_t raw = 3;
  ChannelMask mask{{true, false, true}};
  const auto spec = design_highpass(4, 120.0, 4000.0);
  const int n = 50;
  StreamingFeatureExtractor fx(mask, spec, n);
  std::vector<std::vector<double>> signals = {noise(400, 1), noise(400, 2), noise(400, 3)};
  SampleBlock block;
  block.resize(raw, 400);
  for (std::size_t c = 0; c < raw; ++c) {
    for (std::size_t t = 0; t < 400; ++t) block.channel(c)[t] = static_cast<float>(signals[c][t]);
  }
  fx.push(block, 0, 123);
  EXPECT_TRUE(fx.window_ready());
  EXPECT_EQ(fx.end_sample(), 123u);
  fx.push(block, 123, 400);
  const auto rms = fx.latest_rms();
  ASSERT_EQ(rms.size(), 2);
  for (std::size_t k = 0; k < 2; ++k) {
    const std::size_t c = k == 0 ? 0 : 2;
    std::vector<double> x(400);
    for (std::size_t t = 0; t < 400; ++t) x[t] = block.channel(c)[t];
    const auto y = oracle::filter_df1(spec.sections, x);
    double s = 0;
    for (std::size_t t = 400 - n; t < 400; ++t) s += y[t] * y[t];
    EXPECT_NEAR(rms[static_cast<Eigen::Index>(k)], std::sqrt(s / n), 1e-12);
  }
}

TEST(StreamingFeatureExtractor, GapRestartsTheWindow) {
  ChannelMask mask = ChannelMask::all(1);
  StreamingFeatureExtractor fx(mask, design_highpass(2, 120.0, 4000.0), 10);
  SampleBlock b;
  b.resize(1, 10);
  fx.push(b);
  EXPECT_TRUE(fx.window_ready());
  b.resize(1, 5);
  b.first_sample = 15;
  fx.push(b);
  EXPECT_EQ(fx.gap_count(), 1u);
  EXPECT_FALSE(fx.window_ready());
  EXPECT_THROW(fx.latest_rms(), DataError);
}

TEST(FeaturePipeline, FeaturesAreProjectedZScores) {
  FeaturePipeline p;
  p.mask = ChannelMask::all(2);
  p.normalizer.mu = Eigen::Vector2d(1.0, 2.0);
  p.normalizer.sigma = Eigen::Vector2d(2.0, 4.0);
  p.pca.components = Eigen::MatrixXd::Identity(2, 1);
  p.pca.singular_values = Eigen::Vector2d(1.0, 0.5);
  const auto f = p.features_from_rms(Eigen::Vector2d(5.0, 6.0));
  ASSERT_EQ(f.size(), 1);
  EXPECT_DOUBLE_EQ(f[0], 2.0);
}
