#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "emg/analysis/heatmap.hpp"
#include "emg/analysis/impedance.hpp"
#include "emg/analysis/rt_accuracy.hpp"
#include "emg/analysis/snr.hpp"
#include "emg/analysis/stats.hpp"
#include "emg/error.hpp"
#include "emg/ingest/synth.hpp"
#include "oracles.hpp"

using namespace emg;
using namespace emg::analysis;

namespace {

std::vector<std::pair<double, double>> pairs_from(const std::vector<double>& diffs) {
  std::vector<std::pair<double, double>> p;
  for (double d : diffs) p.emplace_back(10.0, 10.0 + d);
  return p;
}

}  // namespace

TEST(Ranks, AverageTies) {
  const std::vector<double> v = {3.0, 1.0, 3.0, 2.0, 3.0};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{4.0, 1.0, 4.0, 2.0, 4.0}));
}

TEST(Wilcoxon, SmallExampleByHand) {
  // diffs 1, 2, 3, 4, -5: W+ = 10 of 15; P(W+ >= 10) = 10/32 under the null
  const auto r = wilcoxon_signed_rank(pairs_from({1, 2, 3, 4, -5}), Tail::Greater);
  EXPECT_TRUE(r.exact);
  EXPECT_DOUBLE_EQ(r.statistic, 10.0);
  EXPECT_NEAR(r.p_value, 10.0 / 32.0, 1e-15);
  const auto all_up = wilcoxon_signed_rank(pairs_from({1, 2, 3, 4, 5}), Tail::Greater);
  EXPECT_NEAR(all_up.p_value, 1.0 / 32.0, 1e-15);
  EXPECT_NEAR(wilcoxon_signed_rank(pairs_from({1, 2, 3, 4, 5}), Tail::TwoSided).p_value, 2.0 / 32.0, 1e-15);
}

TEST(Wilcoxon, MatchesEnumerationWithTiesAndZeros) {
  std::mt19937 rng(4);
  for (int i = 0; i < 300; ++i) {
    std::vector<double> d(5 + rng() % 8);
    for (auto& x : d) x = static_cast<int>(rng() % 9) - 3;
    std::size_t nz = 0;
    for (double x : d) nz += x != 0.0;
    if (nz < 5) continue;
    const auto ref = oracle::wilcoxon_enumerate(d);
    const auto r = wilcoxon_signed_rank(pairs_from(d), Tail::Less);
    ASSERT_EQ(r.n, ref.n);
    ASSERT_NEAR(r.statistic, ref.w_plus, 1e-12);
    ASSERT_NEAR(r.p_value, ref.p_less, 1e-12);
  }
}

TEST(Wilcoxon, NormalApproximationAboveExactRange) {
  std::vector<double> d;
  for (int i = 1; i <= 40; ++i) d.push_back(i % 7 == 0 ? -i : static_cast<double>(i % 10 + 1));
  const auto r = wilcoxon_signed_rank(pairs_from(d), Tail::Greater);
  EXPECT_FALSE(r.exact);
  ASSERT_TRUE(r.z);
  // independent z with tie correction
  std::vector<double> mag(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) mag[i] = std::abs(d[i]);
  const auto rk = oracle::ranks(mag);
  double w = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) w += d[i] > 0 ? rk[i] : 0.0;
  std::map<double, double> ties;
  for (double m : mag) ties[m] += 1.0;
  double t = 0.0;
  for (const auto& [v, c] : ties) t += c * c * c - c;
  const double n = 40.0;
  const double z = (w - n * (n + 1) / 4) / std::sqrt(n * (n + 1) * (2 * n + 1) / 24 - t / 48);
  EXPECT_NEAR(r.statistic, w, 1e-9);
  EXPECT_NEAR(*r.z, z, 1e-12);
  EXPECT_NEAR(r.p_value, 0.5 * std::erfc(z / std::sqrt(2.0)), 1e-12);
}

TEST(Wilcoxon, TooFewNonzeroDifferences) {
  EXPECT_THROW(wilcoxon_signed_rank(pairs_from({1, 0, 2, 0, 3, 4})), ParameterError);
  EXPECT_THROW(wilcoxon_signed_rank(pairs_from({0, 0, 0, 0, 0})), ParameterError);
}

TEST(KruskalWallis, StatisticAndChiSquaredP) {
  const std::vector<std::vector<double>> g = {{2.9, 3.0, 2.5, 2.6, 3.2}, {3.8, 2.7, 4.0, 2.4}, {2.8, 3.4, 3.7, 2.2, 2.0}};
  const auto r = kruskal_wallis(g, 0);
  EXPECT_NEAR(r.statistic, oracle::kruskal_h(g), 1e-12);
  EXPECT_EQ(r.df, 2);
  EXPECT_NEAR(r.p_value, oracle::chi2_sf_even_df(r.statistic, 2), 1e-12);
  EXPECT_FALSE(r.exact_p);
  EXPECT_EQ(r.n, 14u);
  EXPECT_EQ(r.group_sizes, (std::vector<std::size_t>{5, 4, 5}));
}

TEST(KruskalWallis, ExactPermutationP) {
  const std::vector<std::vector<double>> g = {{1, 1, 0, 1}, {0, 0, 1}, {1, 0, 0}};
  const auto r = kruskal_wallis(g);
  ASSERT_TRUE(r.exact_p);
  const auto ref = oracle::kruskal_enumerate(g);
  EXPECT_NEAR(r.statistic, ref.h, 1e-12);
  EXPECT_NEAR(*r.exact_p, ref.p, 1e-12);
}

TEST(KruskalWallis, AllTiedGivesZero) {
  const auto r = kruskal_wallis({{1, 1}, {1, 1, 1}});
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
  EXPECT_THROW(kruskal_wallis({{1, 2}}), ParameterError);
  EXPECT_THROW(kruskal_wallis({{1, 2}, {}}), ParameterError);
}

TEST(Descriptive, LeastSquaresAndSummary) {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> y = {3, 5, 7, 9};
  const auto f = least_squares(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  const auto s = summarize(y);
  EXPECT_DOUBLE_EQ(s.mean, 6.0);
  EXPECT_DOUBLE_EQ(s.median, 6.0);
  EXPECT_NEAR(s.sd, std::sqrt(20.0 / 3.0), 1e-12);
  EXPECT_DOUBLE_EQ(median({5, 1, 3}), 3.0);
}

TEST(Impedance, DriftSummaryAndOneTailedTest) {
  std::vector<double> before, after;
  for (int i = 0; i < 30; ++i) {
    before.push_back(100e3 + 1e3 * i);
    after.push_back(before.back() * (i % 5 == 0 ? 0.98 : 1.1));
  }
  const auto d = impedance_drift(before, after);
  double mean = 0.0;
  for (int i = 0; i < 30; ++i) mean += 100.0 * (after[i] - before[i]) / before[i];
  EXPECT_NEAR(d.mean_percent_change, mean / 30.0, 1e-9);
  EXPECT_EQ(d.test.tail, Tail::Greater);
  EXPECT_LT(d.test.p_value, 1e-3);
  const auto s = summarize_impedances(std::vector<double>{1e5, 6e5, 7e5});
  EXPECT_EQ(s.rejected, 2u);
}

TEST(Heatmap, MeanPerElectrodeOnTheGrid) {
  dsp::ChannelMask mask = dsp::ChannelMask::all(64);
  mask.accepted[5] = false;
  Eigen::MatrixXd rms(3, 63);
  for (Eigen::Index c = 0; c < 63; ++c) {
    rms(0, c) = c;
    rms(1, c) = 100;
    rms(2, c) = c + 2;
  }
  const std::vector<int> labels = {1, 0, 1};
  const auto h = mean_rms_heatmap(rms, labels, Gesture::FingersClosed, mask);
  EXPECT_EQ(h.values.rows(), 8);
  EXPECT_DOUBLE_EQ(h.values(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(h.values(0, 5), 0.0);    // rejected electrode
  EXPECT_DOUBLE_EQ(h.values(0, 6), 6.0);    // raw channel 6 is accepted column 5
  EXPECT_DOUBLE_EQ(h.values(7, 7), 63.0);
  EXPECT_THROW(mean_rms_heatmap(rms, labels, Gesture::PalmUp, mask), DataError);
  const auto csv = heatmap_to_csv(h);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "row,c0,c1,c2,c3,c4,c5,c6,c7");
}

TEST(Pairwise, PooledZScoreThenDistances) {
  std::mt19937 rng(2);
  std::normal_distribution<double> n01;
  const int per = 3, m = 4;
  Eigen::MatrixXd a(10 * per, m), b(10 * per, m);
  std::vector<int> la, lb;
  for (int g = 0; g < 10; ++g) {
    for (int i = 0; i < per; ++i) {
      for (int c = 0; c < m; ++c) {
        a(g * per + i, c) = g * (c + 1) + n01(rng);
        b(g * per + i, c) = 2.0 * g * (c + 1) + n01(rng) + 5.0;
      }
      la.push_back(g);
      lb.push_back(g);
    }
  }
  Eigen::MatrixXd pooled(a.rows() + b.rows(), m);
  pooled << a, b;
  const Eigen::RowVectorXd mu = pooled.colwise().mean();
  const Eigen::RowVectorXd sd = ((pooled.rowwise() - mu).array().square().colwise().sum() / pooled.rows()).sqrt();
  auto mean_of = [&](const Eigen::MatrixXd& x, int g) {
    Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(m);
    for (int i = 0; i < per; ++i) s += (x.row(g * per + i) - mu).cwiseQuotient(sd);
    return Eigen::VectorXd(s.transpose() / per);
  };
  const auto cos = pairwise_matrix(a, la, b, lb, Metric::Cosine);
  const auto euc = pairwise_matrix(a, la, b, lb, Metric::Euclidean);
  ASSERT_EQ(cos.values.rows(), 20);
  ASSERT_EQ(cos.labels.size(), 20u);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const auto u = mean_of(a, i), v = mean_of(b, j);
      EXPECT_NEAR(cos.values(i, 10 + j), u.dot(v) / (u.norm() * v.norm()), 1e-9);
      EXPECT_NEAR(euc.values(i, 10 + j), (u - v).norm(), 1e-9);
    }
    EXPECT_NEAR(euc.values(i, i), 0.0, 1e-12);
  }
  EXPECT_TRUE(cos.values.isApprox(cos.values.transpose(), 1e-12));
  EXPECT_NE(matrix_to_csv(cos).find(cos.labels[3]), std::string::npos);
}

TEST(Snr, RatioOfRootMeanSquares) {
  Eigen::MatrixXd mvc = Eigen::MatrixXd::Constant(10, 2, 3.0);
  Eigen::MatrixXd rest = Eigen::MatrixXd::Constant(20, 2, 0.5);
  rest(0, 0) = -0.5;
  // pooled sums: sqrt(10 * 2 * 9 / (20 * 2 * 0.25))
  EXPECT_NEAR(snr(mvc, rest), std::sqrt(18.0), 1e-12);
  EXPECT_NEAR(snr(Eigen::MatrixXd::Constant(20, 2, 3.0), rest), 6.0, 1e-12);
  EXPECT_THROW(snr(mvc, Eigen::MatrixXd::Zero(5, 2)), DataError);
}

TEST(Snr, SyntheticSessionMatchesTemplateRatio) {
  const auto schedule = ingest::build_cue_schedule(3, 1, 1, {}, 0.0);
  const auto cfg = ingest::default_synth_config(1);
  auto src = ingest::make_synth_source(cfg, schedule);
  const auto r = session_snr(*src, schedule, dsp::ChannelMask::all(64), dsp::design_highpass(4, 120.0, 4000.0));
  EXPECT_EQ(r.mvc_cues, 1u);
  EXPECT_EQ(r.rest_cues, 1u);
  EXPECT_GT(r.snr, 4.0);
  EXPECT_LT(r.snr, 8.0);
  EXPECT_NEAR(r.snr, r.mvc_rms / r.rest_rms, 1e-9);
}

TEST(RtAccuracy, ScoresPredictionsInsideTheHold) {
  const auto schedule = ingest::build_cue_schedule(1, 1, 1, {}, 0.0);
  std::vector<TimedPrediction> preds;
  const double fs = 4000.0;
  for (const auto& cue : schedule.entries) {
    const auto lo = static_cast<std::uint64_t>(schedule.hold_start(cue) * fs);
    preds.push_back({lo, cue.gesture});  // boundary sample itself is excluded
    for (int k = 1; k <= 20; ++k) {
      const Gesture g = (cue.index == 0 && k <= 5) ? Gesture::PinchFingers : cue.gesture;
      preds.push_back({lo + 600u * static_cast<std::uint64_t>(k), g});
    }
  }
  const auto r = score_predictions(schedule, fs, preds, 20);
  ASSERT_EQ(r.cues.size(), 10u);
  EXPECT_EQ(r.cues[0].predictions, 20u);
  if (schedule.entries[0].gesture != Gesture::PinchFingers) {
    EXPECT_DOUBLE_EQ(r.cues[0].accuracy, 0.75);
  }
  EXPECT_EQ(r.flagged, 0u);
  EXPECT_EQ(r.min_predictions_per_hold, 20u);
  const auto sparse = score_predictions(schedule, fs, preds, 21);
  EXPECT_EQ(sparse.flagged, 10u);
}
