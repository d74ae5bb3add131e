#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <set>

#include "emg/error.hpp"
#include "emg/ingest/synth.hpp"
#include "emg/model/adam.hpp"
#include "emg/model/bundle.hpp"
#include "emg/model/calibration.hpp"
#include "emg/model/confusion.hpp"
#include "emg/model/loss.hpp"
#include "emg/model/mlp.hpp"
#include "emg/model/trainer.hpp"

using namespace emg;
using namespace emg::model;

TEST(Loss, SoftmaxIsShiftInvariantAndStable) {
  Eigen::VectorXd z(3);
  z << 1.0, 2.0, 3.0;
  const auto a = softmax(z);
  const auto b = softmax((z.array() + 1000.0).matrix());
  EXPECT_TRUE(a.isApprox(b, 1e-12));
  EXPECT_NEAR(a.sum(), 1.0, 1e-15);
  EXPECT_NEAR(a[2], std::exp(3.0) / (std::exp(1.0) + std::exp(2.0) + std::exp(3.0)), 1e-15);
  Eigen::VectorXd big(2);
  big << 1000.0, -1000.0;
  EXPECT_TRUE(softmax(big).allFinite());
  EXPECT_NEAR(cross_entropy(big, 1), 2000.0, 1e-9);
}

TEST(Loss, CrossEntropyGradientMatchesFiniteDifference) {
  Eigen::VectorXd z(4);
  z << 0.3, -1.2, 2.0, 0.1;
  const auto g = cross_entropy_gradient(z, 2);
  for (int i = 0; i < 4; ++i) {
    auto p = z, m = z;
    p[i] += 1e-6;
    m[i] -= 1e-6;
    EXPECT_NEAR(g[i], (cross_entropy(p, 2) - cross_entropy(m, 2)) / 2e-6, 1e-8);
  }
}

TEST(Mlp, ShapesAndInitializationRange) {
  const auto net = Mlp::create(30, {512, 512}, 10, 0.2, 1);
  ASSERT_EQ(net.layers().size(), 3u);
  EXPECT_EQ(net.input_dim(), 30);
  EXPECT_EQ(net.output_dim(), 10);
  EXPECT_EQ(net.parameter_count(), 30u * 512 + 512 + 512 * 512 + 512 + 512 * 10 + 10);
  const double limit = std::sqrt(6.0 / 30.0);
  EXPECT_LE(net.layers()[0].weights.cwiseAbs().maxCoeff(), limit);
  EXPECT_EQ(net.layers()[0].bias.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(Mlp::create(30, {8}, 10, 0.2, 1), Mlp::create(30, {8}, 10, 0.2, 1));
}

TEST(Mlp, ForwardIsReluThenLinear) {
  DenseLayer h{Eigen::MatrixXd(2, 2), Eigen::VectorXd(2)};
  h.weights << 1, -1, 2, 1;
  h.bias << 0.5, -10;
  DenseLayer o{Eigen::MatrixXd(2, 1), Eigen::VectorXd(1)};
  o.weights << 2, 3;
  o.bias << 1;
  Mlp net({h, o}, 0.0);
  Eigen::VectorXd x(2);
  x << 1, 1;
  // hidden = relu([1+2+0.5, -1+1-10]) = [3.5, 0]
  EXPECT_DOUBLE_EQ(net.forward(x)[0], 8.0);
}

TEST(Mlp, DropoutMasksAreInverted) {
  const auto net = Mlp::create(4, {1000}, 3, 0.25, 2);
  Rng rng(3);
  const auto m = net.sample_dropout(20, rng);
  ASSERT_EQ(m.hidden.size(), 1u);
  std::size_t zeros = 0;
  for (Eigen::Index i = 0; i < m.hidden[0].size(); ++i) {
    const double v = m.hidden[0].data()[i];
    EXPECT_TRUE(v == 0.0 || std::abs(v - 1.0 / 0.75) < 1e-15);
    zeros += v == 0.0;
  }
  EXPECT_NEAR(static_cast<double>(zeros) / 20000.0, 0.25, 0.02);
}

TEST(Mlp, BatchLossMatchesPerSampleMean) {
  const auto net = Mlp::create(5, {7}, 10, 0.0, 4);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 5);
  const std::vector<int> y = {0, 1, 2, 3, 4, 9};
  double mean = 0.0;
  for (int i = 0; i < 6; ++i) mean += cross_entropy(net.forward(x.row(i).transpose()), y[static_cast<std::size_t>(i)]);
  EXPECT_NEAR(net.loss(x, y), mean / 6.0, 1e-12);
}

TEST(Adam, FirstStepMovesEachParameterByTheLearningRate) {
  auto net = Mlp::create(2, {}, 2, 0.0, 5);
  const auto before = net;
  Gradients g;
  g.layers = net.layers();
  g.layers[0].weights << 0.5, -2.0, 0.0, 1e-3;
  g.layers[0].bias << -0.1, 4.0;
  AdamConfig cfg;
  cfg.learning_rate = 0.01;
  Adam adam(net, cfg);
  adam.step(net, g);
  EXPECT_EQ(adam.steps(), 1);
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double gi = g.layers[0].weights.data()[i];
    const double expect = before.layers()[0].weights.data()[i] - 0.01 * gi / (std::abs(gi) + cfg.epsilon);
    EXPECT_NEAR(net.layers()[0].weights.data()[i], expect, 1e-15);
  }
}

TEST(Split, StratifiedDisjointAndComplete) {
  std::vector<int> labels;
  for (int c = 0; c < 10; ++c) {
    for (int i = 0; i < 80; ++i) labels.push_back(c);
  }
  const auto s = stratified_split(labels, {}, 7);
  EXPECT_EQ(s.test.size(), 160u);
  EXPECT_EQ(s.validation.size(), 120u);  // floor(0.16 * 80) = 12 per class
  EXPECT_EQ(s.train.size(), 520u);
  std::set<std::size_t> all;
  for (const auto* part : {&s.train, &s.validation, &s.test}) all.insert(part->begin(), part->end());
  EXPECT_EQ(all.size(), labels.size());
  std::map<int, int> per_class;
  for (auto r : s.test) ++per_class[labels[r]];
  for (const auto& [c, n] : per_class) EXPECT_EQ(n, 16);
  const auto again = stratified_split(labels, {}, 7);
  EXPECT_EQ(again.test, s.test);
  EXPECT_NE(stratified_split(labels, {}, 8).test, s.test);
}

TEST(Confusion, AccuracyAndRecall) {
  ConfusionMatrix cm;
  cm.add(0, 0);
  cm.add(0, 1);
  cm.add(1, 1);
  cm.add(2, 2);
  EXPECT_EQ(cm.total(), 4u);
  EXPECT_DOUBLE_EQ(cm.accuracy(), 0.75);
  EXPECT_DOUBLE_EQ(cm.recall(0), 0.5);
  EXPECT_TRUE(std::isnan(cm.recall(5)));
}

TEST(Training, LearnsSeparableClusters) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd x(500, 4);
  std::vector<int> y(500);
  for (int i = 0; i < 500; ++i) {
    y[static_cast<std::size_t>(i)] = i % 10;
    for (int j = 0; j < 4; ++j) x(i, j) = 0.1 * n01(rng) + ((i % 10) >> j & 1) * 2.0 + (i % 10 >= 8 ? 3.0 * j : 0.0);
  }
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.hidden = {32, 32};
  cfg.adam.learning_rate = 3e-3;
  const auto r = train(x, y, cfg);
  EXPECT_GE(r.test.accuracy(), 0.95);
  EXPECT_EQ(r.history.train_loss.size(), 60u);
  EXPECT_GE(r.history.best_epoch, 0);
  EXPECT_DOUBLE_EQ(r.history.best_validation_loss(),
                   r.history.validation_loss[static_cast<std::size_t>(r.history.best_epoch)]);
}

TEST(Training, MissingClassIsAnError) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(50, 3);
  std::vector<int> y(50, 1);
  EXPECT_THROW(train(x, y, {}), DataError);
}

class CalibrationTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    schedule_ = new ingest::CueSchedule(ingest::build_cue_schedule(4, 2, 1, {}, 0.0));
    auto src = ingest::make_synth_source(ingest::default_synth_config(1), *schedule_);
    CalibrationOptions opt;
    opt.train.epochs = 30;
    opt.train.hidden = {64, 64};
    bundle_ = new ModelBundle(calibrate(*src, *schedule_, opt));
  }
  static void TearDownTestSuite() {
    delete bundle_;
    delete schedule_;
  }
  static ingest::CueSchedule* schedule_;
  static ModelBundle* bundle_;
};
ingest::CueSchedule* CalibrationTest::schedule_ = nullptr;
ModelBundle* CalibrationTest::bundle_ = nullptr;

TEST_F(CalibrationTest, PipelineShapes) {
  const auto& p = bundle_->pipeline;
  EXPECT_EQ(p.mask.channel_count(), 64u);
  EXPECT_EQ(p.feature_dim(), 30);
  EXPECT_EQ(p.window_samples, 1000);
  EXPECT_EQ(bundle_->train_windows + bundle_->validation_windows + bundle_->test_windows, 160u);
  EXPECT_EQ(bundle_->network.input_dim(), 30);
  EXPECT_GE(bundle_->test_confusion.accuracy(), 0.8);
}

TEST_F(CalibrationTest, BundleJsonRoundTripPreservesPredictions) {
  const auto text = bundle_to_json(*bundle_);
  const auto back = bundle_from_json(text);
  EXPECT_EQ(back.id, bundle_->id);
  EXPECT_EQ(compute_bundle_id(back), bundle_->id);
  EXPECT_EQ(back.network, bundle_->network);
  Eigen::VectorXd rms = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(bundle_->pipeline.accepted_channels()), 3e-5);
  EXPECT_TRUE(back.probabilities(rms).isApprox(bundle_->probabilities(rms), 1e-15));
  EXPECT_NEAR(back.probabilities(rms).sum(), 1.0, 1e-12);
  const auto path = std::filesystem::temp_directory_path() / "emg_test_bundle.json";
  save_bundle(*bundle_, path);
  EXPECT_EQ(load_bundle(path).id, bundle_->id);
}

TEST_F(CalibrationTest, MissingBundleFileIsReported) {
  try {
    load_bundle("/nonexistent/bundle.json");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("bundle not found"), std::string::npos);
  }
  EXPECT_THROW(bundle_from_json("{}"), DecodeError);
}

TEST_F(CalibrationTest, EvaluateBundleCoversEveryWindow) {
  auto src = ingest::make_synth_source(ingest::default_synth_config(1), *schedule_);
  const auto cm = evaluate_bundle(*bundle_, *src, *schedule_);
  EXPECT_EQ(cm.total(), 160u);
  EXPECT_GE(cm.accuracy(), 0.8);
}

TEST_F(CalibrationTest, RecalibrationKeepsTheMask) {
  auto drifted = ingest::with_gain_drift(ingest::default_synth_config(1), 0.05, 0.2, 3);
  auto src = ingest::make_synth_source(drifted, *schedule_);
  CalibrationOptions opt;
  opt.train.epochs = 5;
  opt.train.hidden = {16};
  opt.impedance_threshold_ohm = 1.0;  // would reject everything if it were re-applied
  const auto fresh = recalibrate(*src, *schedule_, *bundle_, opt);
  EXPECT_EQ(fresh.pipeline.mask, bundle_->pipeline.mask);
  EXPECT_NE(fresh.id, bundle_->id);
}
