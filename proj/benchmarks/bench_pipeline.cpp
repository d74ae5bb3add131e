#include <benchmark/benchmark.h>

#include <random>

#include "emg/decode/decoder.hpp"
#include "emg/dsp/feature_pipeline.hpp"
#include "emg/model/mlp.hpp"
#include "emg/robot/robot_sim.hpp"
#include "emg/robot/wire.hpp"

using namespace emg;

namespace {

constexpr std::size_t kChannels = 64;

SampleBlock noise_block(std::size_t count, std::uint64_t first, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<float> n(0.0f, 20.0f);
  SampleBlock b;
  b.resize(kChannels, count);
  b.first_sample = first;
  for (auto& v : b.data) v = n(rng);
  return b;
}

void BM_FilterBankFrame(benchmark::State& state) {
  dsp::FilterBank bank(dsp::design_highpass(4, 120.0, 4000.0), kChannels);
  std::vector<double> frame(kChannels, 1.0), out(kChannels);
  for (auto _ : state) {
    bank.step(frame, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FilterBankFrame);

// One decoder period of raw samples through mask, filter and window buffer.
void BM_StreamingPush(benchmark::State& state) {
  const auto block_len = static_cast<std::size_t>(state.range(0));
  dsp::StreamingFeatureExtractor ex(dsp::ChannelMask::all(kChannels), dsp::design_highpass(4, 120.0, 4000.0),
                                    dsp::kDefaultWindowSamples);
  std::uint64_t next = 0;
  const auto proto = noise_block(block_len, 0, 1);
  for (auto _ : state) {
    auto b = proto;
    b.first_sample = next;
    next += block_len;
    ex.push(b);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(block_len));
}
BENCHMARK(BM_StreamingPush)->Arg(137)->Arg(667);

void BM_FeaturesFromWindow(benchmark::State& state) {
  std::mt19937 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd train(400, kChannels);
  for (Eigen::Index i = 0; i < train.size(); ++i) train.data()[i] = std::abs(n(rng)) + 1.0;
  const auto norm = dsp::fit_normalizer(train);
  Eigen::MatrixXd z(train.rows(), train.cols());
  for (Eigen::Index r = 0; r < train.rows(); ++r) z.row(r) = dsp::normalize(norm, train.row(r).transpose()).transpose();
  const auto basis = dsp::fit_pca(z.transpose(), dsp::kDefaultPcaComponents);
  Eigen::MatrixXd window(dsp::kDefaultWindowSamples, kChannels);
  for (Eigen::Index i = 0; i < window.size(); ++i) window.data()[i] = n(rng);
  for (auto _ : state) {
    auto f = dsp::pca_project(basis, dsp::normalize(norm, dsp::window_rms(window)));
    benchmark::DoNotOptimize(f.data());
  }
}
BENCHMARK(BM_FeaturesFromWindow);

void BM_MlpForward(benchmark::State& state) {
  const auto net = model::Mlp::create(30, {64, 32}, 10, 0.2, 7);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(30, -1.0, 1.0);
  for (auto _ : state) {
    auto y = net.forward(x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_MlpForward);

void BM_DecoderStep(benchmark::State& state) {
  decode::Decoder d;
  std::mt19937_64 rng(4);
  std::gamma_distribution<double> gam(0.3);
  std::vector<Eigen::VectorXd> inputs(256, Eigen::VectorXd(10));
  for (auto& p : inputs) {
    for (int i = 0; i < 10; ++i) p[i] = gam(rng) + 1e-9;
    p /= p.sum();
  }
  std::size_t i = 0;
  for (auto _ : state) {
    auto t = d.step_probabilities(inputs[i++ & 255]);
    benchmark::DoNotOptimize(t.decoded.label);
  }
}
BENCHMARK(BM_DecoderStep);

void BM_RobotTick(benchmark::State& state) {
  robot::RobotSim sim;
  const decode::DecodedGesture g{Gesture::WristUp, 1, 1};
  for (auto _ : state) {
    auto cmds = sim.step(g, Mode::ArmDrive);
    benchmark::DoNotOptimize(cmds.data());
  }
}
BENCHMARK(BM_RobotTick);

void BM_WireRoundTrip(benchmark::State& state) {
  const robot::JointCommand cmd{robot::Joint::Lift, robot::CommandKind::Velocity, 0.125, Mode::ArmDrive};
  std::uint32_t seq = 0;
  for (auto _ : state) {
    auto w = robot::parse_command(robot::encode_command(cmd, ++seq));
    benchmark::DoNotOptimize(w.seq);
  }
}
BENCHMARK(BM_WireRoundTrip);

}  // namespace

BENCHMARK_MAIN();
