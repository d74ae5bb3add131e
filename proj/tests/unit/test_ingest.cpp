#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include "emg/error.hpp"
#include "emg/ingest/cue_schedule.hpp"
#include "emg/ingest/labeling.hpp"
#include "emg/ingest/paced_source.hpp"
#include "emg/ingest/recording.hpp"
#include "emg/ingest/source_spec.hpp"
#include "emg/ingest/stream.hpp"
#include "emg/ingest/synth.hpp"

using namespace emg;
using namespace emg::ingest;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "emg_test_ingest";
  fs::create_directories(dir);
  return dir / name;
}

Recording small_recording() {
  Recording r;
  r.sample_rate_hz = 4000.0;
  r.channels = 3;
  r.sample_count = 257;
  r.samples.resize(r.channels * r.sample_count);
  for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i] = static_cast<float>(std::sin(0.01 * i) * 1e-4);
  r.impedances_ohm = std::vector<double>{1e5, 2e5, 9e5};
  return r;
}

CueSchedule short_schedule(std::uint64_t seed = 3) { return build_cue_schedule(seed, 1, 1, {}, 0.0); }

}  // namespace

TEST(CueSchedule, PresetsHaveBalancedShuffledSeries) {
  const auto initial = build_cue_schedule(11, CuePreset::Initial);
  EXPECT_EQ(initial.entries.size(), 100u);
  const auto recal = build_cue_schedule(11, CuePreset::Recalibration);
  EXPECT_EQ(recal.entries.size(), 50u);
  for (std::size_t s = 0; s < 2; ++s) {
    std::map<Gesture, int> count;
    for (const auto& e : initial.entries) {
      if (e.series == s) ++count[e.gesture];
    }
    EXPECT_EQ(count.size(), 10u);
    for (const auto& [g, c] : count) EXPECT_EQ(c, 5);
  }
}

TEST(CueSchedule, TimingAndSeriesRest) {
  const auto s = build_cue_schedule(1, 1, 2, {}, 60.0);
  ASSERT_EQ(s.entries.size(), 20u);
  EXPECT_DOUBLE_EQ(s.timing.cue_duration(), 5.5);
  EXPECT_DOUBLE_EQ(s.entries[9].start_s, 9 * 5.5);
  EXPECT_DOUBLE_EQ(s.entries[10].start_s, 10 * 5.5 + 60.0);
  EXPECT_DOUBLE_EQ(s.total_duration(), 20 * 5.5 + 60.0);
  const auto& e = s.entries[3];
  EXPECT_DOUBLE_EQ(s.hold_start(e), e.start_s + 1.5);
  EXPECT_DOUBLE_EQ(s.label_start(e), e.start_s + 2.5);
  EXPECT_DOUBLE_EQ(s.hold_end(e), e.start_s + 4.5);
  EXPECT_EQ(s.cue_at(e.start_s + 0.1), &e);
  EXPECT_EQ(s.cue_at(10 * 5.5 + 1.0), nullptr);  // inter-series rest
}

TEST(CueSchedule, SeedDeterminesOrder) {
  EXPECT_EQ(build_cue_schedule(5, CuePreset::Initial), build_cue_schedule(5, CuePreset::Initial));
  EXPECT_NE(build_cue_schedule(5, CuePreset::Initial).entries, build_cue_schedule(6, CuePreset::Initial).entries);
}

TEST(CueSchedule, JsonRoundTrip) {
  auto s = build_cue_schedule(9, CuePreset::Recalibration);
  s.entries[4].discarded = true;
  s.start_epoch = 1234.5;
  EXPECT_EQ(cue_schedule_from_json(cue_schedule_to_json(s)), s);
  const auto path = temp_path("cues.json");
  write_cue_schedule(s, path);
  EXPECT_EQ(read_cue_schedule(path), s);
  EXPECT_THROW(cue_schedule_from_json("{not json"), DecodeError);
  EXPECT_THROW(cue_schedule_from_json(R"({"format":"other","version":1})"), DecodeError);
}

TEST(CueSchedule, RejectsBadParameters) {
  EXPECT_THROW(build_cue_schedule(1, 0, 1), ParameterError);
  CueTiming t;
  t.label_s = 4.0;
  EXPECT_THROW(build_cue_schedule(1, 1, 1, t), ParameterError);
}

TEST(Labeling, WindowsTileTheLabeledTail) {
  auto s = short_schedule();
  s.entries[2].discarded = true;
  const auto total = static_cast<std::uint64_t>(s.total_duration() * 4000.0);
  const auto ds = label_windows(s, 4000.0, total, 1000);
  EXPECT_EQ(ds.windows.size(), 9u * 8u);
  for (const auto& w : ds.windows) {
    const auto& cue = s.entries[w.cue_index];
    EXPECT_FALSE(cue.discarded);
    EXPECT_EQ(w.label, cue.gesture);
    const auto first = static_cast<std::uint64_t>(std::llround(s.label_start(cue) * 4000.0));
    EXPECT_EQ(w.start_sample, first + 1000 * w.window_index);
    EXPECT_LE(w.start_sample + 1000, static_cast<std::uint64_t>(std::llround(s.hold_end(cue) * 4000.0)));
  }
  EXPECT_EQ(ds.label_ids().size(), ds.windows.size());
}

TEST(Labeling, ShortRecordingNamesTheCue) {
  const auto s = short_schedule();
  try {
    label_windows(s, 4000.0, 4000 * 20, 1000);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("cue 3"), std::string::npos) << e.what();
  }
}

TEST(Labeling, ExtractedRmsIsIndependentOfBlockSize) {
  const auto s = short_schedule();
  const auto cfg = default_synth_config(4);
  SynthSource a(cfg, s);
  const auto rec = materialize(a);
  const auto ds = label_windows(s, 4000.0, rec.sample_count, 1000);
  const auto mask = dsp::ChannelMask::all(64);
  const auto filt = dsp::design_highpass(4, 120.0, 4000.0);
  RecordingSource r1(rec);
  const auto m1 = extract_window_rms(r1, mask, filt, ds);
  SynthSource b(cfg, s);
  const auto m2 = extract_window_rms(b, mask, filt, ds);
  EXPECT_EQ(m1.rows(), 80);
  EXPECT_TRUE(m1.isApprox(m2, 1e-12));
}

TEST(Recording, FileRoundTrip) {
  const auto r = small_recording();
  const auto path = temp_path("rec.emgr");
  recording_write(r, path);
  EXPECT_EQ(recording_read(path), r);
  RecordingFileSource src(path);
  EXPECT_EQ(src.total_samples(), 257u);
  EXPECT_EQ(src.impedances(), r.impedances_ohm);
  EXPECT_EQ(materialize(src), r);
}

TEST(Recording, StreamingWriterMatchesWholeFileWriter) {
  const auto r = small_recording();
  const auto path = temp_path("rec_stream.emgr");
  RecordingSource src(r);
  {
    RecordingWriter w(path, r.sample_rate_hz, r.channels, r.sample_count);
    SampleBlock b;
    while (src.next(b, 50)) w.write(b);
    w.finish(r.impedances_ohm);
  }
  EXPECT_EQ(recording_read(path), r);
}

TEST(Recording, CorruptFilesAreRejected) {
  const auto r = small_recording();
  const auto path = temp_path("rec_bad.emgr");
  recording_write(r, path);
  fs::resize_file(path, fs::file_size(path) - 100);
  EXPECT_THROW(recording_read(path), DecodeError);
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE and some more bytes to fill a header";
  }
  EXPECT_THROW(recording_read(path), DecodeError);
  EXPECT_THROW(recording_read(temp_path("missing.emgr")), DataError);
}

TEST(Synth, OutputIndependentOfBlockSplit) {
  const auto s = short_schedule();
  const auto cfg = default_synth_config(2);
  SynthSource a(cfg, s), b(cfg, s);
  const auto ra = materialize(a);
  Recording rb;
  rb.channels = 64;
  SampleBlock blk;
  std::vector<std::vector<float>> ch(64);
  std::size_t k = 1;
  while (b.next(blk, 1 + (k++ * 37) % 1500)) {
    for (std::size_t c = 0; c < 64; ++c) ch[c].insert(ch[c].end(), blk.channel(c).begin(), blk.channel(c).end());
  }
  for (std::size_t c = 0; c < 64; ++c) {
    ASSERT_EQ(ch[c].size(), ra.sample_count);
    for (std::uint64_t t = 0; t < ra.sample_count; t += 997) ASSERT_EQ(ch[c][t], ra.at(c, t));
  }
}

TEST(Synth, TemplatesHaveTheConfiguredRatio) {
  const auto cfg = default_synth_config(1);
  for (std::size_t g = 1; g < kGestureCount; ++g) {
    const auto& t = cfg.templates[g];
    double ms = 0;
    for (double v : t) ms += v * v;
    EXPECT_NEAR(std::sqrt(ms / static_cast<double>(t.size())) / cfg.noise_floor_v, 5.7, 1e-6) << g;
    for (double v : t) EXPECT_GE(v, cfg.noise_floor_v);
  }
  for (double v : cfg.templates[0]) EXPECT_DOUBLE_EQ(v, cfg.noise_floor_v);
}

TEST(Synth, BlobPeaksWhereItIsPlaced) {
  const dsp::ElectrodeArray grid;
  const auto t = blob_template(grid, 1.0, {2.0, 5.0, 4.0}, 1.0);
  const auto peak = std::max_element(t.begin(), t.end()) - t.begin();
  EXPECT_EQ(static_cast<std::size_t>(peak), grid.channel_at(2, 5));
}

TEST(Synth, GainDriftScalesGainAndImpedanceTogether) {
  const auto base = default_synth_config(1);
  const auto d = with_gain_drift(base, 0.05, 0.2, 7);
  ASSERT_EQ(d.channel_gain.size(), 64u);
  for (std::size_t c = 0; c < 64; ++c) {
    EXPECT_GE(d.channel_gain[c], 0.05);
    EXPECT_NEAR(d.impedances_ohm[c] / base.impedances_ohm[c], d.channel_gain[c], 1e-12);
  }
}

TEST(Synth, ConfigJsonRoundTrip) {
  const auto cfg = with_gain_drift(default_synth_config(3), 0.05, 0.2, 1);
  const auto back = synth_config_from_json(synth_config_to_json(cfg));
  EXPECT_EQ(back.channel_gain, cfg.channel_gain);
  EXPECT_EQ(back.impedances_ohm, cfg.impedances_ohm);
  EXPECT_EQ(back.templates, cfg.templates);
  EXPECT_EQ(back.seed, cfg.seed);
}

TEST(Synth, ActiveGestureRaisesItsBlobRms) {
  const auto s = short_schedule();
  const auto cfg = default_synth_config(5);
  SynthSource src(cfg, s);
  const auto rec = materialize(src);
  const auto& cue = *std::find_if(s.entries.begin(), s.entries.end(),
                                  [](const CueEntry& e) { return e.gesture == Gesture::FingersClosed; });
  const auto& rest = *std::find_if(s.entries.begin(), s.entries.end(),
                                   [](const CueEntry& e) { return e.gesture == Gesture::Rest; });
  auto rms = [&](const CueEntry& e, std::size_t c) {
    const auto a = static_cast<std::uint64_t>(s.label_start(e) * 4000.0);
    double sum = 0;
    for (std::uint64_t t = a; t < a + 8000; ++t) sum += static_cast<double>(rec.at(c, t)) * rec.at(c, t);
    return std::sqrt(sum / 8000.0);
  };
  const std::size_t ch = cfg.grid.channel_at(2, 2);
  EXPECT_GT(rms(cue, ch), 5.0 * rms(rest, ch));
}

TEST(StreamProtocol, FramesRoundTrip) {
  StreamHello h{4000.0, 3, 77, std::vector<double>{1.0, 2.0, 3.0}};
  const auto frame = encode_hello(h);
  EXPECT_EQ(decode_hello(frame.substr(5)), h);
  SampleBlock b;
  b.resize(2, 5);
  b.first_sample = 40;
  for (std::size_t i = 0; i < b.data.size(); ++i) b.data[i] = static_cast<float>(i) - 3.5f;
  const auto data = encode_data(b, 1, 4);
  const auto back = decode_data(data.substr(5), 2);
  EXPECT_EQ(back.first_sample, 41u);
  EXPECT_EQ(back.count, 3u);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(back.channel(c)[t], b.channel(c)[t + 1]);
  }
  EXPECT_THROW(decode_data(data.substr(5, 10), 2), DecodeError);
}

TEST(StreamProtocol, ReplayDeliversTheWholeSourceWithGapAccounting) {
  const auto rec = small_recording();
  ReplayOptions opt;
  opt.speed = 0.0;
  opt.block_samples = 40;
  opt.drop = {{100, 140}};
  ReplayServer server([&] { return std::make_unique<RecordingSource>(rec); }, net::Endpoint{"127.0.0.1", 0}, opt);
  std::thread t([&] { server.serve_one(std::chrono::seconds(10)); });
  StreamClient client(net::Endpoint{"127.0.0.1", server.port()});
  EXPECT_EQ(client.channels(), 3u);
  EXPECT_EQ(client.impedances(), rec.impedances_ohm);
  SampleBlock b;
  std::uint64_t received = 0;
  while (client.next(b, 1000)) {
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < b.count; ++i) {
        const auto s = b.first_sample + i;
        EXPECT_FALSE(s >= 100 && s < 140);
        ASSERT_EQ(b.channel(c)[i], rec.at(c, s));
      }
    }
    received += b.count;
  }
  t.join();
  EXPECT_EQ(received, rec.sample_count - 40);
  EXPECT_EQ(client.gap_count(), 1u);
  EXPECT_TRUE(client.ended());
}

TEST(PacedSource, RespectsWallClock) {
  Recording r = small_recording();
  r.sample_rate_hz = 1000.0;
  PacedSource src(std::make_unique<RecordingSource>(r), 1.0);
  SampleBlock b;
  const auto t0 = std::chrono::steady_clock::now();
  while (src.next(b, 50)) {
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_GT(s, 0.15);  // 257 samples at 1 kHz
  EXPECT_THROW(PacedSource(std::make_unique<RecordingSource>(r), 0.0), ParameterError);
}

TEST(SourceSpec, ParsesDescriptors) {
  auto s = SourceSpec::parse("synth:42:recalibration");
  EXPECT_EQ(s.kind, SourceSpec::Kind::Synth);
  EXPECT_EQ(s.seed, 42u);
  EXPECT_EQ(s.preset, CuePreset::Recalibration);
  s = SourceSpec::parse("tcp:127.0.0.1:9000");
  EXPECT_EQ(s.kind, SourceSpec::Kind::Tcp);
  EXPECT_EQ(s.location, "127.0.0.1:9000");
  s = SourceSpec::parse("recording:/tmp/a.emgr");
  EXPECT_EQ(s.kind, SourceSpec::Kind::Recording);
  EXPECT_THROW(SourceSpec::parse("synth:x"), ParameterError);
  EXPECT_THROW(SourceSpec::parse("carrier-pigeon:1"), ParameterError);
  EXPECT_THROW(SourceSpec::parse("nothing"), ParameterError);
  EXPECT_THROW(SourceSpec::parse("synth:1:weekly"), ParameterError);
}

TEST(SourceSpec, OpensSynthWithItsSchedule) {
  auto opened = open_source(SourceSpec::parse("synth:3"));
  ASSERT_TRUE(opened.schedule);
  EXPECT_EQ(opened.schedule->entries.size(), 100u);
  EXPECT_EQ(opened.source->channels(), 64u);
  EXPECT_EQ(cue_sidecar_path("x.emgr"), "x.emgr.cues.json");
}
