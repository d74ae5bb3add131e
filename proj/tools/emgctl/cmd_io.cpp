#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "common.hpp"
#include "emg/decode/stream_decoder.hpp"
#include "emg/error.hpp"
#include "emg/ingest/recording.hpp"
#include "emg/ingest/source_spec.hpp"
#include "emg/ingest/stream.hpp"
#include "emg/ingest/synth.hpp"
#include "emg/model/bundle.hpp"

namespace emgctl {

namespace {

std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--drop", "expected FIRST:LAST, got " + text);
  return {std::stoull(text.substr(0, colon)), std::stoull(text.substr(colon + 1))};
}

}  // namespace

void register_io(CLI::App& app) {
  // cues
  auto* cues = app.add_subcommand("cues", "Build a seeded cue schedule");
  static struct {
    std::uint64_t seed = 0;
    std::string preset = "initial", out = "-";
    std::size_t reps = 0, series = 0;
    double series_rest = -1.0;
  } c;
  cues->add_option("--seed", c.seed, "Shuffle seed")->required();
  cues->add_option("--preset", c.preset, "initial (100 cues) or recalibration (50 cues)")
      ->check(CLI::IsMember({"initial", "recalibration"}));
  cues->add_option("--out", c.out, "Output JSON ('-' for stdout)");
  cues->add_option("--reps", c.reps, "Custom schedule: repetitions of each gesture per series");
  cues->add_option("--series", c.series, "Custom schedule: number of series");
  cues->add_option("--series-rest", c.series_rest, "Custom schedule: rest between series, seconds");
  cues->callback([] {
    const auto preset = c.preset == "initial" ? emg::ingest::CuePreset::Initial : emg::ingest::CuePreset::Recalibration;
    auto schedule = emg::ingest::build_cue_schedule(c.seed, preset);
    if (c.reps > 0 || c.series > 0 || c.series_rest >= 0.0) {
      schedule = emg::ingest::build_cue_schedule(c.seed, c.reps > 0 ? c.reps : schedule.reps_per_series,
                                                 c.series > 0 ? c.series : schedule.series, schedule.timing,
                                                 c.series_rest >= 0.0 ? c.series_rest : schedule.series_rest_s);
    }
    emit(c.out, emg::ingest::cue_schedule_to_json(schedule));
  });

  // synth
  auto* synth = app.add_subcommand("synth", "Render a synthetic recording of a cue schedule");
  static struct {
    std::string config, cues, out, dump_config;
    std::uint64_t seed = 1;
    double drift_mean = 0.0, drift_sd = 0.0;
    std::uint64_t drift_seed = 0;
  } s;
  synth->add_option("--config", s.config, "Synthesizer config JSON (default: built-in, see --dump-config)")
      ->check(CLI::ExistingFile);
  synth->add_option("--seed", s.seed, "Seed of the built-in config");
  synth->add_option("--cues", s.cues, "Cue schedule JSON")->check(CLI::ExistingFile);
  synth->add_option("--out", s.out, "Output recording; the schedule is copied next to it as <out>.cues.json");
  synth->add_option("--drift-mean", s.drift_mean, "Per-electrode gain drift, mean fraction");
  synth->add_option("--drift-sd", s.drift_sd, "Per-electrode gain drift, standard deviation");
  synth->add_option("--drift-seed", s.drift_seed, "Seed of the drift draw");
  synth->add_option("--dump-config", s.dump_config, "Write the effective config JSON here and exit");
  synth->callback([] {
    auto config = s.config.empty() ? emg::ingest::default_synth_config(s.seed)
                                   : emg::ingest::read_synth_config(s.config);
    if (s.drift_mean != 0.0 || s.drift_sd != 0.0) {
      config = emg::ingest::with_gain_drift(std::move(config), s.drift_mean, s.drift_sd, s.drift_seed);
    }
    if (!s.dump_config.empty()) {
      emit(s.dump_config, emg::ingest::synth_config_to_json(config));
      return;
    }
    if (s.cues.empty() || s.out.empty()) throw CLI::RequiredError("synth needs --cues and --out");
    const auto schedule = emg::ingest::read_cue_schedule(s.cues);
    emg::ingest::SynthSource source(config, schedule);
    emg::ingest::RecordingWriter writer(s.out, source.sample_rate(), static_cast<std::uint16_t>(source.channels()),
                                        *source.total_samples());
    emg::SampleBlock block;
    while (source.next(block, 4000)) writer.write(block);
    writer.finish(source.impedances());
    emg::ingest::write_cue_schedule(schedule, emg::ingest::cue_sidecar_path(s.out));
    std::cerr << "wrote " << *source.total_samples() << " samples x " << source.channels() << " channels to "
              << s.out << '\n';
  });

  // replay
  auto* replay = app.add_subcommand("replay", "Serve a recording over the TCP frame stream");
  static struct {
    std::string rec, listen = ":" + std::to_string(emg::ingest::kDefaultStreamPort);
    double speed = 1.0;
    std::size_t block = 100;
    bool once = false;
    std::vector<std::string> drop;
  } r;
  replay->add_option("--rec", r.rec, "Recording file")->required()->check(CLI::ExistingFile);
  replay->add_option("--listen", r.listen, "host:port to listen on");
  replay->add_option("--speed", r.speed, "Wall-clock multiplier, 0 for as fast as possible")
      ->check(CLI::NonNegativeNumber);
  replay->add_option("--block", r.block, "Samples per DATA frame")->check(CLI::PositiveNumber);
  replay->add_option("--drop", r.drop, "Never send samples FIRST:LAST (repeatable)");
  replay->add_flag("--once", r.once, "Exit after one client");
  replay->callback([] {
    emg::ingest::ReplayOptions options;
    options.speed = r.speed;
    options.block_samples = r.block;
    for (const auto& d : r.drop) options.drop.push_back(parse_range(d));
    const std::string path = r.rec;
    emg::ingest::ReplayServer server([path] { return std::make_unique<emg::ingest::RecordingFileSource>(path); },
                                     emg::net::Endpoint::parse(r.listen), options);
    std::cerr << "replaying " << path << " on port " << server.port() << '\n';
    install_signal_handlers();
    while (!g_stop) {
      const bool served = server.serve_one(std::chrono::milliseconds(200));
      if (served && r.once) break;
    }
  });

  // decode
  auto* decode = app.add_subcommand("decode", "Run the decoder over a source and write one JSON line per tick");
  static struct {
    std::string bundle, source, out = "-";
    double period = 0.0;
  } d;
  decode->add_option("--bundle", d.bundle, "Model bundle")->required()->check(CLI::ExistingFile);
  decode->add_option("--source", d.source, "recording:<path>, synth:<seed>[:preset] or tcp:host:port")->required();
  decode->add_option("--out", d.out, "Output JSONL ('-' for stdout)");
  decode->add_option("--period", d.period, "Tick period in samples (default: sample rate / 6)")
      ->check(CLI::NonNegativeNumber);
  decode->callback([] {
    auto bundle = std::make_shared<const emg::model::ModelBundle>(emg::model::load_bundle(d.bundle));
    auto opened = emg::ingest::open_source(emg::ingest::SourceSpec::parse(d.source));
    emg::decode::Decoder decoder(bundle);
    const double period = d.period > 0.0 ? d.period : opened.source->sample_rate() / decoder.config().tick_rate_hz;
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (d.out != "-") {
      file.open(d.out);
      if (!file) throw emg::Error("cannot write " + d.out);
      out = &file;
    }
    install_signal_handlers();
    emg::decode::StreamDecoder runner(decoder, period);
    const auto ticks = runner.run(*opened.source, [&](const emg::decode::DecodeTick& tick, std::uint64_t end) {
      *out << emg::decode::tick_to_json(tick, end) << '\n';
      return !g_stop.load();
    });
    out->flush();
    std::cerr << ticks << " ticks, " << runner.skipped_ticks() << " skipped, " << runner.gap_count() << " gaps\n";
  });
}

}  // namespace emgctl
