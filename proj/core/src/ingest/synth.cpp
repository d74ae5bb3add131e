#include "emg/ingest/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emg/dsp/filter_bank.hpp"
#include "emg/error.hpp"

namespace emg::ingest {

using nlohmann::json;

namespace {

constexpr std::uint64_t kEffortSalt = 0x45464652ull;
constexpr std::uint64_t kChannelSalt = 0x4348414eull;
constexpr std::uint64_t kImpedanceSalt = 0x494d5044ull;

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t salt, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

double impulse_energy(const dsp::FilterSpec& a, const dsp::FilterSpec& b, std::size_t length) {
  std::vector<double> impulse(length, 0.0);
  impulse[0] = 1.0;
  const auto h = dsp::filter_signal(b, dsp::filter_signal(a, impulse));
  double e = 0.0;
  for (double v : h) e += v * v;
  return e;
}

inline double biquad_tick(const dsp::Biquad& s, double* z, double x) {
  const double y = s.b0 * x + z[0];
  z[0] = s.b1 * x - s.a1 * y + z[1];
  z[1] = s.b2 * x - s.a2 * y;
  return y;
}

}  // namespace

std::array<BlobSpec, kGestureCount> default_blob_layout() {
  return {{
      {3.5, 3.5, 1.0},  // Rest: unused, floor only
      {2.0, 2.0, 5.7},  // Fingers Closed (MVC reference)
      {2.0, 5.0, 5.7},
      {5.0, 1.5, 5.7},
      {5.0, 5.5, 5.7},
      {0.5, 3.5, 5.7},
      {6.5, 3.5, 5.7},
      {3.5, 0.5, 5.7},
      {3.5, 6.5, 5.7},
      {4.0, 3.5, 5.7},
  }};
}

double default_blob_sigma_cells() { return 1.6; }

double default_coactivation() { return 0.6; }

std::vector<double> blob_template(const dsp::ElectrodeArray& grid, double noise_floor_v, const BlobSpec& blob,
                                  double sigma_cells, double coactivation) {
  const std::size_t n = grid.channel_count();
  std::vector<double> bump(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto [r, col] = grid.grid_position(c);
    const double dr = static_cast<double>(r) - blob.row;
    const double dc = static_cast<double>(col) - blob.col;
    bump[c] = coactivation + (1.0 - coactivation) * std::exp(-(dr * dr + dc * dc) / (2.0 * sigma_cells * sigma_cells));
  }
  // mean((1 + p b)^2) = ratio^2  ->  B2 p^2 + 2 B1 p + 1 - ratio^2 = 0
  double b1 = 0.0, b2 = 0.0;
  for (double b : bump) {
    b1 += b;
    b2 += b * b;
  }
  b1 /= static_cast<double>(n);
  b2 /= static_cast<double>(n);
  const double target = blob.ratio * blob.ratio;
  double p = 0.0;
  if (target > 1.0 && b2 > 0.0) p = (-b1 + std::sqrt(b1 * b1 - b2 * (1.0 - target))) / b2;
  std::vector<double> out(n);
  for (std::size_t c = 0; c < n; ++c) out[c] = noise_floor_v * (1.0 + p * bump[c]);
  return out;
}

SynthConfig default_synth_config(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = seed;
  const auto layout = default_blob_layout();
  const std::size_t n = cfg.grid.channel_count();
  cfg.templates[index_of(Gesture::Rest)] = std::vector<double>(n, cfg.noise_floor_v);
  for (std::size_t g = 1; g < kGestureCount; ++g) {
    cfg.templates[g] = blob_template(cfg.grid, cfg.noise_floor_v, layout[g], default_blob_sigma_cells(), default_coactivation());
  }
  auto rng = seeded(seed, kImpedanceSalt);
  std::normal_distribution<double> z(303e3, 90.5e3);
  cfg.impedances_ohm.resize(n);
  for (auto& v : cfg.impedances_ohm) v = std::max(50e3, z(rng));
  return cfg;
}

SynthConfig with_gain_drift(SynthConfig config, double mean_fraction, double sd_fraction, std::uint64_t seed) {
  const std::size_t n = config.grid.channel_count();
  if (config.channel_gain.empty()) config.channel_gain.assign(n, 1.0);
  auto rng = seeded(seed, kImpedanceSalt ^ 0xD1F7ull);
  std::normal_distribution<double> change(mean_fraction, sd_fraction);
  for (std::size_t c = 0; c < n; ++c) {
    const double factor = std::max(0.05, 1.0 + change(rng));
    config.channel_gain[c] *= factor;
    if (c < config.impedances_ohm.size()) config.impedances_ohm[c] *= factor;
  }
  return config;
}

std::string synth_config_to_json(const SynthConfig& c) {
  json templates = json::array();
  for (const auto& t : c.templates) templates.push_back(t);
  json doc = {{"format", "emg-synth"},
              {"version", 1},
              {"grid", {{"rows", c.grid.rows}, {"cols", c.grid.cols}}},
              {"sample_rate_hz", c.sample_rate_hz},
              {"noise_floor_v", c.noise_floor_v},
              {"carrier_band_hz", {c.carrier_low_hz, c.carrier_high_hz}},
              {"templates", std::move(templates)},
              {"powerline_v", c.powerline_v},
              {"motion_v", c.motion_v},
              {"motion_max_hz", c.motion_max_hz},
              {"effort_sd", c.effort_sd},
              {"channel_gain", c.channel_gain},
              {"impedances_ohm", c.impedances_ohm},
              {"seed", c.seed}};
  return doc.dump(2);
}

SynthConfig synth_config_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.value("format", "") != "emg-synth") throw DecodeError("not a synth config");
    // Missing fields fall back to the default config for the given seed.
    SynthConfig c = default_synth_config(doc.value("seed", std::uint64_t{1}));
    if (doc.contains("grid")) {
      c.grid.rows = doc["grid"].at("rows").get<std::size_t>();
      c.grid.cols = doc["grid"].at("cols").get<std::size_t>();
    }
    c.sample_rate_hz = doc.value("sample_rate_hz", c.sample_rate_hz);
    c.noise_floor_v = doc.value("noise_floor_v", c.noise_floor_v);
    if (doc.contains("carrier_band_hz")) {
      c.carrier_low_hz = doc["carrier_band_hz"].at(0).get<double>();
      c.carrier_high_hz = doc["carrier_band_hz"].at(1).get<double>();
    }
    if (doc.contains("templates")) {
      const auto& t = doc["templates"];
      if (t.size() != kGestureCount) throw DecodeError("synth config needs exactly 10 templates");
      for (std::size_t g = 0; g < kGestureCount; ++g) c.templates[g] = t[g].get<std::vector<double>>();
    }
    c.powerline_v = doc.value("powerline_v", c.powerline_v);
    c.motion_v = doc.value("motion_v", c.motion_v);
    c.motion_max_hz = doc.value("motion_max_hz", c.motion_max_hz);
    c.effort_sd = doc.value("effort_sd", c.effort_sd);
    if (doc.contains("channel_gain")) c.channel_gain = doc["channel_gain"].get<std::vector<double>>();
    if (doc.contains("impedances_ohm")) c.impedances_ohm = doc["impedances_ohm"].get<std::vector<double>>();
    return c;
  } catch (const json::exception& e) {
    throw DecodeError(std::string("synth config: ") + e.what());
  }
}

SynthConfig read_synth_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("synth config not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return synth_config_from_json(ss.str());
}

SynthSource::SynthSource(SynthConfig config, CueSchedule schedule)
    : config_(std::move(config)),
      schedule_(std::move(schedule)),
      total_(static_cast<std::uint64_t>(std::llround(schedule_.total_duration() * config_.sample_rate_hz))),
      band_hp_(dsp::design_highpass(2, config_.carrier_low_hz, config_.sample_rate_hz)),
      band_lp_(dsp::design_lowpass(2, config_.carrier_high_hz, config_.sample_rate_hz)) {
  const std::size_t n = config_.grid.channel_count();
  for (const auto& t : config_.templates) {
    if (t.size() != n) throw ParameterError("synth template width does not match electrode grid");
  }
  if (!config_.channel_gain.empty() && config_.channel_gain.size() != n) {
    throw ParameterError("channel_gain width does not match electrode grid");
  }
  if (!config_.impedances_ohm.empty() && config_.impedances_ohm.size() != n) {
    throw ParameterError("impedance count does not match electrode grid");
  }
  carrier_scale_ = 1.0 / std::sqrt(impulse_energy(band_hp_, band_lp_, static_cast<std::size_t>(4 * config_.sample_rate_hz)));

  auto effort_rng = seeded(config_.seed, kEffortSalt);
  std::normal_distribution<double> effort(1.0, config_.effort_sd);
  efforts_.reserve(schedule_.entries.size());
  for (std::size_t i = 0; i < schedule_.entries.size(); ++i) efforts_.push_back(std::max(0.2, effort(effort_rng)));

  const double rate = config_.sample_rate_hz;
  channels_.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    auto& ch = channels_[c];
    ch.rng = seeded(config_.seed, kChannelSalt, c);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> freq(1.0, config_.motion_max_hz);
    for (auto& p : ch.powerline_phase) p = phase(ch.rng);
    const double f = freq(ch.rng);
    const double p0 = phase(ch.rng);
    ch.motion_cos = std::cos(p0);
    ch.motion_sin = std::sin(p0);
    ch.motion_step_cos = std::cos(2.0 * std::numbers::pi * f / rate);
    ch.motion_step_sin = std::sin(2.0 * std::numbers::pi * f / rate);
  }
}

std::optional<std::vector<double>> SynthSource::impedances() const {
  if (config_.impedances_ohm.empty()) return std::nullopt;
  return config_.impedances_ohm;
}

bool SynthSource::next(SampleBlock& block, std::size_t max_samples) {
  if (cursor_ >= total_ || max_samples == 0) return false;
  const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(max_samples, total_ - cursor_));
  const std::size_t n_ch = channels_.size();
  block.resize(n_ch, count);
  block.first_sample = cursor_;

  const double rate = config_.sample_rate_hz;
  const auto& timing = schedule_.timing;
  envelope_gesture_.assign(count, index_of(Gesture::Rest));
  envelope_weight_.assign(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(cursor_ + i) / rate;
    const CueEntry* cue = schedule_.cue_at(t);
    if (cue == nullptr) continue;
    const double effort = efforts_[cue->index];
    const double local = t - cue->start_s;
    double w = 0.0;
    if (local < timing.rest_s) {
      w = 0.0;
    } else if (local < timing.rest_s + timing.transition_s) {
      w = (local - timing.rest_s) / timing.transition_s;
    } else if (local < timing.rest_s + timing.transition_s + timing.hold_s) {
      w = 1.0;
    } else {
      w = 1.0 - (local - timing.rest_s - timing.transition_s - timing.hold_s) / timing.return_s;
    }
    envelope_gesture_[i] = index_of(cue->gesture);
    envelope_weight_[i] = std::clamp(w, 0.0, 1.0) * effort;
  }

  // sin/cos of the three powerline tones, shared by every channel
  const double two_pi = 2.0 * std::numbers::pi;
  std::array<std::vector<double>, 3> tone_sin, tone_cos;
  for (std::size_t h = 0; h < 3; ++h) {
    tone_sin[h].resize(count);
    tone_cos[h].resize(count);
    const double f = 60.0 * static_cast<double>(h + 1);
    for (std::size_t i = 0; i < count; ++i) {
      const double t = static_cast<double>(cursor_ + i) / rate;
      tone_sin[h][i] = std::sin(two_pi * f * t);
      tone_cos[h][i] = std::cos(two_pi * f * t);
    }
  }
  constexpr std::array<double, 3> kHarmonicWeight = {1.0, 0.5, 0.25};

  const auto& rest = config_.templates[index_of(Gesture::Rest)];
  const auto& hp = band_hp_.sections.front();
  const auto& lp = band_lp_.sections.front();
  for (std::size_t c = 0; c < n_ch; ++c) {
    auto& ch = channels_[c];
    const double gain = config_.channel_gain.empty() ? 1.0 : config_.channel_gain[c];
    std::array<double, 3> pl_cos{}, pl_sin{};
    for (std::size_t h = 0; h < 3; ++h) {
      pl_cos[h] = config_.powerline_v * kHarmonicWeight[h] * std::cos(ch.powerline_phase[h]);
      pl_sin[h] = config_.powerline_v * kHarmonicWeight[h] * std::sin(ch.powerline_phase[h]);
    }
    float* out = block.channel(c).data();
    for (std::size_t i = 0; i < count; ++i) {
      double x = ch.normal(ch.rng);
      x = biquad_tick(hp, ch.band_state.data(), x);
      x = biquad_tick(lp, ch.band_state.data() + 2, x);
      const std::size_t g = envelope_gesture_[i];
      const double env = rest[c] + envelope_weight_[i] * (config_.templates[g][c] - rest[c]);
      double v = gain * env * carrier_scale_ * x;

      for (std::size_t h = 0; h < 3; ++h) v += tone_sin[h][i] * pl_cos[h] + tone_cos[h][i] * pl_sin[h];
      v += config_.motion_v * ch.motion_sin;
      const double mc = ch.motion_cos * ch.motion_step_cos - ch.motion_sin * ch.motion_step_sin;
      const double ms = ch.motion_sin * ch.motion_step_cos + ch.motion_cos * ch.motion_step_sin;
      ch.motion_cos = mc;
      ch.motion_sin = ms;
      out[i] = static_cast<float>(v);
    }
  }
  cursor_ += count;
  return true;
}

std::unique_ptr<BlockSource> make_synth_source(const SynthConfig& config, const CueSchedule& schedule) {
  return std::make_unique<SynthSource>(config, schedule);
}

}  // namespace emg::ingest
