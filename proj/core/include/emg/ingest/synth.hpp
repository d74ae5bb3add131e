#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "emg/dsp/butterworth.hpp"
#include "emg/dsp/electrode.hpp"
#include "emg/gesture.hpp"
#include "emg/ingest/block_source.hpp"
#include "emg/ingest/cue_schedule.hpp"

namespace emg::ingest {

/// Parameters of the synthetic surface-EMG generator.
///
/// Each channel carries band-limited Gaussian noise whose RMS envelope is
/// the channel's entry in the active gesture template (volts). Rest uses the
/// noise floor everywhere. Powerline (60 Hz plus two harmonics) and slow
/// motion artifacts are added on top and are not affected by channel gain.
struct SynthConfig {
  dsp::ElectrodeArray grid;
  double sample_rate_hz = 4000.0;
  double noise_floor_v = 10e-6;
  double carrier_low_hz = 20.0;
  double carrier_high_hz = 450.0;
  std::array<std::vector<double>, kGestureCount> templates;
  double powerline_v = 1.0e-6;
  double motion_v = 1.0e-6;
  double motion_max_hz = 15.0;
  double effort_sd = 0.08;
  std::vector<double> channel_gain;     // empty means unity
  std::vector<double> impedances_ohm;   // empty means none recorded
  std::uint64_t seed = 1;
};

/// Geometry of the default templates: every non-Rest gesture mixes a
/// uniform co-activation of all electrodes with one Gaussian blob on the
/// grid, scaled so the template's quadratic mean over channels equals
/// `ratio` times the noise floor.
struct BlobSpec {
  double row = 0.0;
  double col = 0.0;
  double ratio = 5.7;
};

std::array<BlobSpec, kGestureCount> default_blob_layout();
double default_blob_sigma_cells();
/// Share of the activation spread uniformly over the grid.
double default_coactivation();

/// floor * (1 + p * (u + (1 - u) exp(-d^2 / 2 sigma^2))), p solved for the
/// ratio, u the co-activation share.
std::vector<double> blob_template(const dsp::ElectrodeArray& grid, double noise_floor_v, const BlobSpec& blob,
                                  double sigma_cells, double coactivation = 0.0);

SynthConfig default_synth_config(std::uint64_t seed = 1);

/// Multiplies each channel's gain (and impedance, when present) by
/// max(0.05, 1 + N(mean_fraction, sd_fraction)).
SynthConfig with_gain_drift(SynthConfig config, double mean_fraction, double sd_fraction, std::uint64_t seed);

std::string synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const std::string& text);
SynthConfig read_synth_config(const std::filesystem::path& path);

/// Deterministic synthetic recording of a cue schedule, generated lazily.
/// Output is independent of how callers split it into blocks.
class SynthSource : public BlockSource {
 public:
  SynthSource(SynthConfig config, CueSchedule schedule);

  double sample_rate() const override { return config_.sample_rate_hz; }
  std::size_t channels() const override { return config_.grid.channel_count(); }
  std::optional<std::uint64_t> total_samples() const override { return total_; }
  std::optional<std::vector<double>> impedances() const override;
  bool next(SampleBlock& block, std::size_t max_samples) override;

  const CueSchedule& schedule() const { return schedule_; }
  /// Effort multiplier drawn for each cue.
  const std::vector<double>& efforts() const { return efforts_; }

 private:
  struct Channel {
    std::mt19937_64 rng;
    std::normal_distribution<double> normal{0.0, 1.0};
    std::array<double, 4> band_state{};
    double motion_cos = 1.0, motion_sin = 0.0;
    double motion_step_cos = 1.0, motion_step_sin = 0.0;
    std::array<double, 3> powerline_phase{};
  };

  SynthConfig config_;
  CueSchedule schedule_;
  std::uint64_t total_;
  std::uint64_t cursor_ = 0;
  dsp::FilterSpec band_hp_;
  dsp::FilterSpec band_lp_;
  double carrier_scale_ = 1.0;
  std::vector<double> efforts_;
  std::vector<Channel> channels_;
  std::vector<std::size_t> envelope_gesture_;
  std::vector<double> envelope_weight_;
};

std::unique_ptr<BlockSource> make_synth_source(const SynthConfig& config, const CueSchedule& schedule);

}  // namespace emg::ingest
