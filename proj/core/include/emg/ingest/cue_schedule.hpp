#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emg/gesture.hpp"

namespace emg::ingest {

/// Phase durations of one cue, seconds: rest, transition, hold (of which the
/// final `label_s` is labeled), return.
struct CueTiming {
  double rest_s = 0.5;
  double transition_s = 1.0;
  double hold_s = 3.0;
  double label_s = 2.0;
  double return_s = 1.0;

  double cue_duration() const { return rest_s + transition_s + hold_s + return_s; }
  friend bool operator==(const CueTiming&, const CueTiming&) = default;
};

struct CueEntry {
  std::size_t index = 0;
  std::size_t series = 0;
  Gesture gesture = Gesture::Rest;
  double start_s = 0.0;
  bool discarded = false;

  friend bool operator==(const CueEntry&, const CueEntry&) = default;
};

class CueSchedule {
 public:
  CueTiming timing;
  std::vector<CueEntry> entries;
  std::uint64_t seed = 0;
  std::size_t series = 0;
  std::size_t reps_per_series = 0;
  double series_rest_s = 60.0;
  double start_epoch = 0.0;

  double transition_start(const CueEntry& e) const { return e.start_s + timing.rest_s; }
  double hold_start(const CueEntry& e) const { return transition_start(e) + timing.transition_s; }
  double hold_end(const CueEntry& e) const { return hold_start(e) + timing.hold_s; }
  double label_start(const CueEntry& e) const { return hold_end(e) - timing.label_s; }
  double cue_end(const CueEntry& e) const { return hold_end(e) + timing.return_s; }
  double total_duration() const;
  /// Cue whose [start, end) contains t, or nullptr (inter-series rest, past end).
  const CueEntry* cue_at(double t_s) const;

  friend bool operator==(const CueSchedule&, const CueSchedule&) = default;
};

enum class CuePreset { Initial, Recalibration };

/// `series` blocks, each a seeded shuffle holding every gesture
/// `reps_per_series` times; a rest of `series_rest_s` separates series.
CueSchedule build_cue_schedule(std::uint64_t seed, std::size_t reps_per_series = 5, std::size_t series = 2,
                               CueTiming timing = {}, double series_rest_s = 60.0);
CueSchedule build_cue_schedule(std::uint64_t seed, CuePreset preset);

std::string cue_schedule_to_json(const CueSchedule& schedule);
CueSchedule cue_schedule_from_json(const std::string& text);
void write_cue_schedule(const CueSchedule& schedule, const std::filesystem::path& path);
CueSchedule read_cue_schedule(const std::filesystem::path& path);

}  // namespace emg::ingest
