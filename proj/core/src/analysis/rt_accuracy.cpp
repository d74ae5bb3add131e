#include "emg/analysis/rt_accuracy.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "emg/decode/stream_decoder.hpp"
#include "emg/error.hpp"

namespace emg::analysis {

RtAccuracyReport score_predictions(const ingest::CueSchedule& schedule, double sample_rate_hz,
                                   const std::vector<TimedPrediction>& predictions, std::size_t min_predictions) {
  std::vector<TimedPrediction> sorted = predictions;
  std::sort(sorted.begin(), sorted.end(),
            [](const TimedPrediction& a, const TimedPrediction& b) { return a.window_end < b.window_end; });

  RtAccuracyReport report;
  std::size_t min_seen = SIZE_MAX;
  std::vector<double> acc;
  for (const auto& cue : schedule.entries) {
    if (cue.discarded) continue;
    const auto lo = static_cast<std::uint64_t>(std::llround(schedule.hold_start(cue) * sample_rate_hz));
    const auto hi = static_cast<std::uint64_t>(std::llround(schedule.hold_end(cue) * sample_rate_hz));
    auto it = std::upper_bound(sorted.begin(), sorted.end(), lo,
                               [](std::uint64_t v, const TimedPrediction& p) { return v < p.window_end; });
    CueAccuracy c;
    c.cue_index = cue.index;
    c.gesture = cue.gesture;
    for (; it != sorted.end() && it->window_end <= hi; ++it) {
      ++c.predictions;
      if (it->predicted == cue.gesture) ++c.correct;
    }
    c.accuracy = c.predictions ? static_cast<double>(c.correct) / static_cast<double>(c.predictions) : 0.0;
    c.flagged = c.predictions < min_predictions;
    report.flagged += c.flagged ? 1 : 0;
    min_seen = std::min(min_seen, c.predictions);
    acc.push_back(c.accuracy);
    report.cues.push_back(c);
  }
  if (acc.empty()) throw DataError("schedule has no scorable cues");
  const Summary s = summarize(acc);
  report.mean = s.mean;
  report.median = s.median;
  report.min_predictions_per_hold = min_seen;
  if (acc.size() >= 2) {
    std::vector<double> x(acc.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i + 1);
    report.trend = least_squares(x, acc);
  }
  return report;
}

RtAccuracyReport realtime_accuracy(const model::ModelBundle& bundle, ingest::BlockSource& source,
                                   const ingest::CueSchedule& schedule, const RtHarnessOptions& options) {
  decode::DecoderConfig cfg;
  cfg.tick_rate_hz = source.sample_rate() / options.tick_period_samples;
  // The decoder only borrows the bundle here.
  decode::Decoder decoder(std::shared_ptr<const model::ModelBundle>(&bundle, [](const model::ModelBundle*) {}), cfg);
  decode::StreamDecoder runner(decoder, options.tick_period_samples);
  std::vector<TimedPrediction> preds;
  runner.run(source, [&](const decode::DecodeTick& t, std::uint64_t end) {
    preds.push_back({end, t.predicted});
    return true;
  });
  RtAccuracyReport r = score_predictions(schedule, source.sample_rate(), preds, options.min_predictions);
  r.tick_period_samples = options.tick_period_samples;
  return r;
}

}  // namespace emg::analysis
