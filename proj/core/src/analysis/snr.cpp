#include "emg/analysis/snr.hpp"

#include <cmath>

#include "emg/dsp/filter_bank.hpp"
#include "emg/error.hpp"
#include "emg/sample_block.hpp"

namespace emg::analysis {

double snr(const Eigen::MatrixXd& mvc, const Eigen::MatrixXd& rest) {
  if (mvc.cols() != rest.cols()) throw ParameterError("MVC and rest windows have different channel counts");
  const double r2 = rest.squaredNorm();
  if (!(r2 > 0.0) || !std::isfinite(r2)) throw DataError("degenerate rest signal");
  return std::sqrt(mvc.squaredNorm() / r2);
}

SessionSnr session_snr(ingest::BlockSource& source, const ingest::CueSchedule& schedule,
                       const dsp::ChannelMask& mask, const dsp::FilterSpec& filter, Gesture mvc) {
  if (mask.channel_count() != source.channels()) throw DataError("channel mask does not match the source");
  const double rate = source.sample_rate();
  struct Span {
    std::uint64_t begin, end;
    bool is_mvc;
  };
  std::vector<Span> spans;
  for (const auto& cue : schedule.entries) {
    if (cue.discarded || (cue.gesture != mvc && cue.gesture != Gesture::Rest)) continue;
    const auto end = static_cast<std::uint64_t>(std::llround(schedule.hold_end(cue) * rate));
    const auto begin = static_cast<std::uint64_t>(std::llround(schedule.label_start(cue) * rate));
    spans.push_back({begin, end, cue.gesture == mvc});
  }

  const auto channels = mask.accepted_indices();
  dsp::FilterBank bank(filter, channels.size());
  double e_mvc = 0.0, e_rest = 0.0;
  std::uint64_t n_mvc = 0, n_rest = 0;
  std::size_t next_span = 0;
  std::vector<double> buf;
  SampleBlock block;
  while (next_span < spans.size() && source.next(block, 4096)) {
    const std::uint64_t b0 = block.first_sample;
    const std::uint64_t b1 = block.end_sample();
    for (std::size_t m = 0; m < channels.size(); ++m) {
      const auto src = block.channel(channels[m]);
      buf.assign(src.begin(), src.end());
      bank.process_channel(m, buf);
      for (std::size_t s = next_span; s < spans.size() && spans[s].begin < b1; ++s) {
        const std::uint64_t lo = std::max(spans[s].begin, b0);
        const std::uint64_t hi = std::min(spans[s].end, b1);
        double acc = 0.0;
        for (std::uint64_t t = lo; t < hi; ++t) acc += buf[t - b0] * buf[t - b0];
        if (spans[s].is_mvc) {
          e_mvc += acc;
          if (hi > lo) n_mvc += hi - lo;
        } else {
          e_rest += acc;
          if (hi > lo) n_rest += hi - lo;
        }
      }
    }
    while (next_span < spans.size() && spans[next_span].end <= b1) ++next_span;
  }
  if (next_span < spans.size()) throw DataError("recording shorter than cue schedule");

  SessionSnr out;
  for (const auto& s : spans) (s.is_mvc ? out.mvc_cues : out.rest_cues)++;
  if (n_mvc == 0) throw DataError("no " + std::string(gesture_name(mvc)) + " cues in the schedule");
  if (n_rest == 0 || !(e_rest > 0.0)) throw DataError("degenerate rest signal");
  out.mvc_rms = std::sqrt(e_mvc / static_cast<double>(n_mvc));
  out.rest_rms = std::sqrt(e_rest / static_cast<double>(n_rest));
  out.snr = out.mvc_rms / out.rest_rms;
  return out;
}

}  // namespace emg::analysis
