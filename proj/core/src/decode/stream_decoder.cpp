#include "emg/decode/stream_decoder.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "emg/error.hpp"
#include "emg/sample_block.hpp"

namespace emg::decode {

std::uint64_t tick_boundary(std::uint64_t k, double period_samples) {
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(k) * period_samples));
}

StreamDecoder::StreamDecoder(Decoder& decoder, double period_samples) : decoder_(decoder), period_(period_samples) {
  if (!(period_samples >= 1.0)) throw ParameterError("tick period must be at least one sample");
  if (!decoder.has_bundle()) throw Error("decoder has no model bundle");
}

std::uint64_t StreamDecoder::run(ingest::BlockSource& source, const TickFn& on_tick) {
  const auto& pipeline = decoder_.bundle()->pipeline;
  if (pipeline.mask.channel_count() != source.channels()) {
    throw DataError("bundle channel mask does not match the source channel count");
  }
  dsp::StreamingFeatureExtractor fx(pipeline.mask, pipeline.filter, pipeline.window_samples);
  std::uint64_t k = 1;
  std::uint64_t next = tick_boundary(k, period_);
  std::uint64_t emitted = 0;
  SampleBlock block;
  while (source.next(block, 4096)) {
    std::size_t offset = 0;
    while (offset < block.count) {
      const std::uint64_t pos = block.first_sample + offset;
      // Catch up on boundaries that fell inside a gap.
      while (next <= pos) {
        if (next != fx.end_sample() || !fx.window_ready()) ++skipped_;
        next = tick_boundary(++k, period_);
      }
      const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(block.count - offset, next - pos));
      fx.push(block, offset, offset + take);
      offset += take;
      if (fx.end_sample() == next) {
        if (fx.window_ready()) {
          const DecodeTick tick = decoder_.step_rms(fx.latest_rms());
          ++emitted;
          if (!on_tick(tick, next)) {
            gaps_ = fx.gap_count();
            return emitted;
          }
        } else {
          ++skipped_;
        }
        next = tick_boundary(++k, period_);
      }
    }
  }
  gaps_ = fx.gap_count();
  return emitted;
}

std::string tick_to_json(const DecodeTick& tick, std::uint64_t window_end_sample) {
  nlohmann::json j = {
      {"tick", tick.decoded.tick_index},
      {"window_end", window_end_sample},
      {"label", gesture_name(tick.decoded.label)},
      {"label_id", index_of(tick.decoded.label)},
      {"consecutive", tick.decoded.consecutive_count},
      {"predicted", gesture_name(tick.predicted)},
      {"probabilities", std::vector<double>(tick.probabilities.data(), tick.probabilities.data() + tick.probabilities.size())},
      {"confidence", std::vector<double>(tick.confidence.data(), tick.confidence.data() + tick.confidence.size())},
      {"mode", mode_name(tick.mode)},
      {"injected", tick.injected},
  };
  if (tick.mode_event) j["mode_switch"] = {{"from", mode_name(tick.mode_event->from)}, {"to", mode_name(tick.mode_event->to)}};
  return j.dump();
}

}  // namespace emg::decode
