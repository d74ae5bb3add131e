#pragma once

#include <cstdint>
#include <filesystem>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emg/decode/decoder.hpp"
#include "emg/dsp/feature_pipeline.hpp"
#include "emg/gateway/events.hpp"
#include "emg/gateway/robot_link.hpp"
#include "emg/ingest/cue_schedule.hpp"
#include "emg/ingest/recording.hpp"
#include "emg/model/bundle.hpp"
#include "emg/model/calibration.hpp"
#include "emg/robot/command.hpp"
#include "emg/sample_block.hpp"

namespace emg::gateway {

enum class Phase { Idle, Calibrating, Training, Decoding };
std::string_view phase_name(Phase p);

struct SessionOptions {
  double tick_rate_hz = 6.0;
  decode::DecoderConfig decoder;
  robot::RobotConfig robot = robot::default_robot_config();
  model::CalibrationOptions calibration;
  std::filesystem::path work_dir = std::filesystem::temp_directory_path();
};

struct SourceInfo {
  std::string descriptor;
  double sample_rate_hz = 0.0;
  std::size_t channels = 0;
  std::optional<std::vector<double>> impedances_ohm;
};

/// Session state machine. Commands and ticks are applied by a single
/// caller; the returned events are to be broadcast in order.
///
/// Commands (one JSON object per line, field "cmd"):
///   load_bundle {path}, start_session, start_cues {preset?, seed?},
///   inject_gesture {gesture}, set_source {source}, stop
class Session {
 public:
  Session(SessionOptions options, std::unique_ptr<RobotLink> robot);
  ~Session();

  std::vector<Event> handle_command(std::string_view line);
  /// One gateway tick.
  std::vector<Event> tick();
  /// Samples from the active source, in order.
  void feed(const SampleBlock& block);

  /// The driver reports which source is attached (or none).
  std::vector<Event> attach_source(std::optional<SourceInfo> info);
  /// A set_source request the driver has not acted on yet.
  std::optional<std::string> take_source_request();

  Phase phase() const { return phase_; }
  std::uint64_t tick_index() const { return tick_; }
  std::uint64_t prediction_count() const { return pred_seq_; }
  const model::ModelBundle* bundle() const { return bundle_.get(); }
  const decode::Decoder& decoder() const { return decoder_; }
  std::optional<robot::RobotState> robot_state() const { return last_robot_; }
  void set_client_count(std::size_t n) { clients_ = n; }

  /// Snapshot served by GET /state.
  std::string state_json() const;
  /// Error event raised by the driver (e.g. a source failed to open).
  Event report_error(const std::string& message) { return error(message); }
  /// Event carrying the current session snapshot.
  Event session_event();

  /// Installs a bundle directly (tests, --bundle at startup).
  void set_bundle(std::shared_ptr<const model::ModelBundle> bundle);

 private:
  Event make(EventType type, std::string payload);
  Event error(const std::string& message, std::string_view command = {});
  std::vector<Event> decode_tick();
  std::vector<Event> calibration_tick();
  std::vector<Event> training_tick();
  void finish_recording();

  SessionOptions options_;
  std::unique_ptr<RobotLink> robot_;
  Phase phase_ = Phase::Idle;
  std::uint64_t seq_ = 0;
  std::uint64_t tick_ = 0;
  std::uint64_t pred_seq_ = 0;
  std::size_t clients_ = 0;

  std::shared_ptr<const model::ModelBundle> bundle_;
  decode::Decoder decoder_;
  robot::CommandGenerator generator_;
  std::unique_ptr<dsp::StreamingFeatureExtractor> extractor_;
  std::optional<robot::RobotState> last_robot_;
  std::uint64_t last_window_end_ = 0;

  std::optional<SourceInfo> source_;
  std::optional<std::string> source_request_;

  // calibration capture
  std::optional<ingest::CueSchedule> cues_;
  std::uint64_t calib_ticks_ = 0;
  std::optional<std::pair<std::size_t, int>> last_cue_phase_;
  std::unique_ptr<ingest::RecordingWriter> writer_;
  std::filesystem::path capture_path_;
  std::uint64_t capture_needed_ = 0;
  std::uint64_t capture_written_ = 0;
  std::optional<std::uint64_t> capture_origin_;
  std::future<model::ModelBundle> training_;
};

}  // namespace emg::gateway
