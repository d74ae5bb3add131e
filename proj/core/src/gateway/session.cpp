#include "emg/gateway/session.hpp"

#include <chrono>
#include <cmath>

#include <nlohmann/json.hpp>

#include "emg/error.hpp"
#include "emg/ingest/source_spec.hpp"

namespace emg::gateway {

using nlohmann::json;

namespace {

// phases of a cue as reported in cue events
enum CuePhase { kRest = 0, kTransition, kHold, kReturn };
constexpr std::array<const char*, 4> kCuePhaseNames = {"rest", "transition", "hold", "return"};

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::Idle: return "Idle";
    case Phase::Calibrating: return "Calibrating";
    case Phase::Training: return "Training";
    case Phase::Decoding: return "Decoding";
  }
  return "Idle";
}

Session::Session(SessionOptions options, std::unique_ptr<RobotLink> robot)
    : options_(std::move(options)),
      robot_(std::move(robot)),
      decoder_([&] {
        auto d = options_.decoder;
        d.tick_rate_hz = options_.tick_rate_hz;
        return d;
      }()),
      generator_(options_.robot) {
  if (!robot_) throw ParameterError("session needs a robot link");
  if (!(options_.tick_rate_hz > 0.0)) throw ParameterError("tick rate must be positive");
}

Session::~Session() {
  if (training_.valid()) training_.wait();
}

Event Session::make(EventType type, std::string payload) { return Event{type, ++seq_, tick_, std::move(payload)}; }

Event Session::error(const std::string& message, std::string_view command) {
  json p = {{"message", message}};
  if (!command.empty()) p["command"] = std::string(command);
  return make(EventType::Error, p.dump());
}

Event Session::session_event() {
  json p = {{"phase", phase_name(phase_)},
            {"bundle_id", bundle_ ? json(bundle_->id) : json(nullptr)},
            {"source", source_ ? json(source_->descriptor) : json(nullptr)},
            {"mode", mode_name(decoder_.mode())},
            {"clients", clients_}};
  return make(EventType::Session, p.dump());
}

std::string Session::state_json() const {
  json s = {{"phase", phase_name(phase_)},
            {"bundle_id", bundle_ ? json(bundle_->id) : json(nullptr)},
            {"source", source_ ? json(source_->descriptor) : json(nullptr)},
            {"tick", tick_},
            {"predictions", pred_seq_},
            {"mode", mode_name(decoder_.mode())},
            {"clients", clients_}};
  s["robot"] = last_robot_ ? json::parse(robot::robot_state_to_json(*last_robot_)) : json(nullptr);
  return s.dump();
}

void Session::set_bundle(std::shared_ptr<const model::ModelBundle> bundle) {
  bundle_ = std::move(bundle);
  decoder_.set_bundle(bundle_);
  decoder_.reset();
  extractor_.reset();
  if (bundle_ && source_ && bundle_->pipeline.mask.channel_count() == source_->channels) {
    const auto& p = bundle_->pipeline;
    extractor_ = std::make_unique<dsp::StreamingFeatureExtractor>(p.mask, p.filter, p.window_samples);
  }
}

std::optional<std::string> Session::take_source_request() {
  auto r = std::move(source_request_);
  source_request_.reset();
  return r;
}

std::vector<Event> Session::attach_source(std::optional<SourceInfo> info) {
  std::vector<Event> out;
  source_ = std::move(info);
  set_bundle(bundle_);
  if (bundle_ && source_ && !extractor_) {
    out.push_back(error("bundle expects " + std::to_string(bundle_->pipeline.mask.channel_count()) +
                        " channels but the source has " + std::to_string(source_->channels)));
  }
  out.push_back(session_event());
  return out;
}

std::vector<Event> Session::handle_command(std::string_view line) {
  std::vector<Event> out;
  json cmd;
  try {
    cmd = json::parse(line);
  } catch (const json::parse_error&) {
    out.push_back(error("malformed command"));
    return out;
  }
  if (!cmd.is_object() || !cmd.contains("cmd") || !cmd["cmd"].is_string()) {
    out.push_back(error("malformed command: missing \"cmd\""));
    return out;
  }
  const std::string name = cmd["cmd"].get<std::string>();
  auto illegal = [&](const std::string& why) { out.push_back(error(why + " (phase " + std::string(phase_name(phase_)) + ")", name)); };

  try {
    if (name == "load_bundle") {
      if (phase_ == Phase::Calibrating || phase_ == Phase::Training) {
        illegal("cannot load a bundle now");
        return out;
      }
      const std::string path = cmd.value("path", "");
      auto b = std::make_shared<model::ModelBundle>(model::load_bundle(path));
      if (source_ && b->pipeline.mask.channel_count() != source_->channels) {
        out.push_back(error("bundle expects " + std::to_string(b->pipeline.mask.channel_count()) +
                                " channels but the source has " + std::to_string(source_->channels),
                            name));
        return out;
      }
      set_bundle(std::move(b));
      out.push_back(session_event());
    } else if (name == "start_session") {
      if (phase_ != Phase::Idle) {
        illegal("start_session requires Idle");
      } else if (!bundle_) {
        out.push_back(error("no bundle loaded", name));
      } else {
        decoder_.reset();
        generator_.reset();
        set_bundle(bundle_);
        phase_ = Phase::Decoding;
        out.push_back(session_event());
      }
    } else if (name == "start_cues") {
      if (phase_ != Phase::Idle) {
        illegal("start_cues requires Idle");
        return out;
      }
      const std::string preset = cmd.value("preset", "initial");
      ingest::CuePreset p;
      if (preset == "initial") {
        p = ingest::CuePreset::Initial;
      } else if (preset == "recalibration") {
        p = ingest::CuePreset::Recalibration;
      } else {
        out.push_back(error("unknown cue preset '" + preset + "'", name));
        return out;
      }
      const auto seed = cmd.value("seed", std::uint64_t{0});
      cues_ = ingest::build_cue_schedule(seed, p);
      calib_ticks_ = 0;
      last_cue_phase_.reset();
      writer_.reset();
      capture_origin_.reset();
      capture_written_ = 0;
      if (source_) {
        capture_needed_ = static_cast<std::uint64_t>(std::llround(cues_->total_duration() * source_->sample_rate_hz));
        capture_path_ = options_.work_dir / ("capture-" + std::to_string(seed) + "-" + std::to_string(tick_) + ".emgr");
        writer_ = std::make_unique<ingest::RecordingWriter>(capture_path_, source_->sample_rate_hz,
                                                            static_cast<std::uint16_t>(source_->channels), capture_needed_);
      }
      phase_ = Phase::Calibrating;
      out.push_back(session_event());
    } else if (name == "inject_gesture") {
      if (phase_ != Phase::Decoding) {
        illegal("inject_gesture requires Decoding");
        return out;
      }
      std::optional<Gesture> g;
      const auto& v = cmd.contains("gesture") ? cmd["gesture"] : json();
      if (v.is_string()) g = gesture_from_name(v.get<std::string>());
      if (v.is_number_integer()) g = gesture_from_id(v.get<int>());
      if (!g) {
        out.push_back(error("unknown gesture " + v.dump(), name));
        return out;
      }
      decoder_.inject(*g);
    } else if (name == "set_source") {
      if (phase_ != Phase::Idle) {
        illegal("set_source requires Idle");
        return out;
      }
      const std::string text = cmd.value("source", "");
      ingest::SourceSpec::parse(text);
      source_request_ = text;
    } else if (name == "stop") {
      if (const auto active = generator_.active_joint()) {
        robot_->send({robot::stop_command(*active, decoder_.mode())});
      }
      generator_.reset();
      writer_.reset();
      cues_.reset();
      phase_ = Phase::Idle;
      out.push_back(session_event());
    } else {
      out.push_back(error("unknown command '" + name + "'", name));
    }
  } catch (const json::exception& e) {
    out.push_back(error(std::string("malformed command: ") + e.what(), name));
  } catch (const Error& e) {
    out.push_back(error(e.what(), name));
  }
  return out;
}

void Session::feed(const SampleBlock& block) {
  if (extractor_) {
    try {
      extractor_->push(block);
    } catch (const Error&) {
      extractor_->reset();
    }
  }
  if (phase_ != Phase::Calibrating || !writer_ || capture_written_ >= capture_needed_) return;
  if (!capture_origin_) capture_origin_ = block.first_sample;
  if (block.first_sample < *capture_origin_ + capture_written_) return;  // replayed or stale
  // Zero-fill samples lost in a gap so the capture stays aligned to the cues.
  const std::uint64_t gap = block.first_sample - *capture_origin_ - capture_written_;
  SampleBlock piece;
  if (gap > 0) {
    const auto n = static_cast<std::size_t>(std::min(gap, capture_needed_ - capture_written_));
    piece.resize(block.channels, n);
    piece.first_sample = capture_written_;
    writer_->write(piece);
    capture_written_ += n;
  }
  const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(block.count, capture_needed_ - capture_written_));
  if (n == 0) return;
  piece.resize(block.channels, n);
  piece.first_sample = capture_written_;
  for (std::size_t c = 0; c < block.channels; ++c) {
    const auto src = block.channel(c).first(n);
    std::copy(src.begin(), src.end(), piece.channel(c).begin());
  }
  writer_->write(piece);
  capture_written_ += n;
}

std::vector<Event> Session::tick() {
  ++tick_;
  switch (phase_) {
    case Phase::Decoding: return decode_tick();
    case Phase::Calibrating: return calibration_tick();
    case Phase::Training: return training_tick();
    case Phase::Idle: break;
  }
  robot_->tick(1.0 / options_.tick_rate_hz);
  last_robot_ = robot_->state();
  return {};
}

std::vector<Event> Session::decode_tick() {
  std::vector<Event> out;
  const double dt = 1.0 / options_.tick_rate_hz;
  decode::DecodeTick t;
  try {
    if (const auto g = decoder_.pending_injection()) {
      t = decoder_.step_probabilities(decode::one_hot(*g), true);
    } else if (extractor_ && extractor_->window_ready() && extractor_->end_sample() != last_window_end_) {
      last_window_end_ = extractor_->end_sample();
      t = decoder_.step_rms(extractor_->latest_rms());
    } else {
      robot_->tick(dt);
      last_robot_ = robot_->state();
      return out;
    }
  } catch (const Error& e) {
    out.push_back(error(e.what()));
    return out;
  }
  const auto cmds = generator_.generate(t.decoded, t.mode);
  robot_->send(cmds);
  robot_->tick(dt);
  last_robot_ = robot_->state();

  ++pred_seq_;
  json pred = {{"pred_seq", pred_seq_},
               {"gesture", gesture_name(t.decoded.label)},
               {"gesture_id", index_of(t.decoded.label)},
               {"predicted", gesture_name(t.predicted)},
               {"consecutive", t.decoded.consecutive_count},
               {"decoder_tick", t.decoded.tick_index},
               {"mode", mode_name(t.mode)},
               {"injected", t.injected}};
  json cmd_list = json::array();
  for (const auto& c : cmds) {
    cmd_list.push_back({{"joint", robot::joint_wire_name(c.joint)}, {"kind", robot::kind_wire_name(c.kind)}, {"value", c.value}});
  }
  pred["commands"] = std::move(cmd_list);
  out.push_back(make(EventType::Prediction, pred.dump()));
  out.push_back(make(EventType::Confidence,
                     json{{"pred_seq", pred_seq_}, {"p", to_vector(t.probabilities)}, {"p_prime", to_vector(t.confidence)}}.dump()));
  if (last_robot_) out.push_back(make(EventType::RobotState, robot::robot_state_to_json(*last_robot_)));
  if (t.mode_event) {
    out.push_back(make(EventType::Mode,
                       json{{"mode", mode_name(t.mode_event->to)}, {"from", mode_name(t.mode_event->from)}}.dump()));
  }
  return out;
}

std::vector<Event> Session::calibration_tick() {
  std::vector<Event> out;
  const double dt = 1.0 / options_.tick_rate_hz;
  robot_->tick(dt);
  last_robot_ = robot_->state();
  const double t = static_cast<double>(calib_ticks_++) * dt;
  const double total = cues_->total_duration();
  if (t < total) {
    if (const auto* cue = cues_->cue_at(t)) {
      int phase = kRest;
      if (t >= cues_->hold_end(*cue)) {
        phase = kReturn;
      } else if (t >= cues_->hold_start(*cue)) {
        phase = kHold;
      } else if (t >= cues_->transition_start(*cue)) {
        phase = kTransition;
      }
      const std::pair<std::size_t, int> key{cue->index, phase};
      if (last_cue_phase_ != key) {
        last_cue_phase_ = key;
        json p = {{"index", cue->index},
                  {"count", cues_->entries.size()},
                  {"gesture", gesture_name(cue->gesture)},
                  {"gesture_id", index_of(cue->gesture)},
                  {"phase", kCuePhaseNames[static_cast<std::size_t>(phase)]},
                  {"t_s", t},
                  {"phase_end_s", phase == kRest         ? cues_->transition_start(*cue)
                                  : phase == kTransition ? cues_->hold_start(*cue)
                                  : phase == kHold       ? cues_->hold_end(*cue)
                                                         : cues_->cue_end(*cue)}};
        out.push_back(make(EventType::Cue, p.dump()));
      }
    }
    return out;
  }
  if (!writer_) {
    phase_ = Phase::Idle;
    cues_.reset();
    out.push_back(error("cue playback finished without a signal source; nothing to train on"));
    out.push_back(session_event());
    return out;
  }
  if (capture_written_ < capture_needed_) {
    // allow the sample stream a few seconds to catch up with the cue clock
    if (t < total + 5.0) return out;
    phase_ = Phase::Idle;
    writer_.reset();
    cues_.reset();
    out.push_back(error("calibration capture incomplete: " + std::to_string(capture_written_) + " of " +
                        std::to_string(capture_needed_) + " samples"));
    out.push_back(session_event());
    return out;
  }
  finish_recording();
  return {session_event()};
}

void Session::finish_recording() {
  writer_->finish(source_ ? source_->impedances_ohm : std::nullopt);
  writer_.reset();
  const auto path = capture_path_;
  const auto schedule = *cues_;
  auto options = options_.calibration;
  const auto previous = bundle_;
  training_ = std::async(std::launch::async, [path, schedule, options, previous] {
    ingest::RecordingFileSource src(path);
    return previous ? model::recalibrate(src, schedule, *previous, options) : model::calibrate(src, schedule, options);
  });
  phase_ = Phase::Training;
}

std::vector<Event> Session::training_tick() {
  std::vector<Event> out;
  robot_->tick(1.0 / options_.tick_rate_hz);
  last_robot_ = robot_->state();
  if (!training_.valid() || training_.wait_for(std::chrono::seconds(0)) != std::future_status::ready) return out;
  try {
    auto bundle = std::make_shared<model::ModelBundle>(training_.get());
    model::save_bundle(*bundle, options_.work_dir / ("bundle-" + bundle->id + ".json"));
    set_bundle(std::move(bundle));
    decoder_.reset();
    generator_.reset();
    phase_ = Phase::Decoding;
  } catch (const Error& e) {
    phase_ = Phase::Idle;
    out.push_back(error(std::string("training failed: ") + e.what()));
  }
  cues_.reset();
  out.push_back(session_event());
  return out;
}

}  // namespace emg::gateway
