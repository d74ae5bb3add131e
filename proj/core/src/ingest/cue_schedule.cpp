#include "emg/ingest/cue_schedule.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emg/error.hpp"

namespace emg::ingest {

using nlohmann::json;

double CueSchedule::total_duration() const {
  if (entries.empty()) return 0.0;
  return cue_end(entries.back());
}

const CueEntry* CueSchedule::cue_at(double t_s) const {
  // entries are time-ordered
  auto it = std::upper_bound(entries.begin(), entries.end(), t_s,
                             [](double t, const CueEntry& e) { return t < e.start_s; });
  if (it == entries.begin()) return nullptr;
  --it;
  return t_s < cue_end(*it) ? &*it : nullptr;
}

CueSchedule build_cue_schedule(std::uint64_t seed, std::size_t reps_per_series, std::size_t series, CueTiming timing,
                               double series_rest_s) {
  if (reps_per_series < 1) throw ParameterError("reps_per_series must be >= 1");
  if (series < 1) throw ParameterError("series must be >= 1");
  if (timing.label_s > timing.hold_s) throw ParameterError("labeled span exceeds hold phase");

  CueSchedule out;
  out.timing = timing;
  out.seed = seed;
  out.series = series;
  out.reps_per_series = reps_per_series;
  out.series_rest_s = series_rest_s;

  std::mt19937_64 rng(seed);
  const double cue_len = timing.cue_duration();
  double t = 0.0;
  for (std::size_t s = 0; s < series; ++s) {
    std::vector<Gesture> block;
    for (std::size_t r = 0; r < reps_per_series; ++r) {
      block.insert(block.end(), kAllGestures.begin(), kAllGestures.end());
    }
    std::shuffle(block.begin(), block.end(), rng);
    if (s > 0) t += series_rest_s;
    for (Gesture g : block) {
      out.entries.push_back({out.entries.size(), s, g, t, false});
      t += cue_len;
    }
  }
  return out;
}

CueSchedule build_cue_schedule(std::uint64_t seed, CuePreset preset) {
  return preset == CuePreset::Initial ? build_cue_schedule(seed, 5, 2) : build_cue_schedule(seed, 5, 1);
}

std::string cue_schedule_to_json(const CueSchedule& s) {
  json entries = json::array();
  for (const auto& e : s.entries) {
    entries.push_back({{"index", e.index},
                       {"series", e.series},
                       {"gesture", index_of(e.gesture)},
                       {"name", gesture_name(e.gesture)},
                       {"t_start", e.start_s},
                       {"t_transition", s.transition_start(e)},
                       {"t_hold", s.hold_start(e)},
                       {"t_label", s.label_start(e)},
                       {"t_hold_end", s.hold_end(e)},
                       {"t_end", s.cue_end(e)},
                       {"discarded", e.discarded}});
  }
  json doc = {{"format", "emg-cues"},
              {"version", 1},
              {"seed", s.seed},
              {"series", s.series},
              {"reps_per_series", s.reps_per_series},
              {"series_rest_s", s.series_rest_s},
              {"start_epoch", s.start_epoch},
              {"timing",
               {{"a", s.timing.rest_s},
                {"b", s.timing.transition_s},
                {"c", s.timing.hold_s},
                {"c_prime", s.timing.label_s},
                {"d", s.timing.return_s}}},
              {"entries", std::move(entries)}};
  return doc.dump(2);
}

CueSchedule cue_schedule_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DecodeError(std::string("cue sidecar is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != "emg-cues") throw DecodeError("not a cue sidecar");
    if (doc.at("version") != 1) throw DecodeError("unsupported cue sidecar version");
    CueSchedule s;
    s.seed = doc.at("seed").get<std::uint64_t>();
    s.series = doc.at("series").get<std::size_t>();
    s.reps_per_series = doc.at("reps_per_series").get<std::size_t>();
    s.series_rest_s = doc.at("series_rest_s").get<double>();
    s.start_epoch = doc.value("start_epoch", 0.0);
    const auto& t = doc.at("timing");
    s.timing = {t.at("a").get<double>(), t.at("b").get<double>(), t.at("c").get<double>(),
                t.at("c_prime").get<double>(), t.at("d").get<double>()};
    for (const auto& e : doc.at("entries")) {
      const auto g = gesture_from_id(e.at("gesture").get<int>());
      if (!g) throw DecodeError("cue sidecar: gesture id out of range");
      s.entries.push_back({e.at("index").get<std::size_t>(), e.at("series").get<std::size_t>(), *g,
                           e.at("t_start").get<double>(), e.value("discarded", false)});
    }
    return s;
  } catch (const json::exception& e) {
    throw DecodeError(std::string("cue sidecar: ") + e.what());
  }
}

void write_cue_schedule(const CueSchedule& schedule, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << cue_schedule_to_json(schedule) << '\n';
}

CueSchedule read_cue_schedule(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cue sidecar not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return cue_schedule_from_json(ss.str());
}

}  // namespace emg::ingest
