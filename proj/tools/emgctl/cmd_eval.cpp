#include <cmath>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>

#include "common.hpp"
#include "emg/analysis/heatmap.hpp"
#include "emg/analysis/impedance.hpp"
#include "emg/analysis/rt_accuracy.hpp"
#include "emg/analysis/snr.hpp"
#include "emg/analysis/stats.hpp"
#include "emg/dsp/butterworth.hpp"
#include "emg/error.hpp"
#include "emg/ingest/recording.hpp"
#include "emg/ingest/source_spec.hpp"
#include "emg/model/bundle.hpp"
#include "emg/model/calibration.hpp"

namespace emgctl {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json nan_to_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json confusion_json(const emg::model::ConfusionMatrix& m) {
  json rows = json::array();
  json recall = json::object();
  for (std::size_t t = 0; t < emg::kGestureCount; ++t) {
    rows.push_back(m.counts[t]);
    recall[std::string(emg::gesture_name(emg::kAllGestures[t]))] = nan_to_null(m.recall(static_cast<int>(t)));
  }
  std::vector<std::string> labels;
  for (auto g : emg::kAllGestures) labels.emplace_back(emg::gesture_name(g));
  return {{"labels", labels}, {"counts", rows}, {"total", m.total()}, {"correct", m.correct()},
          {"accuracy", m.accuracy()}, {"recall", recall}};
}

json test_json(const emg::analysis::TestResult& r) {
  json j = {{"statistic", r.statistic}, {"p_value", r.p_value}, {"n", r.n}, {"exact", r.exact}};
  if (r.df > 0) j["df"] = r.df;
  if (!r.group_sizes.empty()) j["group_sizes"] = r.group_sizes;
  if (r.z) j["z"] = *r.z;
  if (r.exact_p) j["exact_p"] = *r.exact_p;
  j["tail"] = r.tail == emg::analysis::Tail::Greater ? "greater" : r.tail == emg::analysis::Tail::Less ? "less"
                                                                                                     : "two-sided";
  return j;
}

json summary_json(const emg::analysis::Summary& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}, {"median", s.median}, {"min", s.min}, {"max", s.max}};
}

struct SessionInput {
  std::string recording, cues;
};

void add_session_options(CLI::App* cmd, SessionInput& in, const std::string& prefix = "") {
  cmd->add_option("--" + prefix + "recording", in.recording, "Recording file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--" + prefix + "cues", in.cues, "Cue schedule JSON (default: the recording's sidecar)");
}

emg::ingest::CueSchedule schedule_of(const SessionInput& in) {
  return emg::ingest::read_cue_schedule(in.cues.empty() ? emg::ingest::cue_sidecar_path(in.recording) : in.cues);
}

emg::model::SessionData load_session(const SessionInput& in, const std::optional<emg::model::ModelBundle>& bundle) {
  emg::ingest::RecordingFileSource source(in.recording);
  emg::model::CalibrationOptions options;
  std::optional<emg::dsp::ChannelMask> mask;
  if (bundle) mask = bundle->pipeline.mask;
  return emg::model::collect_session(source, schedule_of(in), options, mask);
}

}  // namespace

void register_eval(CLI::App& app) {
  auto* eval = app.add_subcommand("eval", "Evaluate a bundle, or run an analysis (snr, heatmaps, matrix, ...)");
  eval->require_subcommand(0, 1);

  static struct {
    std::string bundle, report = "-";
    SessionInput session;
  } e;
  eval->add_option("--bundle", e.bundle, "Model bundle")->check(CLI::ExistingFile);
  eval->add_option("--recording", e.session.recording, "Recording file")->check(CLI::ExistingFile);
  eval->add_option("--cues", e.session.cues, "Cue schedule JSON (default: the recording's sidecar)");
  eval->add_option("--report", e.report, "Report path ('-' for stdout)");
  eval->callback([eval] {
    if (!eval->get_subcommands().empty()) return;
    if (e.bundle.empty() || e.session.recording.empty()) {
      throw CLI::RequiredError("eval needs --bundle and --recording (or an analysis subcommand)");
    }
    const auto bundle = emg::model::load_bundle(e.bundle);
    emg::ingest::RecordingFileSource source(e.session.recording);
    const auto cm = emg::model::evaluate_bundle(bundle, source, schedule_of(e.session));
    write_json(e.report, {{"bundle_id", bundle.id}, {"recording", e.session.recording}, {"confusion", confusion_json(cm)},
                          {"accuracy", cm.accuracy()}});
  });

  // snr
  auto* snr = eval->add_subcommand("snr", "Session SNR: Fingers Closed holds against Rest holds");
  static struct {
    SessionInput session;
    std::string bundle, report = "-";
  } s;
  add_session_options(snr, s.session);
  snr->add_option("--bundle", s.bundle, "Use this bundle's mask and filter")->check(CLI::ExistingFile);
  snr->add_option("--report", s.report, "Report path");
  snr->callback([] {
    emg::ingest::RecordingFileSource source(s.session.recording);
    auto mask = emg::dsp::ChannelMask::all(source.channels());
    auto filter = emg::dsp::design_highpass(4, 120.0, source.sample_rate());
    if (!s.bundle.empty()) {
      const auto b = emg::model::load_bundle(s.bundle);
      mask = b.pipeline.mask;
      filter = b.pipeline.filter;
    } else if (auto imp = source.impedances()) {
      mask = emg::dsp::reject_channels(*imp);
    }
    const auto r = emg::analysis::session_snr(source, schedule_of(s.session), mask, filter);
    write_json(s.report, {{"snr", r.snr}, {"mvc_rms", r.mvc_rms}, {"rest_rms", r.rest_rms},
                          {"mvc_cues", r.mvc_cues}, {"rest_cues", r.rest_cues},
                          {"accepted_channels", mask.accepted_count()}});
  });

  // heatmaps
  auto* heat = eval->add_subcommand("heatmaps", "Mean RMS heatmap of every gesture");
  static struct {
    SessionInput session;
    std::string bundle, csv_dir, report = "-";
  } h;
  add_session_options(heat, h.session);
  heat->add_option("--bundle", h.bundle, "Use this bundle's channel mask")->check(CLI::ExistingFile);
  heat->add_option("--csv-dir", h.csv_dir, "Write one CSV per gesture here");
  heat->add_option("--report", h.report, "Report path");
  heat->callback([] {
    std::optional<emg::model::ModelBundle> bundle;
    if (!h.bundle.empty()) bundle = emg::model::load_bundle(h.bundle);
    const auto data = load_session(h.session, bundle);
    if (!h.csv_dir.empty()) fs::create_directories(h.csv_dir);
    json maps = json::array();
    for (auto g : emg::kAllGestures) {
      const auto hm = emg::analysis::mean_rms_heatmap(data.rms, data.labels, g, data.mask);
      json rows = json::array();
      for (Eigen::Index r = 0; r < hm.values.rows(); ++r) {
        std::vector<double> row;
        for (Eigen::Index c = 0; c < hm.values.cols(); ++c) row.push_back(hm.values(r, c));
        rows.push_back(row);
      }
      Eigen::Index ar = 0, ac = 0;
      hm.values.maxCoeff(&ar, &ac);
      maps.push_back({{"gesture", emg::gesture_name(g)}, {"gesture_id", emg::index_of(g)}, {"values", rows},
                      {"argmax", {ar, ac}}});
      if (!h.csv_dir.empty()) {
        emit((fs::path(h.csv_dir) / ("heatmap_" + std::to_string(emg::index_of(g)) + ".csv")).string(),
             emg::analysis::heatmap_to_csv(hm));
      }
    }
    write_json(h.report, {{"recording", h.session.recording}, {"unit", "V"}, {"heatmaps", maps}});
  });

  // matrix
  auto* matrix = eval->add_subcommand("matrix", "Pairwise distance/similarity of two sessions' gesture heatmaps");
  static struct {
    SessionInput a, b;
    std::string bundle, metric = "cosine", csv, report = "-";
  } m;
  add_session_options(matrix, m.a, "a-");
  add_session_options(matrix, m.b, "b-");
  matrix->add_option("--bundle", m.bundle, "Use this bundle's channel mask for both")->check(CLI::ExistingFile);
  matrix->add_option("--metric", m.metric, "euclidean or cosine")
      ->check(CLI::IsMember({"euclidean", "cosine"}));
  matrix->add_option("--csv", m.csv, "Write the labeled matrix as CSV");
  matrix->add_option("--report", m.report, "Report path");
  matrix->callback([] {
    std::optional<emg::model::ModelBundle> bundle;
    if (!m.bundle.empty()) bundle = emg::model::load_bundle(m.bundle);
    const auto a = load_session(m.a, bundle);
    // Both sessions are compared over the same electrodes.
    emg::ingest::RecordingFileSource source_b(m.b.recording);
    const auto b = emg::model::collect_session(source_b, schedule_of(m.b), {}, a.mask);
    const auto metric = m.metric == "cosine" ? emg::analysis::Metric::Cosine : emg::analysis::Metric::Euclidean;
    const auto pm = emg::analysis::pairwise_matrix(a.rms, a.labels, b.rms, b.labels, metric);
    if (!m.csv.empty()) emit(m.csv, emg::analysis::matrix_to_csv(pm));
    json rows = json::array();
    for (Eigen::Index r = 0; r < pm.values.rows(); ++r) {
      std::vector<double> row;
      for (Eigen::Index c = 0; c < pm.values.cols(); ++c) row.push_back(pm.values(r, c));
      rows.push_back(row);
    }
    write_json(m.report, {{"metric", emg::analysis::metric_name(metric)}, {"labels", pm.labels}, {"values", rows}});
  });

  // rt-accuracy
  auto* rt = eval->add_subcommand("rt-accuracy", "Per-cue accuracy of tick-paced predictions during holds");
  static struct {
    std::string bundle, source, cues, report = "-";
    double period = 600.0;
    std::size_t min_predictions = 20;
  } r;
  rt->add_option("--bundle", r.bundle, "Model bundle")->required()->check(CLI::ExistingFile);
  rt->add_option("--source", r.source, "recording:<path>, synth:<seed>[:preset] or tcp:host:port")->required();
  rt->add_option("--cues", r.cues, "Cue schedule JSON (default: the source's own)");
  rt->add_option("--period", r.period, "Tick period in samples")->check(CLI::PositiveNumber);
  rt->add_option("--min-predictions", r.min_predictions, "Flag holds with fewer predictions");
  rt->add_option("--report", r.report, "Report path");
  rt->callback([] {
    const auto bundle = emg::model::load_bundle(r.bundle);
    auto opened = emg::ingest::open_source(emg::ingest::SourceSpec::parse(r.source));
    std::optional<emg::ingest::CueSchedule> schedule = opened.schedule;
    if (!r.cues.empty()) schedule = emg::ingest::read_cue_schedule(r.cues);
    if (!schedule) throw emg::DataError("no cue schedule for " + r.source + "; pass --cues");
    const auto report = emg::analysis::realtime_accuracy(bundle, *opened.source, *schedule,
                                                         {r.period, r.min_predictions});
    json cues = json::array();
    for (const auto& c : report.cues) {
      cues.push_back({{"cue_index", c.cue_index}, {"gesture", emg::gesture_name(c.gesture)},
                      {"predictions", c.predictions}, {"correct", c.correct}, {"accuracy", c.accuracy},
                      {"flagged", c.flagged}});
    }
    write_json(r.report, {{"bundle_id", bundle.id}, {"source", r.source}, {"mean", report.mean},
                          {"median", report.median}, {"flagged", report.flagged},
                          {"min_predictions_per_hold", report.min_predictions_per_hold},
                          {"tick_period_samples", report.tick_period_samples},
                          {"trend", {{"intercept", report.trend.intercept}, {"slope", report.trend.slope},
                                     {"r_squared", report.trend.r_squared}}},
                          {"cues", cues}});
  });

  // stats
  auto* stats = eval->add_subcommand("stats", "Impedance drift (signed-rank) and per-cue Kruskal-Wallis");
  static struct {
    std::string before, after, rt_report, report = "-";
  } st;
  stats->add_option("--before", st.before, "Recording with the earlier impedances")->check(CLI::ExistingFile);
  stats->add_option("--after", st.after, "Recording with the later impedances")->check(CLI::ExistingFile);
  stats->add_option("--rt-report", st.rt_report, "rt-accuracy report: test per-cue accuracy differences")
      ->check(CLI::ExistingFile);
  stats->add_option("--report", st.report, "Report path");
  stats->callback([] {
    if (st.rt_report.empty() && (st.before.empty() || st.after.empty())) {
      throw CLI::RequiredError("stats needs --before and --after, or --rt-report");
    }
    json out = json::object();
    if (!st.before.empty() && !st.after.empty()) {
      const auto a = emg::ingest::RecordingFileSource(st.before).impedances();
      const auto b = emg::ingest::RecordingFileSource(st.after).impedances();
      if (!a || !b) throw emg::DataError("both recordings need stored impedances");
      const auto drift = emg::analysis::impedance_drift(*a, *b);
      out["impedance"] = {{"before", summary_json(emg::analysis::summarize_impedances(*a).ohms)},
                          {"after", summary_json(emg::analysis::summarize_impedances(*b).ohms)},
                          {"mean_percent_change", drift.mean_percent_change},
                          {"sd_percent_change", drift.sd_percent_change},
                          {"wilcoxon", test_json(drift.test)}};
    }
    if (!st.rt_report.empty()) {
      const auto doc = json::parse(read_text(st.rt_report));
      std::vector<std::vector<double>> groups;
      for (const auto& c : doc.at("cues")) {
        const auto n = c.at("predictions").get<std::size_t>();
        const auto k = c.at("correct").get<std::size_t>();
        if (n == 0) continue;
        std::vector<double> g(n, 0.0);
        std::fill(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(k), 1.0);
        groups.push_back(std::move(g));
      }
      out["per_cue_kruskal_wallis"] = test_json(emg::analysis::kruskal_wallis(groups, 0));
    }
    write_json(st.report, out);
  });
}

}  // namespace emgctl
