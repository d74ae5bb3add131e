#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "common.hpp"
#include "emg/ingest/cue_schedule.hpp"
#include "emg/ingest/recording.hpp"
#include "emg/model/bundle.hpp"
#include "emg/model/calibration.hpp"

namespace emgctl {

using nlohmann::json;

namespace {

json pipeline_info(const emg::model::ModelBundle& b) {
  const auto& p = b.pipeline;
  std::vector<std::size_t> rejected;
  for (std::size_t c = 0; c < p.mask.channel_count(); ++c) {
    if (!p.mask.accepted[c]) rejected.push_back(c);
  }
  json sections = json::array();
  for (const auto& s : p.filter.sections) sections.push_back({s.b0, s.b1, s.b2, s.a1, s.a2});
  const Eigen::VectorXd ratio = p.pca.explained_variance_ratio();
  std::vector<double> explained(ratio.data(), ratio.data() + ratio.size());
  return {{"bundle_id", b.id},
          {"channels", p.mask.channel_count()},
          {"accepted_channels", p.accepted_channels()},
          {"rejected_channels", rejected},
          {"impedance_threshold_ohm", b.impedance_threshold_ohm},
          {"filter",
           {{"kind", p.filter.kind == emg::dsp::FilterKind::HighPass ? "highpass" : "lowpass"},
            {"order", p.filter.order},
            {"cutoff_hz", p.filter.cutoff_hz},
            {"sample_rate_hz", p.filter.sample_rate_hz},
            {"sections", sections}}},
          {"window_samples", p.window_samples},
          {"components", p.feature_dim()},
          {"explained_variance_ratio", explained},
          {"explained_variance_total", ratio.sum()},
          {"test_accuracy", b.test_confusion.accuracy()}};
}

}  // namespace

void register_model(CLI::App& app) {
  auto* info = app.add_subcommand("pipeline-info", "Print mask, filter, K and explained variance of a bundle");
  static std::string info_bundle;
  info->add_option("bundle", info_bundle, "Model bundle")->required()->check(CLI::ExistingFile);
  info->callback([] { write_json("-", pipeline_info(emg::model::load_bundle(info_bundle))); });

  auto* train = app.add_subcommand("train", "Fit a model bundle on a cued recording");
  static struct {
    std::string recording, cues, out, previous, report;
    std::uint64_t seed = 0;
    int epochs = 200;
  } t;
  train->add_option("--recording", t.recording, "Recording file")->required()->check(CLI::ExistingFile);
  train->add_option("--cues", t.cues, "Cue schedule JSON")->required()->check(CLI::ExistingFile);
  train->add_option("--out", t.out, "Output bundle")->required();
  train->add_option("--seed", t.seed, "Split, initialization and shuffling seed");
  train->add_option("--epochs", t.epochs, "Training epochs")->check(CLI::PositiveNumber);
  train->add_option("--previous", t.previous, "Recalibrate: keep this bundle's channel mask")
      ->check(CLI::ExistingFile);
  train->add_option("--report", t.report, "Write a training summary JSON here ('-' for stdout)");
  train->callback([] {
    emg::model::CalibrationOptions options;
    options.train.seed = t.seed;
    options.train.epochs = t.epochs;
    const auto schedule = emg::ingest::read_cue_schedule(t.cues);
    emg::ingest::RecordingFileSource source(t.recording);
    const auto bundle =
        t.previous.empty()
            ? emg::model::calibrate(source, schedule, options)
            : emg::model::recalibrate(source, schedule, emg::model::load_bundle(t.previous), options);
    emg::model::save_bundle(bundle, t.out);
    json summary = pipeline_info(bundle);
    summary["out"] = t.out;
    summary["best_epoch"] = bundle.history.best_epoch;
    summary["split"] = {{"train", bundle.train_windows},
                        {"validation", bundle.validation_windows},
                        {"test", bundle.test_windows}};
    if (!t.report.empty()) write_json(t.report, summary);
    std::cerr << "bundle " << bundle.id << " test accuracy " << bundle.test_confusion.accuracy() << " -> " << t.out
              << '\n';
  });
}

}  // namespace emgctl
