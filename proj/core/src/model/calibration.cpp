#include "emg/model/calibration.hpp"

#include <algorithm>

#include "emg/error.hpp"

namespace emg::model {

SessionData collect_session(ingest::BlockSource& source, const ingest::CueSchedule& schedule,
                            const CalibrationOptions& options, std::optional<dsp::ChannelMask> mask) {
  SessionData s;
  if (mask) {
    if (mask->channel_count() != source.channels()) throw DataError("channel mask width does not match source");
    s.mask = *mask;
  } else if (const auto z = source.impedances()) {
    s.mask = dsp::reject_channels(*z, options.impedance_threshold_ohm);
  } else {
    s.mask = dsp::ChannelMask::all(source.channels());
  }
  s.filter = dsp::design_highpass(options.filter_order, options.cutoff_hz, source.sample_rate());
  const std::uint64_t total = source.total_samples().value_or(0);
  s.dataset = ingest::label_windows(schedule, source.sample_rate(), total, options.window_samples);
  s.rms = ingest::extract_window_rms(source, s.mask, s.filter, s.dataset);
  s.labels = s.dataset.label_ids();
  return s;
}

Eigen::MatrixXd transform_rms(const dsp::FeaturePipeline& pipeline, const Eigen::MatrixXd& rms) {
  Eigen::MatrixXd out(rms.rows(), pipeline.feature_dim());
  for (Eigen::Index i = 0; i < rms.rows(); ++i) {
    out.row(i) = pipeline.features_from_rms(rms.row(i).transpose()).transpose();
  }
  return out;
}

ModelBundle fit_bundle(const SessionData& session, const CalibrationOptions& options) {
  if (session.rms.rows() == 0) throw DataError("empty dataset");
  const auto& cfg = options.train;
  const DataSplit split = stratified_split(session.labels, cfg.split, cfg.seed);
  std::array<bool, kGestureCount> present{};
  for (std::size_t r : split.train) present[static_cast<std::size_t>(session.labels[r])] = true;
  for (std::size_t g = 0; g < kGestureCount; ++g) {
    if (!present[g]) {
      throw DataError("class " + std::string(gesture_name(kAllGestures[g])) + " is absent from the training split");
    }
  }

  ModelBundle b;
  auto& p = b.pipeline;
  p.mask = session.mask;
  p.filter = session.filter;
  p.window_samples = session.dataset.window_samples;

  const Eigen::MatrixXd train_rms = select_rows(session.rms, split.train);
  p.normalizer = dsp::fit_normalizer(train_rms);
  Eigen::MatrixXd z_train(train_rms.cols(), train_rms.rows());  // channels x samples
  for (Eigen::Index i = 0; i < train_rms.rows(); ++i) {
    z_train.col(i) = dsp::normalize(p.normalizer, train_rms.row(i).transpose());
  }
  const int k = std::min<int>(options.components, static_cast<int>(p.mask.accepted_count()));
  p.pca = dsp::fit_pca(z_train, k);

  const Eigen::MatrixXd features = transform_rms(p, session.rms);
  const auto train_y = select(session.labels, split.train);
  const auto val_y = select(session.labels, split.validation);
  auto trained = train_network(select_rows(features, split.train), train_y, select_rows(features, split.validation),
                               val_y, cfg);
  b.network = std::move(trained.model);
  b.history = std::move(trained.history);
  b.train_config = cfg;
  b.impedance_threshold_ohm = options.impedance_threshold_ohm;
  b.train_windows = split.train.size();
  b.validation_windows = split.validation.size();
  b.test_windows = split.test.size();
  if (!split.test.empty()) {
    b.test_confusion = evaluate(b.network, select_rows(features, split.test), select(session.labels, split.test));
  }
  b.id = compute_bundle_id(b);
  return b;
}

ModelBundle calibrate(ingest::BlockSource& source, const ingest::CueSchedule& schedule,
                      const CalibrationOptions& options) {
  return fit_bundle(collect_session(source, schedule, options), options);
}

ModelBundle recalibrate(ingest::BlockSource& source, const ingest::CueSchedule& schedule,
                        const ModelBundle& previous, const CalibrationOptions& options) {
  return fit_bundle(collect_session(source, schedule, options, previous.pipeline.mask), options);
}

ConfusionMatrix evaluate_bundle(const ModelBundle& bundle, ingest::BlockSource& source,
                                const ingest::CueSchedule& schedule) {
  const auto& p = bundle.pipeline;
  if (p.mask.channel_count() != source.channels()) throw DataError("bundle channel mask does not match source");
  const auto dataset =
      ingest::label_windows(schedule, source.sample_rate(), source.total_samples().value_or(0), p.window_samples);
  const Eigen::MatrixXd rms = ingest::extract_window_rms(source, p.mask, p.filter, dataset);
  return evaluate(bundle.network, transform_rms(p, rms), dataset.label_ids());
}

}  // namespace emg::model
