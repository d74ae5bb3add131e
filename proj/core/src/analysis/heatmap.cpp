#include "emg/analysis/heatmap.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "emg/dsp/features.hpp"
#include "emg/error.hpp"

namespace emg::analysis {

std::string_view dataset_tag_name(DatasetTag tag) { return tag == DatasetTag::Initial ? "initial" : "recalibration"; }

std::string_view metric_name(Metric m) { return m == Metric::Euclidean ? "euclidean" : "cosine"; }

Heatmap mean_rms_heatmap(const Eigen::MatrixXd& rms, std::span<const int> labels, Gesture gesture,
                         const dsp::ChannelMask& mask, const dsp::ElectrodeArray& grid, DatasetTag tag) {
  if (static_cast<std::size_t>(rms.rows()) != labels.size()) throw ParameterError("labels do not match RMS rows");
  if (static_cast<std::size_t>(rms.cols()) != mask.accepted_count()) {
    throw ParameterError("RMS columns do not match the channel mask");
  }
  if (mask.channel_count() != grid.channel_count()) throw ParameterError("channel mask does not match the grid");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(rms.cols());
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < rms.rows(); ++i) {
    if (labels[static_cast<std::size_t>(i)] == static_cast<int>(index_of(gesture))) {
      sum += rms.row(i).transpose();
      ++count;
    }
  }
  if (count == 0) throw DataError("no windows of gesture " + std::string(gesture_name(gesture)));
  Heatmap h;
  h.gesture = gesture;
  h.tag = tag;
  h.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.rows), static_cast<Eigen::Index>(grid.cols));
  const auto channels = mask.accepted_indices();
  for (std::size_t m = 0; m < channels.size(); ++m) {
    const auto [r, c] = grid.grid_position(channels[m]);
    h.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
        sum[static_cast<Eigen::Index>(m)] / static_cast<double>(count);
  }
  return h;
}

double euclidean_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm(); }

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double denom = a.norm() * b.norm();
  if (denom == 0.0) throw DataError("cosine similarity of a zero vector");
  return std::clamp(a.dot(b) / denom, -1.0, 1.0);
}

PairwiseMatrix pairwise_matrix(const Eigen::MatrixXd& rms_a, std::span<const int> labels_a,
                               const Eigen::MatrixXd& rms_b, std::span<const int> labels_b, Metric metric) {
  if (rms_a.cols() != rms_b.cols()) throw ParameterError("datasets have different channel counts");
  if (static_cast<std::size_t>(rms_a.rows()) != labels_a.size() ||
      static_cast<std::size_t>(rms_b.rows()) != labels_b.size()) {
    throw ParameterError("labels do not match RMS rows");
  }
  Eigen::MatrixXd pooled(rms_a.rows() + rms_b.rows(), rms_a.cols());
  pooled << rms_a, rms_b;
  const auto norm = dsp::fit_normalizer(pooled);

  constexpr std::size_t G = kGestureCount;
  std::array<Eigen::VectorXd, 2 * G> means;
  std::array<std::size_t, 2 * G> counts{};
  for (auto& m : means) m = Eigen::VectorXd::Zero(rms_a.cols());
  auto accumulate = [&](const Eigen::MatrixXd& rms, std::span<const int> labels, std::size_t offset) {
    for (Eigen::Index i = 0; i < rms.rows(); ++i) {
      const int l = labels[static_cast<std::size_t>(i)];
      if (l < 0 || l >= static_cast<int>(G)) throw ParameterError("label out of range");
      means[offset + static_cast<std::size_t>(l)] += norm.apply(rms.row(i).transpose());
      ++counts[offset + static_cast<std::size_t>(l)];
    }
  };
  accumulate(rms_a, labels_a, 0);
  accumulate(rms_b, labels_b, G);

  PairwiseMatrix out;
  out.metric = metric;
  for (std::size_t k = 0; k < 2 * G; ++k) {
    const Gesture g = kAllGestures[k % G];
    const char* which = k < G ? "A" : "B";
    if (counts[k] == 0) {
      throw DataError("dataset " + std::string(which) + " has no windows of gesture " + std::string(gesture_name(g)));
    }
    means[k] /= static_cast<double>(counts[k]);
    out.labels.push_back(std::string(gesture_name(g)) + " (" + which + ")");
  }
  out.values.resize(2 * G, 2 * G);
  for (std::size_t i = 0; i < 2 * G; ++i) {
    for (std::size_t j = 0; j < 2 * G; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      if (j < i) {
        out.values(ii, jj) = out.values(jj, ii);
      } else if (i == j) {
        out.values(ii, jj) = metric == Metric::Euclidean ? 0.0 : 1.0;
      } else {
        out.values(ii, jj) = metric == Metric::Euclidean ? euclidean_distance(means[i], means[j])
                                                         : cosine_similarity(means[i], means[j]);
      }
    }
  }
  return out;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

void append_label(std::string& out, const std::string& s) {
  out += '"';
  out += s;
  out += '"';
}

}  // namespace

std::string matrix_to_csv(const PairwiseMatrix& m) {
  std::string out = "label";
  for (const auto& l : m.labels) {
    out += ',';
    append_label(out, l);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    append_label(out, m.labels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
      out += ',';
      append_number(out, m.values(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string heatmap_to_csv(const Heatmap& h) {
  std::string out = "row";
  for (Eigen::Index c = 0; c < h.values.cols(); ++c) out += ",c" + std::to_string(c);
  out += '\n';
  for (Eigen::Index r = 0; r < h.values.rows(); ++r) {
    out += std::to_string(r);
    for (Eigen::Index c = 0; c < h.values.cols(); ++c) {
      out += ',';
      append_number(out, h.values(r, c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace emg::analysis
