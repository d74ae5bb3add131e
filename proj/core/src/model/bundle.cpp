#include "emg/model/bundle.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emg/error.hpp"
#include "emg/gesture.hpp"
#include "emg/model/loss.hpp"

namespace emg::model {

using nlohmann::json;

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<std::size_t>(rows * cols) != data.size()) throw DecodeError("bundle: matrix size mismatch");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = data[static_cast<std::size_t>(i * cols + k)];
  }
  return m;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

void fnv(std::uint64_t& h, const void* p, std::size_t n) {
  const auto* b = static_cast<const unsigned char*>(p);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= b[i];
    h *= 0x100000001b3ull;
  }
}

void fnv_matrix(std::uint64_t& h, const Eigen::MatrixXd& m) {
  fnv(h, m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
}

}  // namespace

Eigen::VectorXd ModelBundle::probabilities(const Eigen::VectorXd& rms) const {
  return softmax(network.forward(pipeline.features_from_rms(rms)));
}

std::string compute_bundle_id(const ModelBundle& b) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& l : b.network.layers()) {
    fnv_matrix(h, l.weights);
    fnv_matrix(h, l.bias);
  }
  fnv_matrix(h, b.pipeline.pca.components);
  fnv_matrix(h, b.pipeline.normalizer.mu);
  fnv_matrix(h, b.pipeline.normalizer.sigma);
  for (bool a : b.pipeline.mask.accepted) fnv(h, &a, 1);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string bundle_to_json(const ModelBundle& b) {
  const auto& p = b.pipeline;
  json sections = json::array();
  for (const auto& s : p.filter.sections) sections.push_back({s.b0, s.b1, s.b2, s.a1, s.a2});
  json layers = json::array();
  for (const auto& l : b.network.layers()) layers.push_back({{"weights", matrix_json(l.weights)}, {"bias", vector_json(l.bias)}});
  json labels = json::array();
  for (Gesture g : kAllGestures) labels.push_back(gesture_name(g));
  json confusion = json::array();
  for (const auto& row : b.test_confusion.counts) confusion.push_back(row);
  const auto& tc = b.train_config;

  json doc = {
      {"format", "emg-bundle"},
      {"version", kBundleVersion},
      {"id", b.id},
      {"labels", std::move(labels)},
      {"channel_mask", p.mask.accepted},
      {"impedance_threshold_ohm", b.impedance_threshold_ohm},
      {"filter",
       {{"kind", p.filter.kind == dsp::FilterKind::HighPass ? "highpass" : "lowpass"},
        {"order", p.filter.order},
        {"cutoff_hz", p.filter.cutoff_hz},
        {"sample_rate_hz", p.filter.sample_rate_hz},
        {"sections", std::move(sections)}}},
      {"window_samples", p.window_samples},
      {"normalizer", {{"mu", vector_json(p.normalizer.mu)}, {"sigma", vector_json(p.normalizer.sigma)}}},
      {"pca", {{"components", matrix_json(p.pca.components)}, {"singular_values", vector_json(p.pca.singular_values)}}},
      {"network", {{"dropout", b.network.dropout_rate()}, {"layers", std::move(layers)}}},
      {"train_config",
       {{"epochs", tc.epochs},
        {"batch_size", tc.batch_size},
        {"split", {tc.split.train, tc.split.validation, tc.split.test}},
        {"adam", {{"lr", tc.adam.learning_rate}, {"beta1", tc.adam.beta1}, {"beta2", tc.adam.beta2}, {"eps", tc.adam.epsilon}}},
        {"hidden", tc.hidden},
        {"dropout", tc.dropout},
        {"seed", tc.seed}}},
      {"history",
       {{"train_loss", b.history.train_loss},
        {"validation_loss", b.history.validation_loss},
        {"best_epoch", b.history.best_epoch}}},
      {"split_sizes", {b.train_windows, b.validation_windows, b.test_windows}},
      {"test_confusion", std::move(confusion)},
  };
  return doc.dump();
}

ModelBundle bundle_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DecodeError(std::string("bundle is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != "emg-bundle") throw DecodeError("not a model bundle");
    const int version = doc.at("version").get<int>();
    if (version != kBundleVersion) throw DecodeError("unsupported bundle version " + std::to_string(version));

    ModelBundle b;
    b.id = doc.at("id").get<std::string>();
    auto& p = b.pipeline;
    p.mask.accepted = doc.at("channel_mask").get<std::vector<bool>>();
    b.impedance_threshold_ohm = doc.at("impedance_threshold_ohm").get<double>();
    const auto& f = doc.at("filter");
    p.filter.kind = f.at("kind") == "highpass" ? dsp::FilterKind::HighPass : dsp::FilterKind::LowPass;
    p.filter.order = f.at("order").get<int>();
    p.filter.cutoff_hz = f.at("cutoff_hz").get<double>();
    p.filter.sample_rate_hz = f.at("sample_rate_hz").get<double>();
    for (const auto& s : f.at("sections")) {
      p.filter.sections.push_back({s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>(),
                                   s.at(3).get<double>(), s.at(4).get<double>()});
    }
    p.window_samples = doc.at("window_samples").get<int>();
    p.normalizer.mu = vector_from(doc.at("normalizer").at("mu"));
    p.normalizer.sigma = vector_from(doc.at("normalizer").at("sigma"));
    p.pca.components = matrix_from(doc.at("pca").at("components"));
    p.pca.singular_values = vector_from(doc.at("pca").at("singular_values"));

    std::vector<DenseLayer> layers;
    for (const auto& l : doc.at("network").at("layers")) {
      layers.push_back({matrix_from(l.at("weights")), vector_from(l.at("bias"))});
    }
    b.network = Mlp(std::move(layers), doc.at("network").at("dropout").get<double>());

    const auto& tc = doc.at("train_config");
    b.train_config.epochs = tc.at("epochs").get<int>();
    b.train_config.batch_size = tc.at("batch_size").get<int>();
    b.train_config.split = {tc.at("split").at(0).get<double>(), tc.at("split").at(1).get<double>(),
                            tc.at("split").at(2).get<double>()};
    const auto& adam = tc.at("adam");
    b.train_config.adam = {adam.at("lr").get<double>(), adam.at("beta1").get<double>(), adam.at("beta2").get<double>(),
                           adam.at("eps").get<double>()};
    b.train_config.hidden = tc.at("hidden").get<std::vector<int>>();
    b.train_config.dropout = tc.at("dropout").get<double>();
    b.train_config.seed = tc.at("seed").get<std::uint64_t>();

    const auto& h = doc.at("history");
    b.history.train_loss = h.at("train_loss").get<std::vector<double>>();
    b.history.validation_loss = h.at("validation_loss").get<std::vector<double>>();
    b.history.best_epoch = h.at("best_epoch").get<int>();
    const auto& sizes = doc.at("split_sizes");
    b.train_windows = sizes.at(0).get<std::size_t>();
    b.validation_windows = sizes.at(1).get<std::size_t>();
    b.test_windows = sizes.at(2).get<std::size_t>();
    const auto& cm = doc.at("test_confusion");
    for (std::size_t i = 0; i < kGestureCount; ++i) {
      for (std::size_t j = 0; j < kGestureCount; ++j) b.test_confusion.counts[i][j] = cm.at(i).at(j).get<std::size_t>();
    }

    if (p.pca.components.rows() != static_cast<Eigen::Index>(p.mask.accepted_count()) ||
        p.normalizer.mu.size() != p.pca.components.rows() || b.network.input_dim() != p.pca.components.cols()) {
      throw DecodeError("bundle: inconsistent pipeline dimensions");
    }
    return b;
  } catch (const json::exception& e) {
    throw DecodeError(std::string("bundle: ") + e.what());
  }
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << bundle_to_json(bundle);
  if (!out) throw Error("write failed: " + path.string());
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("bundle not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return bundle_from_json(ss.str());
}

}  // namespace emg::model
